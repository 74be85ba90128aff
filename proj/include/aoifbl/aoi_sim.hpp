#pragma once

// Per-period AoI process simulation under any allocation policy, with the
// discounted and undiscounted metrics aggregated over Monte-Carlo trials.
//
// Randomness: every trial runs its own std::mt19937_64 seeded with
// splitmix64(base_seed + GOLDEN * (trial + 1)). Per period one uniform draw
// per sensor, u = (rng() >> 11) * 2^-53, and the packet fails iff u < eps.
// The same base seed therefore yields identical failure draws across policies
// that are compared on it (common random numbers), and every metric is
// bit-stable on one platform.

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <string>
#include <vector>

#include "aoifbl/policies.hpp"

namespace aoifbl {

struct Scenario {
    std::string name;
    std::vector<ChannelSpec> specs;
    std::vector<double> snr_db;    // as configured; specs carry the linear ratios
    int n_max = 500;
    double eps_max = 0.1;
    std::vector<int> a0 = {1, 1};  // initial ages
    int periods = 500;             // K
    int trials = 500;
    double gamma = 0.9;
    int a_max = 8;                 // MDP age truncation

    AllocationContext context() const { return {specs, n_max, eps_max}; }
    void validate() const;
};

std::uint64_t trial_seed(std::uint64_t base_seed, int trial);

// One period: independently per sensor, success (age -> 1) with probability
// 1 - eps(n_m), failure (age + 1) otherwise. Ages are not clipped here; only
// MDP table lookup clips.
AoiState step(const AoiState& state, const Allocation& alloc,
              const std::vector<ChannelSpec>& specs, std::mt19937_64& rng);

struct Trajectory {
    std::vector<AoiState> states;       // A_1 .. A_K
    std::vector<Allocation> allocs;     // allocation used in each period
    std::vector<std::vector<bool>> delivered;  // per period, per sensor
    bool feasible = true;               // policy met eps_max at the initial state
};

Trajectory run_episode(const Scenario& scenario, const Policy& policy,
                       std::uint64_t seed);

// D = sum_{k=1..K} gamma^(k-1) |A_k|.
double discounted_aoi(const Trajectory& traj, double gamma);

struct SimMetrics {
    double delta_d_mean = 0.0;      // mean(D) - 2 (1 - gamma^K) / (1 - gamma)
    double var_d = 0.0;             // population variance of D over trials
    double delta_mean_abs_a = 0.0;  // pooled mean |A_k| over trials x periods, minus 2
    double var_abs_a = 0.0;         // pooled population variance of |A_k|
    bool feasible = true;
};

// All-fresh lower bound of D for the scenario's gamma and K.
double discounted_lower_bound(const Scenario& scenario);

// Occurrence counts of (A1, A2) over every simulated period, for scatter
// export and tail diagnostics.
using StateCounts = std::map<std::pair<int, int>, long>;

// scatter_counts, when non-null, receives the pooled state occupancy of the
// whole Monte-Carlo run (two-sensor scenarios only).
SimMetrics monte_carlo(const Scenario& scenario, const Policy& policy,
                       std::uint64_t base_seed, StateCounts* scatter_counts = nullptr);

}  // namespace aoifbl
