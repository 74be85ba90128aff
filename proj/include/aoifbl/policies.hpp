#pragma once

// Allocation policies mapping a system AoI state to per-sensor integer
// blocklengths: uniform split, min-PER, one-step AoI-optimal, and lookup in a
// trained MDP policy table.

#include <numeric>
#include <vector>

#include "aoifbl/fbl_math.hpp"
#include "aoifbl/mdp_solver.hpp"

namespace aoifbl {

struct Allocation {
    std::vector<int> n;  // channel uses per sensor, sum <= n_max

    int total() const { return std::accumulate(n.begin(), n.end(), 0); }
};

struct AoiState {
    std::vector<int> a;  // per-sensor age in periods, each >= 1
};

enum class PolicyKind { Uniform, MinPer, OneStep, MdpLookup };

// MdpLookup carries a trained table; the other kinds leave it null.
struct Policy {
    PolicyKind kind = PolicyKind::Uniform;
    const QTable* qtable = nullptr;
};

const char* policy_name(PolicyKind kind);

// Scenario-side parameters a policy needs to produce an allocation.
struct AllocationContext {
    std::vector<ChannelSpec> specs;
    int n_max = 500;
    double eps_max = 0.1;
};

// Each sensor gets floor(n_max / M); any remainder stays idle.
Allocation uniform_allocation(int sensors, int n_max);

struct FeasibilityReport {
    std::vector<bool> sensor_ok;  // eps(n_m) <= eps_max

    bool ok() const {
        for (bool b : sensor_ok)
            if (!b) return false;
        return true;
    }
};

FeasibilityReport feasibility_check(const Allocation& alloc,
                                    const std::vector<ChannelSpec>& specs,
                                    double eps_max);

// Integer allocation exhausting n_max that minimizes the total PER, realized
// by bisection on a common target error rate plus a local exchange pass.
// Throws std::runtime_error if the per-sensor minima already exceed n_max.
Allocation min_per_allocation(const std::vector<ChannelSpec>& specs, int n_max,
                              double eps_max);

// Minimizes sum_m eps_m(n_m) * A_m subject to the budget and per-sensor
// minima. For two sensors this is an exact scan over every admissible split;
// for more sensors a balance heuristic followed by local exchange. Ties break
// toward the smallest n_1.
Allocation one_step_allocation(const AoiState& state, const std::vector<ChannelSpec>& specs,
                               int n_max, double eps_max);

// Diagnostic distance from the continuous-relaxation balance condition:
// max over sensor pairs of |xi_i - xi_j| / max(xi_i, xi_j), xi_m = eps_m * A_m.
double relaxed_balance_residual(const Allocation& alloc, const AoiState& state,
                                const std::vector<ChannelSpec>& specs);

// Dispatches to the policy's allocator. Uniform and MinPer ignore the state;
// MdpLookup clips each age to the table's a_max before lookup and requires a
// table whose dimensions match the context.
Allocation allocate(const Policy& policy, const AoiState& state,
                    const AllocationContext& ctx);

}  // namespace aoifbl
