#include "aoifbl/aoi_sim.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace aoifbl {

void Scenario::validate() const {
    if (specs.empty()) throw std::invalid_argument("Scenario: no sensors");
    for (const auto& s : specs) s.validate();
    if (n_max < static_cast<int>(specs.size()))
        throw std::invalid_argument("Scenario: n_max below sensor count");
    if (!(eps_max > 0.0 && eps_max < 0.5))
        throw std::invalid_argument("Scenario: eps_max must be in (0, 0.5)");
    if (a0.size() != specs.size())
        throw std::invalid_argument("Scenario: a0 dimension mismatch");
    for (int a : a0)
        if (a < 1) throw std::invalid_argument("Scenario: initial ages must be >= 1");
    if (periods < 1 || trials < 1)
        throw std::invalid_argument("Scenario: periods and trials must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("Scenario: gamma must be in (0, 1)");
    if (a_max < 2) throw std::invalid_argument("Scenario: a_max must be >= 2");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Allocations are deterministic in the (clipped) state, so episodes share a
// per-policy cache. One-step lookups key on the exact age vector; the
// state-independent policies key on an empty vector.
class CachedAllocator {
  public:
    CachedAllocator(const Policy& policy, const AllocationContext& ctx)
        : policy_(policy), ctx_(ctx) {}

    const Allocation& at(const AoiState& state) {
        std::vector<int> key;
        if (policy_.kind == PolicyKind::OneStep) {
            key = state.a;
        } else if (policy_.kind == PolicyKind::MdpLookup) {
            key.reserve(state.a.size());
            for (int a : state.a) key.push_back(std::min(a, policy_.qtable->a_max));
        }
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(std::move(key), allocate(policy_, state, ctx_)).first;
        return it->second;
    }

  private:
    Policy policy_;
    AllocationContext ctx_;
    std::map<std::vector<int>, Allocation> cache_;
};

Trajectory run_episode_cached(const Scenario& scenario, CachedAllocator& alloc_cache,
                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t m_count = scenario.specs.size();

    Trajectory traj;
    traj.states.reserve(scenario.periods);
    traj.allocs.reserve(scenario.periods);
    traj.delivered.reserve(scenario.periods);

    AoiState state{scenario.a0};
    traj.feasible =
        feasibility_check(alloc_cache.at(state), scenario.specs, scenario.eps_max).ok();

    for (int k = 0; k < scenario.periods; ++k) {
        const Allocation& alloc = alloc_cache.at(state);
        std::vector<bool> delivered(m_count);
        AoiState next;
        next.a.resize(m_count);
        for (std::size_t m = 0; m < m_count; ++m) {
            const double eps = packet_error_rate(scenario.specs[m], alloc.n[m]);
            const bool fail = canonical(rng) < eps;
            delivered[m] = !fail;
            next.a[m] = fail ? state.a[m] + 1 : 1;
        }
        traj.allocs.push_back(alloc);
        traj.delivered.push_back(std::move(delivered));
        traj.states.push_back(next);
        state = std::move(next);
    }
    return traj;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, int trial) {
    return splitmix64(base_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1));
}

AoiState step(const AoiState& state, const Allocation& alloc,
              const std::vector<ChannelSpec>& specs, std::mt19937_64& rng) {
    if (state.a.size() != specs.size() || alloc.n.size() != specs.size())
        throw std::invalid_argument("step: dimension mismatch");
    AoiState next;
    next.a.resize(specs.size());
    for (std::size_t m = 0; m < specs.size(); ++m) {
        const double eps = packet_error_rate(specs[m], alloc.n[m]);
        next.a[m] = (canonical(rng) < eps) ? state.a[m] + 1 : 1;
    }
    return next;
}

Trajectory run_episode(const Scenario& scenario, const Policy& policy,
                       std::uint64_t seed) {
    scenario.validate();
    CachedAllocator cache(policy, scenario.context());
    return run_episode_cached(scenario, cache, seed);
}

double discounted_aoi(const Trajectory& traj, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("discounted_aoi: gamma must be in (0, 1)");
    double sum = 0.0;
    double weight = 1.0;
    for (const auto& state : traj.states) {
        int abs_a = 0;
        for (int a : state.a) abs_a += a;
        sum += weight * abs_a;
        weight *= gamma;
    }
    return sum;
}

double discounted_lower_bound(const Scenario& scenario) {
    const int m = static_cast<int>(scenario.specs.size());
    return m * (1.0 - std::pow(scenario.gamma, scenario.periods)) / (1.0 - scenario.gamma);
}

SimMetrics monte_carlo(const Scenario& scenario, const Policy& policy,
                       std::uint64_t base_seed, StateCounts* scatter_counts) {
    scenario.validate();
    CachedAllocator cache(policy, scenario.context());

    double d_sum = 0.0, d_sq_sum = 0.0;
    double a_sum = 0.0, a_sq_sum = 0.0;
    std::uint64_t a_count = 0;
    bool feasible = true;

    for (int t = 0; t < scenario.trials; ++t) {
        const Trajectory traj =
            run_episode_cached(scenario, cache, trial_seed(base_seed, t));
        feasible = feasible && traj.feasible;
        const double d = discounted_aoi(traj, scenario.gamma);
        d_sum += d;
        d_sq_sum += d * d;
        for (const auto& state : traj.states) {
            int abs_a = 0;
            for (int a : state.a) abs_a += a;
            a_sum += abs_a;
            a_sq_sum += static_cast<double>(abs_a) * abs_a;
            ++a_count;
            if (scatter_counts != nullptr && state.a.size() == 2)
                ++(*scatter_counts)[{state.a[0], state.a[1]}];
        }
    }

    const double trials = scenario.trials;
    const double d_mean = d_sum / trials;
    const double a_mean = a_sum / static_cast<double>(a_count);

    SimMetrics metrics;
    metrics.delta_d_mean = d_mean - discounted_lower_bound(scenario);
    metrics.var_d = d_sq_sum / trials - d_mean * d_mean;  // population variance
    metrics.delta_mean_abs_a = a_mean - static_cast<double>(scenario.specs.size());
    metrics.var_abs_a = a_sq_sum / static_cast<double>(a_count) - a_mean * a_mean;
    metrics.feasible = feasible;
    return metrics;
}

}  // namespace aoifbl
