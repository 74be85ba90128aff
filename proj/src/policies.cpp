#include "aoifbl/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aoifbl {

const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Uniform: return "uniform";
        case PolicyKind::MinPer: return "min_per";
        case PolicyKind::OneStep: return "one_step";
        case PolicyKind::MdpLookup: return "mdp";
    }
    return "?";
}

Allocation uniform_allocation(int sensors, int n_max) {
    if (sensors < 1) throw std::invalid_argument("uniform_allocation: need >= 1 sensor");
    if (n_max < sensors) throw std::invalid_argument("uniform_allocation: budget below sensor count");
    return Allocation{std::vector<int>(sensors, n_max / sensors)};
}

FeasibilityReport feasibility_check(const Allocation& alloc,
                                    const std::vector<ChannelSpec>& specs,
                                    double eps_max) {
    if (alloc.n.size() != specs.size())
        throw std::invalid_argument("feasibility_check: dimension mismatch");
    FeasibilityReport report;
    report.sensor_ok.reserve(specs.size());
    for (std::size_t m = 0; m < specs.size(); ++m)
        report.sensor_ok.push_back(packet_error_rate(specs[m], alloc.n[m]) <= eps_max);
    return report;
}

namespace {

// Smallest n <= cap with eps(n) <= target, or cap + 1 if unreachable.
int blocklength_for_target(const ChannelSpec& spec, double target, int cap) {
    if (packet_error_rate(spec, cap) > target) return cap + 1;
    int lo = static_cast<int>(std::floor(spec.payload_bits / shannon_capacity(spec)));
    if (lo < 0) lo = 0;
    int hi = cap;
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (mid >= 1 && packet_error_rate(spec, mid) <= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

std::vector<int> min_blocklengths(const std::vector<ChannelSpec>& specs, double eps_max,
                                  int n_max) {
    std::vector<int> mins;
    mins.reserve(specs.size());
    for (const auto& s : specs) mins.push_back(min_blocklength(s, eps_max, 10 * n_max));
    return mins;
}

// Moves single units between sensors while the weighted error sum improves.
// Exact for two sensors given the unimodal objective; a capped coordinate
// descent for more.
void local_exchange(std::vector<int>& n, const std::vector<ChannelSpec>& specs,
                    const std::vector<int>& mins, const std::vector<double>& weights,
                    int n_max) {
    const std::size_t m_count = specs.size();
    const long cap = 10L * static_cast<long>(m_count) * n_max;
    for (long moves = 0; moves < cap; ++moves) {
        double best_gain = 0.0;
        std::size_t best_i = 0, best_j = 0;
        for (std::size_t j = 0; j < m_count; ++j) {
            if (n[j] - 1 < mins[j]) continue;
            const double give = weights[j] * (packet_error_rate(specs[j], n[j] - 1) -
                                              packet_error_rate(specs[j], n[j]));
            for (std::size_t i = 0; i < m_count; ++i) {
                if (i == j) continue;
                const double take = weights[i] * (packet_error_rate(specs[i], n[i]) -
                                                  packet_error_rate(specs[i], n[i] + 1));
                const double gain = take - give;
                if (gain > best_gain + 1e-18) {
                    best_gain = gain;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_gain <= 0.0) break;
        ++n[best_i];
        --n[best_j];
    }
}

Allocation weighted_min_allocation(const std::vector<ChannelSpec>& specs,
                                   const std::vector<double>& weights, int n_max,
                                   double eps_max) {
    const std::size_t m_count = specs.size();
    const auto mins = min_blocklengths(specs, eps_max, n_max);
    if (std::accumulate(mins.begin(), mins.end(), 0) > n_max)
        throw std::runtime_error("allocation infeasible: minimal blocklengths exceed the budget");

    if (m_count == 1) return Allocation{{n_max}};

    if (m_count == 2) {
        // Exact scan of every admissible split; ties keep the smaller n1.
        int best_n1 = mins[0];
        double best = std::numeric_limits<double>::infinity();
        for (int n1 = mins[0]; n1 <= n_max - mins[1]; ++n1) {
            const double obj = weights[0] * packet_error_rate(specs[0], n1) +
                               weights[1] * packet_error_rate(specs[1], n_max - n1);
            if (obj < best) {
                best = obj;
                best_n1 = n1;
            }
        }
        return Allocation{{best_n1, n_max - best_n1}};
    }

    // M > 2: bisection on a common weighted-error target xi, so that
    // eps_m(n_m) * w_m is (approximately) equal across sensors, then local
    // exchange from the rounded solution.
    double lo = 0.0, hi = eps_max * *std::max_element(weights.begin(), weights.end());
    std::vector<int> n(m_count);
    auto fill_for_target = [&](double xi) {
        int total = 0;
        for (std::size_t m = 0; m < m_count; ++m) {
            const double target = std::min(eps_max, weights[m] > 0.0 ? xi / weights[m] : eps_max);
            n[m] = std::max(mins[m], blocklength_for_target(specs[m], target, n_max));
            total += n[m];
        }
        return total;
    };
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (fill_for_target(mid) > n_max)
            lo = mid;  // too strict, blocklengths overflow the budget
        else
            hi = mid;
    }
    fill_for_target(hi);
    // Hand out any remaining budget where it helps most.
    while (std::accumulate(n.begin(), n.end(), 0) < n_max) {
        std::size_t best_i = 0;
        double best_gain = -1.0;
        for (std::size_t i = 0; i < m_count; ++i) {
            const double gain = weights[i] * (packet_error_rate(specs[i], n[i]) -
                                              packet_error_rate(specs[i], n[i] + 1));
            if (gain > best_gain) {
                best_gain = gain;
                best_i = i;
            }
        }
        ++n[best_i];
    }
    local_exchange(n, specs, mins, weights, n_max);
    return Allocation{n};
}

}  // namespace

Allocation min_per_allocation(const std::vector<ChannelSpec>& specs, int n_max,
                              double eps_max) {
    return weighted_min_allocation(specs, std::vector<double>(specs.size(), 1.0), n_max,
                                   eps_max);
}

Allocation one_step_allocation(const AoiState& state, const std::vector<ChannelSpec>& specs,
                               int n_max, double eps_max) {
    if (state.a.size() != specs.size())
        throw std::invalid_argument("one_step_allocation: dimension mismatch");
    std::vector<double> weights;
    weights.reserve(state.a.size());
    for (int age : state.a) {
        if (age < 1) throw std::invalid_argument("one_step_allocation: ages must be >= 1");
        weights.push_back(static_cast<double>(age));
    }
    return weighted_min_allocation(specs, weights, n_max, eps_max);
}

double relaxed_balance_residual(const Allocation& alloc, const AoiState& state,
                                const std::vector<ChannelSpec>& specs) {
    if (alloc.n.size() != specs.size() || state.a.size() != specs.size())
        throw std::invalid_argument("relaxed_balance_residual: dimension mismatch");
    double residual = 0.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const double xi = packet_error_rate(specs[i], alloc.n[i]) * state.a[i];
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            const double xj = packet_error_rate(specs[j], alloc.n[j]) * state.a[j];
            const double denom = std::max(xi, xj);
            if (denom > 0.0) residual = std::max(residual, std::abs(xi - xj) / denom);
        }
    }
    return residual;
}

Allocation allocate(const Policy& policy, const AoiState& state,
                    const AllocationContext& ctx) {
    const int sensors = static_cast<int>(ctx.specs.size());
    switch (policy.kind) {
        case PolicyKind::Uniform:
            return uniform_allocation(sensors, ctx.n_max);
        case PolicyKind::MinPer:
            return min_per_allocation(ctx.specs, ctx.n_max, ctx.eps_max);
        case PolicyKind::OneStep:
            return one_step_allocation(state, ctx.specs, ctx.n_max, ctx.eps_max);
        case PolicyKind::MdpLookup: {
            const QTable* q = policy.qtable;
            if (q == nullptr)
                throw std::invalid_argument("allocate: MdpLookup policy without a table");
            if (sensors != 2)
                throw std::invalid_argument("allocate: MdpLookup supports two sensors");
            if (q->values.size() !=
                static_cast<std::size_t>(q->a_max) * q->a_max * q->action_grid.size())
                throw std::invalid_argument("allocate: malformed Q-table");
            const int n1_min = min_blocklength(ctx.specs[0], ctx.eps_max, 10 * ctx.n_max);
            const int n2_min = min_blocklength(ctx.specs[1], ctx.eps_max, 10 * ctx.n_max);
            if (q->action_grid.front() != n1_min ||
                q->action_grid.back() != ctx.n_max - n2_min)
                throw std::invalid_argument("allocate: Q-table grid mismatches the scenario");
            const int a1 = std::min(state.a[0], q->a_max);
            const int a2 = std::min(state.a[1], q->a_max);
            const int s = q->state_index(a1, a2);
            int best = 0;
            for (int j = 1; j < static_cast<int>(q->action_grid.size()); ++j)
                if (q->at(s, j) > q->at(s, best)) best = j;
            const int n1 = q->action_grid[best];
            return Allocation{{n1, ctx.n_max - n1}};
        }
    }
    throw std::logic_error("allocate: unknown policy kind");
}

}  // namespace aoifbl
