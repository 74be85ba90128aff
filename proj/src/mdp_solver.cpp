#include "aoifbl/mdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace aoifbl {

void MdpSpec::validate() const {
    if (a_max < 2) throw std::invalid_argument("MdpSpec: a_max must be >= 2");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("MdpSpec: gamma must be in (0, 1)");
    if (action_grid.empty()) throw std::invalid_argument("MdpSpec: empty action grid");
    if (l_max < 1) throw std::invalid_argument("MdpSpec: l_max must be >= 1");
    if (!(eps_min > 0.0)) throw std::invalid_argument("MdpSpec: eps_min must be > 0");
    for (const auto& s : specs) s.validate();
    for (int n1 : action_grid)
        if (n1 < 1 || n1 >= n_max)
            throw std::invalid_argument("MdpSpec: action outside (0, n_max)");
}

MdpSpec make_mdp_spec(const std::array<ChannelSpec, 2>& specs, int n_max, double eps_max,
                      int a_max, double gamma, int l_max, double eps_min) {
    const int n1_min = min_blocklength(specs[0], eps_max, 10 * n_max);
    const int n2_min = min_blocklength(specs[1], eps_max, 10 * n_max);
    if (n1_min + n2_min > n_max)
        throw std::runtime_error("make_mdp_spec: minimal blocklengths exceed the budget");
    MdpSpec spec;
    spec.a_max = a_max;
    spec.gamma = gamma;
    spec.specs = specs;
    spec.n_max = n_max;
    spec.l_max = l_max;
    spec.eps_min = eps_min;
    spec.action_grid.resize(n_max - n2_min - n1_min + 1);
    for (std::size_t j = 0; j < spec.action_grid.size(); ++j)
        spec.action_grid[j] = n1_min + static_cast<int>(j);
    spec.validate();
    return spec;
}

namespace {

bool in_grid(const std::vector<int>& grid, int n1) {
    return std::binary_search(grid.begin(), grid.end(), n1);
}

}  // namespace

TransitionDistribution transition_probs(const std::array<int, 2>& ages, int n1,
                                        const MdpSpec& spec) {
    if (ages[0] < 1 || ages[0] > spec.a_max || ages[1] < 1 || ages[1] > spec.a_max)
        throw std::invalid_argument("transition_probs: age outside [1, a_max]");
    if (!in_grid(spec.action_grid, n1))
        throw std::invalid_argument("transition_probs: action not in grid");

    const double e1 = packet_error_rate(spec.specs[0], n1);
    const double e2 = packet_error_rate(spec.specs[1], spec.n_max - n1);
    const int up1 = std::min(ages[0] + 1, spec.a_max);
    const int up2 = std::min(ages[1] + 1, spec.a_max);
    return TransitionDistribution{{{
        {{up1, up2}, e1 * e2},
        {{up1, 1}, e1 * (1.0 - e2)},
        {{1, up2}, (1.0 - e1) * e2},
        {{1, 1}, (1.0 - e1) * (1.0 - e2)},
    }}};
}

double expected_reward(const std::array<int, 2>& ages, int n1, const MdpSpec& spec) {
    const auto dist = transition_probs(ages, n1, spec);
    double r = 0.0;
    for (const auto& b : dist.branches) r -= b.prob * (b.next[0] + b.next[1]);
    return r;
}

std::string mdp_fingerprint(const MdpSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    os << "aoifbl-mdp-v1;snr=" << spec.specs[0].snr_linear << ','
       << spec.specs[1].snr_linear << ";d=" << spec.specs[0].payload_bits << ','
       << spec.specs[1].payload_bits << ";n_max=" << spec.n_max
       << ";a_max=" << spec.a_max << ";gamma=" << spec.gamma
       << ";grid=" << spec.action_grid.front() << ".." << spec.action_grid.back();
    return os.str();
}

QTable train(const MdpSpec& spec) {
    spec.validate();
    const int n_states = spec.state_count();
    const int n_actions = static_cast<int>(spec.action_grid.size());

    // Transition structure per (state, action): four successor indices and
    // probabilities, plus the immediate reward. Precomputed once; the error
    // rates depend on the action only.
    struct Backup {
        std::array<int, 4> next;
        std::array<double, 4> prob;
        double reward;
    };
    std::vector<Backup> model(static_cast<std::size_t>(n_states) * n_actions);
    for (int i = 0; i < n_states; ++i) {
        const auto ages = spec.state_ages(i);
        for (int j = 0; j < n_actions; ++j) {
            const auto dist = transition_probs(ages, spec.action_grid[j], spec);
            Backup& b = model[static_cast<std::size_t>(i) * n_actions + j];
            b.reward = 0.0;
            for (int k = 0; k < 4; ++k) {
                const auto& br = dist.branches[k];
                b.next[k] = spec.state_index(br.next[0], br.next[1]);
                b.prob[k] = br.prob;
                b.reward -= br.prob * (br.next[0] + br.next[1]);
            }
        }
    }

    QTable q;
    q.a_max = spec.a_max;
    q.action_grid = spec.action_grid;
    q.fingerprint = mdp_fingerprint(spec);
    q.values.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);

    std::vector<double> state_value(n_states, 0.0);       // max_a Q(s, a)
    std::vector<double> prev_value(n_states, 0.0);
    std::vector<double> next_values(q.values.size(), 0.0);

    for (int sweep = 1; sweep <= spec.l_max; ++sweep) {
        prev_value = state_value;
        for (int i = 0; i < n_states; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < n_actions; ++j) {
                const Backup& b = model[static_cast<std::size_t>(i) * n_actions + j];
                double v = b.reward;
                for (int k = 0; k < 4; ++k) v += spec.gamma * b.prob[k] * prev_value[b.next[k]];
                next_values[static_cast<std::size_t>(i) * n_actions + j] = v;
                best = std::max(best, v);
            }
            state_value[i] = best;
        }
        q.values.swap(next_values);
        q.sweeps_used = sweep;
        double delta = 0.0;
        for (int i = 0; i < n_states; ++i)
            delta = std::max(delta, std::abs(state_value[i] - prev_value[i]));
        if (delta <= spec.eps_min) {
            q.converged = true;
            break;
        }
    }
    return q;
}

std::vector<int> extract_policy(const QTable& q) {
    const int n_states = q.a_max * q.a_max;
    const int n_actions = static_cast<int>(q.action_grid.size());
    std::vector<int> policy(n_states);
    for (int i = 0; i < n_states; ++i) {
        int best = 0;
        for (int j = 1; j < n_actions; ++j)
            if (q.at(i, j) > q.at(i, best)) best = j;  // ties keep the smaller n1
        policy[i] = q.action_grid[best];
    }
    return policy;
}

}  // namespace aoifbl
