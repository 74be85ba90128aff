#pragma once

// Truncated finite-state MDP over two-sensor AoI states with blocklength
// actions, solved by synchronous value iteration on a Q-matrix, plus
// stationary policy extraction.
//
// States are age pairs [a1, a2] with a in [1, a_max]; the action is the
// blocklength n1 granted to sensor 1 (sensor 2 gets n_max - n1). A failed
// delivery ages a sensor by one period, clipped at a_max to keep the chain
// closed; a success resets its age to 1.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "aoifbl/fbl_math.hpp"

namespace aoifbl {

struct MdpSpec {
    int a_max = 8;               // age truncation bound, >= 2
    double gamma = 0.9;          // discount factor in (0, 1)
    std::vector<int> action_grid;  // admissible n1 values, ascending
    std::array<ChannelSpec, 2> specs;
    int n_max = 500;             // total blocklength budget per period
    int l_max = 100;             // value-iteration sweep cap
    double eps_min = 1e-5;       // sup-norm convergence threshold on state values

    void validate() const;

    int state_count() const { return a_max * a_max; }
    // Theta: bijection between flat state index and age pair.
    int state_index(int a1, int a2) const { return (a1 - 1) * a_max + (a2 - 1); }
    std::array<int, 2> state_ages(int index) const {
        return {index / a_max + 1, index % a_max + 1};
    }
};

// Builds an MdpSpec whose action grid is [n1_min, n_max - n2_min] from the
// sensors' minimal blocklengths at eps_max.
MdpSpec make_mdp_spec(const std::array<ChannelSpec, 2>& specs, int n_max, double eps_max,
                      int a_max = 8, double gamma = 0.9, int l_max = 100,
                      double eps_min = 1e-5);

// The four successor branches of one period: each sensor independently
// succeeds (age -> 1) with probability 1 - eps or fails (age + 1, clipped).
struct TransitionDistribution {
    struct Branch {
        std::array<int, 2> next;  // successor ages
        double prob;
    };
    std::array<Branch, 4> branches;
};

TransitionDistribution transition_probs(const std::array<int, 2>& ages, int n1,
                                        const MdpSpec& spec);

// Negative expected next-state age sum; always in [-2 a_max, -2].
double expected_reward(const std::array<int, 2>& ages, int n1, const MdpSpec& spec);

struct QTable {
    int a_max = 0;
    std::vector<int> action_grid;
    std::vector<double> values;  // row-major, state_count x action count
    bool converged = false;
    int sweeps_used = 0;
    std::string fingerprint;  // model parameters, checked on load

    double at(int state, int action) const {
        return values[static_cast<std::size_t>(state) * action_grid.size() + action];
    }
    int state_index(int a1, int a2) const { return (a1 - 1) * a_max + (a2 - 1); }
};

// Parameter fingerprint embedded in saved tables; load_qtable rejects a table
// whose fingerprint does not match the requesting scenario.
std::string mdp_fingerprint(const MdpSpec& spec);

// Synchronous value iteration:
//   Q(s,a) <- r(s,a) + gamma * sum_s' P(s'|s,a) max_a' Q_prev(s',a')
// Sweeps read the previous sweep's frozen table. Converged when the sup-norm
// change of per-state values max_a Q(s,a) is <= eps_min; non-convergence
// within l_max sweeps is reported via the flag, not an error.
QTable train(const MdpSpec& spec);

// Per-state argmax action (n1 value), ties broken toward the smallest n1.
std::vector<int> extract_policy(const QTable& q);

}  // namespace aoifbl
