#pragma once

// Published reference results for the four benchmark scenarios, used by the
// `reproduce` command and the acceptance suite to report side-by-side
// deviations. NaN marks cells published as N/A (policy infeasible there).

#include <array>
#include <limits>
#include <string>
#include <vector>

namespace aoifbl::reference {

constexpr double kNA = std::numeric_limits<double>::quiet_NaN();

// Min-PER blocklength n1 for scenarios 1..4.
inline constexpr std::array<int, 4> kMinPerN1 = {402, 442, 411, 250};

struct Cell {
    const char* scenario;
    const char* policy;   // mdp | onestep | minper | uniform
    double mean;          // delta_D_mean or delta_mean_abs_A
    double variance;      // var_D or var_abs_A
};

// Long-term discounted AoI: delta_D_mean and var_D per (scenario, policy).
inline const std::vector<Cell> kDiscounted = {
    {"scenario1", "mdp", 1.1808, 3.6537e-3},
    {"scenario1", "onestep", 1.2383, 3.5642e-3},
    {"scenario1", "minper", 1.2397, 3.0787e-3},
    {"scenario1", "uniform", kNA, kNA},
    {"scenario2", "mdp", 0.64029, 8.4297e-4},
    {"scenario2", "onestep", 0.68276, 9.5663e-4},
    {"scenario2", "minper", 0.68036, 5.9690e-4},
    {"scenario2", "uniform", kNA, kNA},
    {"scenario3", "mdp", 5.9570e-3, 2.7321e-10},
    {"scenario3", "onestep", 6.3155e-3, 1.1603e-9},
    {"scenario3", "minper", 6.3148e-3, 3.9019e-10},
    {"scenario3", "uniform", 0.27194, 8.0836e-5},
    {"scenario4", "mdp", 0.0117, 6.0254e-10},
    {"scenario4", "onestep", 0.0117, 1.9271e-9},
    {"scenario4", "minper", 0.0117, 2.5542e-9},
    {"scenario4", "uniform", 0.0117, 1.5954e-9},
};

// Undiscounted AoI: delta_mean_abs_A and var_abs_A per (scenario, policy).
inline const std::vector<Cell> kUndiscounted = {
    {"scenario1", "mdp", 0.11751, 1.2484e-1},
    {"scenario1", "onestep", 0.12476, 1.3137e-1},
    {"scenario1", "minper", 0.12436, 1.3338e-1},
    {"scenario1", "uniform", kNA, kNA},
    {"scenario2", "mdp", 6.4327e-2, 6.7281e-2},
    {"scenario2", "onestep", 6.8890e-2, 7.1667e-2},
    {"scenario2", "minper", 6.8287e-2, 7.1265e-2},
    {"scenario2", "uniform", kNA, kNA},
    {"scenario3", "mdp", 5.1497e-4, 5.1464e-4},
    {"scenario3", "onestep", 6.3155e-4, 6.8602e-4},
    {"scenario3", "minper", 6.3148e-4, 5.9435e-4},
    {"scenario3", "uniform", 2.7481e-2, 2.8254e-2},
    {"scenario4", "mdp", 1.1856e-3, 1.1843e-3},
    {"scenario4", "onestep", 1.3174e-3, 1.1316e-3},
    {"scenario4", "minper", 1.1058e-3, 1.1047e-3},
    {"scenario4", "uniform", 1.1816e-3, 1.1880e-3},
};

}  // namespace aoifbl::reference
