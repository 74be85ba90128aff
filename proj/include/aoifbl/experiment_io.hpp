#pragma once

// Scenario configuration loading, Q-table persistence, and tabular/plot-data
// export. Scenario files are JSON; results go to CSV (RFC-4180 quoting) or
// JSON; Q-tables are a versioned JSON container with a model fingerprint
// header. All exports are byte-deterministic: fixed column order, floats at
// 10 significant digits.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aoifbl/aoi_sim.hpp"
#include "aoifbl/mdp_solver.hpp"

namespace aoifbl {

// Thrown on malformed or invalid configuration and data files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The four benchmark scenarios bundled with the tool (also shipped as
// data/scenarios.json).
std::vector<Scenario> default_scenarios();

std::vector<Scenario> load_scenarios(const std::string& path);
void save_scenarios(const std::vector<Scenario>& scenarios, const std::string& path);

const Scenario& find_scenario(const std::vector<Scenario>& scenarios,
                              const std::string& name);

void save_qtable(const QTable& q, const std::string& path);
QTable load_qtable(const std::string& path);
// Additionally rejects a table whose fingerprint differs from expected.
QTable load_qtable(const std::string& path, const std::string& expected_fingerprint);

struct ResultRecord {
    std::string scenario;
    std::string policy;
    int n1_at_a0 = 0;  // allocation chosen at the scenario's initial state
    SimMetrics metrics;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> metadata;  // tool version, conventions, ...
};

enum class ExportFormat { Csv, Json };

void export_results(const std::vector<ResultRecord>& records, ExportFormat format,
                    const std::string& path);

// (A1, A2, count, policy) rows over the full traces of one policy's episodes.
struct ScatterSeries {
    std::string policy;
    const std::vector<Trajectory>* trajectories = nullptr;
};
void export_state_scatter(const std::vector<ScatterSeries>& series,
                          const std::string& path);

// Same rows from pre-aggregated occupancy counts (as produced by monte_carlo).
struct ScatterCounts {
    std::string policy;
    StateCounts counts;
};
void export_state_scatter(const std::vector<ScatterCounts>& series,
                          const std::string& path);

// (A1, A2, n1_lt, n1_os) rows over the a_max x a_max state grid; n1_os may be
// empty for a single-surface export.
void export_policy_surface(int a_max, const std::vector<int>& n1_lt,
                           const std::vector<int>& n1_os, const std::string& path);

}  // namespace aoifbl
