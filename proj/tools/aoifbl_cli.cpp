// Command-line laboratory for AoI-aware TDMA blocklength allocation:
// trains the MDP policy, simulates policies over Monte-Carlo trials, compares
// them on common random numbers, and reproduces the published benchmark
// tables.
//
// Exit codes: 0 success, 2 usage error, 3 solver non-convergence,
// 4 reproduction tolerance breach, 1 other failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aoifbl/experiment_io.hpp"
#include "aoifbl/reference_tables.hpp"

namespace fs = std::filesystem;
using namespace aoifbl;

namespace {

constexpr const char* kToolVersion = "aoifbl 1.0.0";

std::vector<Scenario> resolve_scenarios(const std::string& config_path) {
    if (!config_path.empty()) return load_scenarios(config_path);
    if (const char* env = std::getenv("AOI_FBL_CONFIG"); env != nullptr && *env != '\0')
        return load_scenarios(env);
    return default_scenarios();
}

struct TrainOptions {
    double gamma = -1.0;  // < 0: take the scenario's value
    int a_max = -1;
    int l_max = 100;
    double eps_min = 1e-5;
};

MdpSpec mdp_spec_for(const Scenario& s, const TrainOptions& opt = {}) {
    return make_mdp_spec({s.specs.at(0), s.specs.at(1)}, s.n_max, s.eps_max,
                         opt.a_max > 0 ? opt.a_max : s.a_max,
                         opt.gamma > 0 ? opt.gamma : s.gamma, opt.l_max, opt.eps_min);
}

PolicyKind parse_policy(const std::string& name) {
    if (name == "uniform") return PolicyKind::Uniform;
    if (name == "minper") return PolicyKind::MinPer;
    if (name == "onestep") return PolicyKind::OneStep;
    if (name == "mdp") return PolicyKind::MdpLookup;
    throw CLI::ValidationError("--policy", "expected uniform|minper|onestep|mdp");
}

int n1_at_state(const Policy& policy, const Scenario& s, const AoiState& state) {
    return allocate(policy, state, s.context()).n.at(0);
}

std::map<std::string, std::string> run_metadata(std::uint64_t seed) {
    return {
        {"tool_version", kToolVersion},
        {"seed", std::to_string(seed)},
        {"conventions", "C=log2(1+snr) bits/use; V=1-(1+snr)^-2; eps=Q(sqrt(n/V)(C-d/n)ln2)"},
        {"var_denominator", "population (n trials / n samples)"},
        {"common_random_numbers", "per-trial seeds derived from the base seed only"},
    };
}

struct PolicyRun {
    std::string name;  // CLI-facing name
    Policy policy;
    ResultRecord record;
    StateCounts scatter;
};

// Runs mdp, onestep, minper and uniform on common per-trial random numbers.
std::vector<PolicyRun> run_all_policies(const Scenario& scenario, const QTable& qtable,
                                        std::uint64_t seed, bool want_scatter) {
    std::vector<PolicyRun> runs;
    runs.push_back({"mdp", {PolicyKind::MdpLookup, &qtable}, {}, {}});
    runs.push_back({"onestep", {PolicyKind::OneStep, nullptr}, {}, {}});
    runs.push_back({"minper", {PolicyKind::MinPer, nullptr}, {}, {}});
    runs.push_back({"uniform", {PolicyKind::Uniform, nullptr}, {}, {}});
    for (auto& run : runs) {
        run.record.scenario = scenario.name;
        run.record.policy = run.name;
        run.record.n1_at_a0 = n1_at_state(run.policy, scenario, AoiState{scenario.a0});
        run.record.metrics = monte_carlo(scenario, run.policy, seed,
                                         want_scatter ? &run.scatter : nullptr);
        run.record.seed = seed;
        run.record.metadata = run_metadata(seed);
    }
    return runs;
}

std::vector<int> one_step_surface(const Scenario& s) {
    std::vector<int> surface;
    surface.reserve(static_cast<std::size_t>(s.a_max) * s.a_max);
    for (int a1 = 1; a1 <= s.a_max; ++a1)
        for (int a2 = 1; a2 <= s.a_max; ++a2)
            surface.push_back(
                one_step_allocation(AoiState{{a1, a2}}, s.specs, s.n_max, s.eps_max).n[0]);
    return surface;
}

void print_metrics(const ResultRecord& r) {
    std::printf("%s %s: delta_D_mean=%.10g var_D=%.10g delta_mean_abs_A=%.10g "
                "var_abs_A=%.10g feasible=%s\n",
                r.scenario.c_str(), r.policy.c_str(), r.metrics.delta_d_mean,
                r.metrics.var_d, r.metrics.delta_mean_abs_a, r.metrics.var_abs_a,
                r.metrics.feasible ? "true" : "false");
}

// ---- reproduce ----

struct ReportRow {
    std::string table, scenario, policy, metric;
    double reference = reference::kNA;
    double reproduced = 0.0;
    bool within = false;
    std::string note;
};

double rel_dev(double reproduced, double ref) {
    return (reproduced - ref) / std::abs(ref);
}

void write_report(const std::vector<ReportRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write to " + path);
    out << "table,scenario,policy,metric,reference,reproduced,rel_deviation,within_tolerance,note\n";
    char buf[64];
    for (const auto& r : rows) {
        const bool na = std::isnan(r.reference);
        out << r.table << ',' << r.scenario << ',' << r.policy << ',' << r.metric << ',';
        if (na)
            out << "NA";
        else {
            std::snprintf(buf, sizeof(buf), "%.10g", r.reference);
            out << buf;
        }
        out << ',';
        std::snprintf(buf, sizeof(buf), "%.10g", r.reproduced);
        out << buf << ',';
        if (na)
            out << "NA";
        else {
            std::snprintf(buf, sizeof(buf), "%.4g", rel_dev(r.reproduced, r.reference));
            out << buf;
        }
        out << ',' << (r.within ? "true" : "false") << ',' << r.note << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AoI-aware finite-blocklength TDMA allocation laboratory"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path,
                   "Scenario configuration file (default: $AOI_FBL_CONFIG or built-in table)");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the MDP policy for a scenario");
    std::string scenario_name, out_path, qtable_path;
    TrainOptions topt;
    train_cmd->add_option("--scenario", scenario_name, "Scenario name")->required();
    train_cmd->add_option("--out", out_path, "Output Q-table path")->required();
    train_cmd->add_option("--gamma", topt.gamma, "Discount factor (default: scenario value 0.9)");
    train_cmd->add_option("--a-max", topt.a_max, "Age truncation (default: scenario value 8)");
    train_cmd->add_option("--l-max", topt.l_max, "Sweep cap")->capture_default_str();
    train_cmd->add_option("--eps-min", topt.eps_min, "Convergence threshold")->capture_default_str();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo simulate one policy");
    std::string policy_name_arg = "minper", format_name = "csv";
    std::uint64_t seed = 1;
    int trials_override = -1, periods_override = -1;
    sim_cmd->add_option("--scenario", scenario_name, "Scenario name")->required();
    sim_cmd->add_option("--policy", policy_name_arg, "uniform|minper|onestep|mdp")->capture_default_str();
    sim_cmd->add_option("--qtable", qtable_path, "Trained Q-table (required for mdp)");
    sim_cmd->add_option("--seed", seed, "Base random seed")->capture_default_str();
    sim_cmd->add_option("--trials", trials_override, "Trial count (default: scenario value 500)");
    sim_cmd->add_option("--periods", periods_override, "Periods per trial (default: scenario value 500)");
    sim_cmd->add_option("--out", out_path, "Result file")->required();
    sim_cmd->add_option("--format", format_name, "csv|json")->capture_default_str();

    // compare
    auto* cmp_cmd = app.add_subcommand(
        "compare", "Run all four policies on common random numbers");
    cmp_cmd->add_option("--scenario", scenario_name, "Scenario name")->required();
    cmp_cmd->add_option("--seed", seed, "Base random seed")->capture_default_str();
    cmp_cmd->add_option("--qtable", qtable_path, "Reuse a trained Q-table instead of training");
    cmp_cmd->add_option("--out", out_path, "Output directory")->required();

    // reproduce
    auto* rep_cmd = app.add_subcommand("reproduce", "Reproduce the published benchmark tables");
    std::vector<int> tables = {2, 3, 4};
    rep_cmd->add_option("--tables", tables, "Tables to reproduce (subset of 2 3 4)")->capture_default_str();
    rep_cmd->add_option("--seed", seed, "Base random seed")->capture_default_str();
    rep_cmd->add_option("--out", out_path, "Output directory")->required();

    // export-policy
    auto* exp_cmd = app.add_subcommand("export-policy", "Dump a Q-table's policy surface");
    exp_cmd->add_option("--qtable", qtable_path, "Trained Q-table")->required();
    exp_cmd->add_option("--out", out_path, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*train_cmd) {
            const auto scenarios = resolve_scenarios(config_path);
            const Scenario* s;
            try {
                s = &find_scenario(scenarios, scenario_name);
            } catch (const IoError& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 2;
            }
            const QTable q = train(mdp_spec_for(*s, topt));
            save_qtable(q, out_path);
            std::printf("scenario=%s sweeps_used=%d converged=%s actions=%zu\n",
                        s->name.c_str(), q.sweeps_used, q.converged ? "true" : "false",
                        q.action_grid.size());
            if (!q.converged) {
                std::cerr << "warning: value iteration did not converge within l_max sweeps\n";
                return 3;
            }
            return 0;
        }

        if (*sim_cmd) {
            const auto scenarios = resolve_scenarios(config_path);
            Scenario s;
            try {
                s = find_scenario(scenarios, scenario_name);
            } catch (const IoError& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 2;
            }
            if (trials_override > 0) s.trials = trials_override;
            if (periods_override > 0) s.periods = periods_override;

            const PolicyKind kind = parse_policy(policy_name_arg);
            QTable q;
            Policy policy{kind, nullptr};
            if (kind == PolicyKind::MdpLookup) {
                if (qtable_path.empty()) {
                    std::cerr << "error: --policy mdp requires --qtable\n";
                    return 2;
                }
                q = load_qtable(qtable_path, mdp_fingerprint(mdp_spec_for(s)));
                policy.qtable = &q;
            }

            ResultRecord r;
            r.scenario = s.name;
            r.policy = policy_name_arg;
            r.n1_at_a0 = n1_at_state(policy, s, AoiState{s.a0});
            r.metrics = monte_carlo(s, policy, seed);
            r.seed = seed;
            r.metadata = run_metadata(seed);
            export_results({r}, format_name == "json" ? ExportFormat::Json : ExportFormat::Csv,
                           out_path);
            print_metrics(r);
            if (!r.metrics.feasible)
                std::cerr << "warning: policy violates eps_max for at least one sensor; "
                             "metrics reported with feasible=false\n";
            return 0;
        }

        if (*cmp_cmd) {
            const auto scenarios = resolve_scenarios(config_path);
            Scenario s;
            try {
                s = find_scenario(scenarios, scenario_name);
            } catch (const IoError& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 2;
            }
            // The published sweep cap (100) stops just short of the 1e-5 value
            // tolerance; the comparison pipeline trains to full convergence.
            TrainOptions copt;
            copt.l_max = 500;
            const MdpSpec mspec = mdp_spec_for(s, copt);
            QTable q;
            if (!qtable_path.empty())
                q = load_qtable(qtable_path, mdp_fingerprint(mspec));
            else
                q = train(mspec);
            if (!q.converged) {
                std::cerr << "warning: MDP policy not converged\n";
            }
            fs::create_directories(out_path);
            auto runs = run_all_policies(s, q, seed, /*want_scatter=*/true);
            std::vector<ResultRecord> records;
            std::vector<ScatterCounts> scatter;
            for (auto& run : runs) {
                print_metrics(run.record);
                records.push_back(run.record);
                scatter.push_back({run.name, std::move(run.scatter)});
            }
            export_results(records, ExportFormat::Csv, (fs::path(out_path) / "results.csv").string());
            export_state_scatter(scatter, (fs::path(out_path) / "scatter.csv").string());
            export_policy_surface(s.a_max, extract_policy(q), one_step_surface(s),
                                  (fs::path(out_path) / "policy_surface.csv").string());
            return 0;
        }

        if (*rep_cmd) {
            const auto scenarios = resolve_scenarios(config_path);
            for (int t : tables)
                if (t < 2 || t > 4) {
                    std::cerr << "error: --tables entries must be 2, 3 or 4\n";
                    return 2;
                }
            const bool want2 = std::count(tables.begin(), tables.end(), 2) > 0;
            const bool want3 = std::count(tables.begin(), tables.end(), 3) > 0;
            const bool want4 = std::count(tables.begin(), tables.end(), 4) > 0;
            fs::create_directories(out_path);

            std::vector<ReportRow> rows;
            std::vector<ResultRecord> records;

            if (want2) {
                for (int i = 0; i < 4; ++i) {
                    const Scenario& s =
                        find_scenario(scenarios, "scenario" + std::to_string(i + 1));
                    const int n1 = min_per_allocation(s.specs, s.n_max, s.eps_max).n[0];
                    const int ref = reference::kMinPerN1[i];
                    ReportRow row{"table2", s.name, "minper", "n1", static_cast<double>(ref),
                                  static_cast<double>(n1), false, ""};
                    if (std::abs(n1 - ref) <= 1) {
                        row.within = true;
                        row.note = "exact";
                    } else if (std::abs(rel_dev(n1, ref)) <= 0.02) {
                        row.within = true;
                        row.note = "fallback +-2% (convention mismatch documented)";
                    } else {
                        row.note = "outside fallback +-2%";
                    }
                    rows.push_back(row);
                }
            }

            if (want3 || want4) {
                for (int i = 0; i < 4; ++i) {
                    const Scenario& s =
                        find_scenario(scenarios, "scenario" + std::to_string(i + 1));
                    TrainOptions ropt;
                    ropt.l_max = 500;
                    const QTable q = train(mdp_spec_for(s, ropt));
                    auto runs = run_all_policies(s, q, seed, /*want_scatter=*/false);
                    std::map<std::string, const ResultRecord*> by_policy;
                    for (auto& run : runs) {
                        records.push_back(run.record);
                        by_policy[run.name] = &records.back();
                    }
                    auto add_cells = [&](const char* table,
                                         const std::vector<reference::Cell>& cells,
                                         bool discounted) {
                        for (const auto& cell : cells) {
                            if (s.name != cell.scenario) continue;
                            const ResultRecord& r = *by_policy.at(cell.policy);
                            const double mean = discounted ? r.metrics.delta_d_mean
                                                           : r.metrics.delta_mean_abs_a;
                            const double var =
                                discounted ? r.metrics.var_d : r.metrics.var_abs_a;
                            ReportRow mrow{table, s.name, cell.policy,
                                           discounted ? "delta_D_mean" : "delta_mean_abs_A",
                                           cell.mean, mean, false, ""};
                            if (std::isnan(cell.mean)) {
                                mrow.within = !r.metrics.feasible;
                                mrow.note = r.metrics.feasible
                                                ? "reference N/A but policy not flagged infeasible"
                                                : "reference N/A, policy flagged infeasible";
                            } else {
                                mrow.within = std::abs(rel_dev(mean, cell.mean)) <= 0.10;
                                mrow.note = "tolerance +-10%";
                            }
                            rows.push_back(mrow);
                            ReportRow vrow{table, s.name, cell.policy,
                                           discounted ? "var_D" : "var_abs_A", cell.variance,
                                           var, false, ""};
                            if (std::isnan(cell.variance)) {
                                vrow.within = !r.metrics.feasible;
                                vrow.note = "reference N/A";
                            } else {
                                const double ratio = var / cell.variance;
                                vrow.within = ratio >= 1.0 / 3.0 && ratio <= 3.0;
                                vrow.note = "tolerance factor 3";
                            }
                            rows.push_back(vrow);
                        }
                    };
                    if (want3) add_cells("table3", reference::kDiscounted, true);
                    if (want4) add_cells("table4", reference::kUndiscounted, false);
                }
                export_results(records, ExportFormat::Csv,
                               (fs::path(out_path) / "results.csv").string());
            }

            write_report(rows, (fs::path(out_path) / "report.csv").string());
            int breaches = 0;
            for (const auto& row : rows) {
                std::printf("[%s] %s %s %s %s: reproduced=%.6g", row.within ? "ok" : "DEV",
                            row.table.c_str(), row.scenario.c_str(), row.policy.c_str(),
                            row.metric.c_str(), row.reproduced);
                if (!std::isnan(row.reference))
                    std::printf(" reference=%.6g rel=%+.3g", row.reference,
                                rel_dev(row.reproduced, row.reference));
                std::printf(" (%s)\n", row.note.c_str());
                if (!row.within) ++breaches;
            }
            std::printf("reproduce: %zu cells checked, %d outside tolerance\n", rows.size(),
                        breaches);
            return breaches == 0 ? 0 : 4;
        }

        if (*exp_cmd) {
            const QTable q = load_qtable(qtable_path);
            export_policy_surface(q.a_max, extract_policy(q), {}, out_path);
            return 0;
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
