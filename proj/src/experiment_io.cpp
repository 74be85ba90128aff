#include "aoifbl/experiment_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"

namespace aoifbl {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write to " + path);
    return out;
}

json parse_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot open ") + what + " file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("corrupt ") + what + " file " + path + ": " + e.what());
    }
}

template <typename T>
T require(const json& obj, const std::string& scenario, const char* field) {
    if (!obj.contains(field))
        throw IoError("scenario '" + scenario + "': missing field '" + field + "'");
    try {
        return obj.at(field).get<T>();
    } catch (const json::exception&) {
        throw IoError("scenario '" + scenario + "': field '" + field + "' has the wrong type");
    }
}

Scenario scenario_from_json(const json& entry) {
    const std::string name = require<std::string>(entry, "?", "name");
    Scenario s;
    s.name = name;
    s.snr_db = require<std::vector<double>>(entry, name, "snr_db");
    if (s.snr_db.empty()) throw IoError("scenario '" + name + "': snr_db is empty");
    const int d = require<int>(entry, name, "payload_bits");
    s.n_max = require<int>(entry, name, "n_max");
    s.eps_max = require<double>(entry, name, "eps_max");
    s.periods = require<int>(entry, name, "periods");
    s.trials = require<int>(entry, name, "trials");
    s.gamma = require<double>(entry, name, "gamma");
    s.a_max = require<int>(entry, name, "a_max");
    s.a0 = require<std::vector<int>>(entry, name, "a0");
    s.specs.reserve(s.snr_db.size());
    for (double db : s.snr_db)
        s.specs.push_back(ChannelSpec{std::pow(10.0, db / 10.0), d});
    try {
        s.validate();
    } catch (const std::exception& e) {
        throw IoError("scenario '" + name + "': " + e.what());
    }
    return s;
}

json scenario_to_json(const Scenario& s) {
    return json{{"name", s.name},
                {"snr_db", s.snr_db},
                {"payload_bits", s.specs.at(0).payload_bits},
                {"n_max", s.n_max},
                {"eps_max", s.eps_max},
                {"periods", s.periods},
                {"trials", s.trials},
                {"gamma", s.gamma},
                {"a_max", s.a_max},
                {"a0", s.a0}};
}

constexpr const char* kQTableFormat = "aoifbl-qtable";
constexpr int kQTableVersion = 1;

}  // namespace

std::vector<Scenario> default_scenarios() {
    // Four two-sensor benchmark scenarios over a 500-use budget.
    const std::vector<std::pair<std::string, std::vector<double>>> table = {
        {"scenario1", {-13.0, -6.0}},
        {"scenario2", {-13.0, -3.0}},
        {"scenario3", {-10.0, -3.0}},
        {"scenario4", {-8.0, -8.0}},
    };
    std::vector<Scenario> scenarios;
    for (const auto& [name, db] : table) {
        Scenario s;
        s.name = name;
        s.snr_db = db;
        for (double x : db) s.specs.push_back(ChannelSpec{std::pow(10.0, x / 10.0), 16});
        scenarios.push_back(std::move(s));
    }
    return scenarios;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
    const json doc = parse_file(path, "scenario");
    if (!doc.contains("scenarios") || !doc["scenarios"].is_array())
        throw IoError("scenario file " + path + ": expected top-level 'scenarios' array");
    std::vector<Scenario> scenarios;
    for (const auto& entry : doc["scenarios"]) scenarios.push_back(scenario_from_json(entry));
    if (scenarios.empty()) throw IoError("scenario file " + path + ": no scenarios");
    return scenarios;
}

void save_scenarios(const std::vector<Scenario>& scenarios, const std::string& path) {
    json doc;
    doc["scenarios"] = json::array();
    for (const auto& s : scenarios) doc["scenarios"].push_back(scenario_to_json(s));
    open_out(path) << doc.dump(2) << '\n';
}

const Scenario& find_scenario(const std::vector<Scenario>& scenarios,
                              const std::string& name) {
    for (const auto& s : scenarios)
        if (s.name == name) return s;
    throw IoError("unknown scenario '" + name + "'");
}

void save_qtable(const QTable& q, const std::string& path) {
    json doc{{"format", kQTableFormat},
             {"version", kQTableVersion},
             {"fingerprint", q.fingerprint},
             {"a_max", q.a_max},
             {"action_grid", q.action_grid},
             {"converged", q.converged},
             {"sweeps_used", q.sweeps_used},
             {"values", q.values}};
    open_out(path) << doc.dump() << '\n';
}

QTable load_qtable(const std::string& path) {
    const json doc = parse_file(path, "Q-table");
    try {
        if (doc.at("format").get<std::string>() != kQTableFormat ||
            doc.at("version").get<int>() != kQTableVersion)
            throw IoError("Q-table file " + path + ": unsupported format or version");
        QTable q;
        q.fingerprint = doc.at("fingerprint").get<std::string>();
        q.a_max = doc.at("a_max").get<int>();
        q.action_grid = doc.at("action_grid").get<std::vector<int>>();
        q.converged = doc.at("converged").get<bool>();
        q.sweeps_used = doc.at("sweeps_used").get<int>();
        q.values = doc.at("values").get<std::vector<double>>();
        if (q.a_max < 2 || q.action_grid.empty() ||
            q.values.size() !=
                static_cast<std::size_t>(q.a_max) * q.a_max * q.action_grid.size())
            throw IoError("Q-table file " + path + ": inconsistent dimensions");
        return q;
    } catch (const json::exception& e) {
        throw IoError("corrupt Q-table file " + path + ": " + e.what());
    }
}

QTable load_qtable(const std::string& path, const std::string& expected_fingerprint) {
    QTable q = load_qtable(path);
    if (q.fingerprint != expected_fingerprint)
        throw IoError("Q-table file " + path + " was trained for different parameters (" +
                      q.fingerprint + " vs " + expected_fingerprint + ")");
    return q;
}

void export_results(const std::vector<ResultRecord>& records, ExportFormat format,
                    const std::string& path) {
    if (records.empty()) throw std::invalid_argument("export_results: no records");
    std::ofstream out = open_out(path);
    if (format == ExportFormat::Csv) {
        out << "scenario,policy,n1_at_A0,delta_D_mean,var_D,delta_mean_abs_A,"
               "var_abs_A,feasible,seed\n";
        for (const auto& r : records) {
            out << csv_quote(r.scenario) << ',' << csv_quote(r.policy) << ','
                << r.n1_at_a0 << ',' << fmt_double(r.metrics.delta_d_mean) << ','
                << fmt_double(r.metrics.var_d) << ','
                << fmt_double(r.metrics.delta_mean_abs_a) << ','
                << fmt_double(r.metrics.var_abs_a) << ','
                << (r.metrics.feasible ? "true" : "false") << ',' << r.seed << '\n';
        }
    } else {
        json doc = json::array();
        for (const auto& r : records) {
            doc.push_back(json{{"scenario", r.scenario},
                               {"policy", r.policy},
                               {"n1_at_A0", r.n1_at_a0},
                               {"delta_D_mean", r.metrics.delta_d_mean},
                               {"var_D", r.metrics.var_d},
                               {"delta_mean_abs_A", r.metrics.delta_mean_abs_a},
                               {"var_abs_A", r.metrics.var_abs_a},
                               {"feasible", r.metrics.feasible},
                               {"seed", r.seed},
                               {"metadata", r.metadata}});
        }
        out << doc.dump(2) << '\n';
    }
}

void export_state_scatter(const std::vector<ScatterSeries>& series,
                          const std::string& path) {
    std::ofstream out = open_out(path);
    out << "A1,A2,count,policy\n";
    for (const auto& s : series) {
        if (s.trajectories == nullptr)
            throw std::invalid_argument("export_state_scatter: null trajectory list");
        std::map<std::pair<int, int>, long> counts;
        for (const auto& traj : *s.trajectories) {
            for (const auto& state : traj.states) {
                if (state.a.size() != 2)
                    throw std::invalid_argument("export_state_scatter: expected two-sensor states");
                ++counts[{state.a[0], state.a[1]}];
            }
        }
        for (const auto& [key, count] : counts)
            out << key.first << ',' << key.second << ',' << count << ','
                << csv_quote(s.policy) << '\n';
    }
}

void export_state_scatter(const std::vector<ScatterCounts>& series,
                          const std::string& path) {
    std::ofstream out = open_out(path);
    out << "A1,A2,count,policy\n";
    for (const auto& s : series)
        for (const auto& [key, count] : s.counts)
            out << key.first << ',' << key.second << ',' << count << ','
                << csv_quote(s.policy) << '\n';
}

void export_policy_surface(int a_max, const std::vector<int>& n1_lt,
                           const std::vector<int>& n1_os, const std::string& path) {
    const std::size_t states = static_cast<std::size_t>(a_max) * a_max;
    if (n1_lt.size() != states || (!n1_os.empty() && n1_os.size() != states))
        throw std::invalid_argument("export_policy_surface: dimension mismatch");
    std::ofstream out = open_out(path);
    out << (n1_os.empty() ? "A1,A2,n1\n" : "A1,A2,n1_lt,n1_os\n");
    for (int a1 = 1; a1 <= a_max; ++a1)
        for (int a2 = 1; a2 <= a_max; ++a2) {
            const std::size_t i = static_cast<std::size_t>(a1 - 1) * a_max + (a2 - 1);
            out << a1 << ',' << a2 << ',' << n1_lt[i];
            if (!n1_os.empty()) out << ',' << n1_os[i];
            out << '\n';
        }
}

}  // namespace aoifbl
