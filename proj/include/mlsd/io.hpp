#pragma once
// JSON and CSV formats. CSV files carry a header row and fixed column order;
// floats are written with 12 significant digits. JSON keeps full precision.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "core_model.hpp"
#include "intervals.hpp"
#include "learning.hpp"
#include "lp_relaxation.hpp"
#include "planner.hpp"

namespace mlsd {

using Json = nlohmann::json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Arms joined with ';' so a set fits in one CSV field.
inline std::string format_arm_set(const std::vector<ArmIndex>& arms) {
    std::string out;
    for (std::size_t j = 0; j < arms.size(); ++j) {
        if (j) out += ';';
        out += std::to_string(arms[j]);
    }
    return out;
}

// ---- instances ----

inline Json to_json(const Instance& instance) {
    Json payoffs = Json::array();
    for (const auto& table : instance.tables())
        payoffs.push_back(std::vector<double>(table.values().begin(), table.values().end()));
    return Json{{"n", instance.n()},
                {"k", instance.k()},
                {"tau_max", instance.tau_max()},
                {"tau_min", instance.tau_min()},
                {"payoffs", payoffs}};
}

inline Instance instance_from_json(const Json& j) {
    try {
        const auto n = j.at("n").get<std::size_t>();
        const auto rows = j.at("payoffs").get<std::vector<std::vector<double>>>();
        if (rows.size() != n)
            throw FormatError("instance declares n=" + std::to_string(n) + " but lists " +
                              std::to_string(rows.size()) + " payoff rows");
        return Instance::from_rows(j.at("k").get<std::size_t>(), j.at("tau_min").get<int>(),
                                   j.at("tau_max").get<int>(), rows);
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed instance JSON: ") + e.what());
    }
}

// ---- intervals ----

inline Json to_json(const RecurrentInterval& interval) { return Json{{"u", interval.u}, {"l", interval.l}}; }

inline RecurrentInterval interval_from_json(const Json& j) {
    try {
        return RecurrentInterval(j.at("u").get<int>(), j.at("l").get<int>());
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed interval JSON: ") + e.what());
    }
}

// ---- LP solutions ----

inline Json to_json(const LpSolution& solution) {
    Json entries = Json::array();
    solution.grid.for_each([&](std::size_t j, ArmIndex arm, int u, int l) {
        if (solution.x[j] != 0.0)
            entries.push_back(Json{{"i", arm}, {"u", u}, {"l", l}, {"value", solution.x[j]}});
    });
    return Json{{"objective", solution.objective},
                {"n", solution.grid.n},
                {"tau_max", solution.grid.tau_max},
                {"tau_L", solution.grid.tau_L},
                {"x", entries}};
}

inline LpSolution lp_solution_from_json(const Json& j) {
    try {
        LpSolution s;
        s.grid = IntervalGrid{j.at("n").get<std::size_t>(), j.at("tau_max").get<int>(),
                              j.at("tau_L").get<int>()};
        s.x.assign(s.grid.size(), 0.0);
        for (const auto& e : j.at("x"))
            s.x[s.grid.index(e.at("i").get<ArmIndex>(), e.at("u").get<int>(), e.at("l").get<int>())] =
                e.at("value").get<double>();
        s.objective = j.at("objective").get<double>();
        return s;
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed LP solution JSON: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw FormatError(std::string("LP solution entry outside its grid: ") + e.what());
    }
}

// ---- reports ----

inline Json to_json(const ExperimentReport& r) {
    Json extras = Json::object();
    for (const auto& [key, value] : r.extras) extras[key] = value;
    return Json{{"name", r.name},
                {"instance", r.instance},
                {"seeds", r.seeds},
                {"T", r.horizon},
                {"mean", r.mean},
                {"se", r.se},
                {"ci_low", r.ci_low()},
                {"ci_high", r.ci_high()},
                {"reference", r.reference},
                {"reference_kind", r.reference_kind},
                {"gamma_k", r.gamma},
                {"target", r.target},
                {"ratio", r.ratio},
                {"pass", r.pass},
                {"extras", extras}};
}

inline void write_report_csv(std::ostream& os, const std::vector<ExperimentReport>& reports) {
    os << "name,instance,seeds,T,mean,se,ci_low,ci_high,reference,reference_kind,gamma_k,target,ratio,pass\n";
    for (const auto& r : reports) {
        os << r.name << ',' << r.instance << ',' << r.seeds << ',' << r.horizon << ','
           << format_double(r.mean) << ',' << format_double(r.se) << ',' << format_double(r.ci_low())
           << ',' << format_double(r.ci_high()) << ',' << format_double(r.reference) << ','
           << r.reference_kind << ',' << format_double(r.gamma) << ',' << format_double(r.target)
           << ',' << format_double(r.ratio) << ',' << (r.pass ? 1 : 0) << '\n';
    }
}

// ---- CSV outputs ----

inline void write_trace_csv(std::ostream& os, const std::vector<PlannerTraceRow>& trace, std::size_t n) {
    os << 't';
    for (std::size_t i = 0; i < n; ++i) os << ",nu_" << i;
    os << ",candidates,played,virtual_payoff,actual_payoff\n";
    for (const auto& row : trace) {
        os << row.t;
        for (int v : row.virtual_states) os << ',' << v;
        os << ',' << format_arm_set(row.candidates) << ',' << format_arm_set(row.played) << ','
           << format_double(row.virtual_payoff) << ',' << format_double(row.actual_payoff) << '\n';
    }
}

/// Rounds numbered from 1.
inline void write_schedule_csv(std::ostream& os, const Schedule& schedule) {
    os << "t,played\n";
    for (std::size_t t = 0; t < schedule.size(); ++t)
        os << t + 1 << ',' << format_arm_set(schedule[t]) << '\n';
}

inline void write_regret_header(std::ostream& os) { os << "seed,T,exploration_length,R,Reg\n"; }

inline void write_regret_row(std::ostream& os, const EtcRecord& r) {
    os << r.seed << ',' << r.horizon << ',' << r.exploration_length << ','
       << format_double(r.realized_total) << ',' << format_double(r.regret) << '\n';
}

// ---- files ----

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError("cannot write file: " + path);
    out << content;
    if (!out) throw FileError("write failed: " + path);
}

inline Json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw FormatError("invalid JSON in " + path + ": " + e.what());
    }
}

inline Instance load_instance(const std::string& path) { return instance_from_json(read_json_file(path)); }

}  // namespace mlsd
