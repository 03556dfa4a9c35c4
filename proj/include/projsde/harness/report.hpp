#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "projsde/core/errors.hpp"
#include "projsde/core/state.hpp"

namespace projsde {

/// Scientific notation with 6 significant digits; the frozen CSV float format.
inline std::string sci6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5e", v);
    return buf;
}

inline std::string iso8601_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ConvergenceEntry {
    std::string method;
    double h = 0.0;
    double error = 0.0;

    bool operator==(const ConvergenceEntry&) const = default;
};

struct OrderFit {
    std::string method;
    double order = 0.0;
    double intercept = 0.0;
    double residual = 0.0;

    bool operator==(const OrderFit&) const = default;
};

/**
 * @brief Results of a mean-square convergence study: per (method, h) errors
 * plus fitted orders and the full run metadata.
 */
struct ConvergenceReport {
    std::string model;
    std::map<std::string, double> params;
    std::vector<double> x0;
    std::uint64_t seed = 0;
    std::uint64_t paths = 0;
    double t_end = 1.0;
    double h_ref = 0.0;
    int truncation_k = 6;
    bool truncation_enabled = true;
    std::string projection_direction = "xhat";
    double newton_tol = 1e-12;
    std::string created_at;

    std::vector<std::string> methods;
    std::vector<double> h_levels;
    std::vector<ConvergenceEntry> entries;
    std::vector<OrderFit> orders;

    bool operator==(const ConvergenceReport&) const = default;
};

/// CSV schema: one `method,h,mse_error` row per entry, then one
/// `# order,<method>,<fitted>,<residual>` comment line per fitted method.
inline void write_convergence_csv(const ConvergenceReport& report, std::ostream& os) {
    os << "method,h,mse_error\n";
    for (const auto& e : report.entries)
        os << e.method << ',' << sci6(e.h) << ',' << sci6(e.error) << '\n';
    for (const auto& o : report.orders)
        os << "# order," << o.method << ',' << sci6(o.order) << ',' << sci6(o.residual) << '\n';
}

inline std::string convergence_csv(const ConvergenceReport& report) {
    std::ostringstream os;
    write_convergence_csv(report, os);
    return os.str();
}

inline nlohmann::json to_json(const ConvergenceReport& r) {
    nlohmann::json j;
    j["model"] = r.model;
    j["params"] = r.params;
    j["x0"] = r.x0;
    j["seed"] = r.seed;
    j["paths"] = r.paths;
    j["t_end"] = r.t_end;
    j["h_ref"] = r.h_ref;
    j["truncation_k"] = r.truncation_k;
    j["truncation_enabled"] = r.truncation_enabled;
    j["projection_direction"] = r.projection_direction;
    j["newton_tol"] = r.newton_tol;
    j["created_at"] = r.created_at;
    j["methods"] = r.methods;
    j["h_levels"] = r.h_levels;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : r.entries)
        j["entries"].push_back({{"method", e.method}, {"h", e.h}, {"error", e.error}});
    j["orders"] = nlohmann::json::array();
    for (const auto& o : r.orders)
        j["orders"].push_back({{"method", o.method},
                               {"order", o.order},
                               {"intercept", o.intercept},
                               {"residual", o.residual}});
    return j;
}

inline ConvergenceReport convergence_from_json(const nlohmann::json& j) {
    ConvergenceReport r;
    r.model = j.at("model").get<std::string>();
    r.params = j.at("params").get<std::map<std::string, double>>();
    r.x0 = j.at("x0").get<std::vector<double>>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.paths = j.at("paths").get<std::uint64_t>();
    r.t_end = j.at("t_end").get<double>();
    r.h_ref = j.at("h_ref").get<double>();
    r.truncation_k = j.at("truncation_k").get<int>();
    r.truncation_enabled = j.at("truncation_enabled").get<bool>();
    r.projection_direction = j.at("projection_direction").get<std::string>();
    r.newton_tol = j.at("newton_tol").get<double>();
    r.created_at = j.at("created_at").get<std::string>();
    r.methods = j.at("methods").get<std::vector<std::string>>();
    r.h_levels = j.at("h_levels").get<std::vector<double>>();
    for (const auto& e : j.at("entries"))
        r.entries.push_back({e.at("method").get<std::string>(), e.at("h").get<double>(),
                             e.at("error").get<double>()});
    for (const auto& o : j.at("orders"))
        r.orders.push_back({o.at("method").get<std::string>(), o.at("order").get<double>(),
                            o.at("intercept").get<double>(), o.at("residual").get<double>()});
    return r;
}

/**
 * @brief Single-path record of states and invariant errors, step by step.
 */
struct DriftRow {
    std::uint64_t step = 0;
    double t = 0.0;
    std::vector<double> state;
    std::vector<double> inv_err; // |I^i(X_n) - I^i(X_0)|
    double combined = 0.0;       // sqrt(sum_i (I^i(X_n) - I^i(X_0))^2)
};

struct DriftReport {
    std::string model;
    std::string method;
    double h = 0.0;
    double t_end = 0.0;
    std::uint64_t seed = 0;
    std::string created_at;
    std::vector<std::string> invariant_labels;
    std::vector<DriftRow> rows;

    double max_combined = 0.0;
    std::vector<double> max_inv_err;
};

/// CSV schema: step,t,x_1..x_d,inv_err_1..inv_err_l,combined_err.
inline void write_drift_csv(const DriftReport& report, std::ostream& os) {
    os << "step,t";
    if (!report.rows.empty()) {
        for (std::size_t i = 1; i <= report.rows.front().state.size(); ++i) os << ",x_" << i;
        for (std::size_t i = 1; i <= report.rows.front().inv_err.size(); ++i)
            os << ",inv_err_" << i;
    }
    os << ",combined_err\n";
    for (const auto& row : report.rows) {
        os << row.step << ',' << sci6(row.t);
        for (double x : row.state) os << ',' << sci6(x);
        for (double e : row.inv_err) os << ',' << sci6(e);
        os << ',' << sci6(row.combined) << '\n';
    }
}

inline nlohmann::json to_json(const DriftReport& r) {
    nlohmann::json j;
    j["model"] = r.model;
    j["method"] = r.method;
    j["h"] = r.h;
    j["t_end"] = r.t_end;
    j["seed"] = r.seed;
    j["created_at"] = r.created_at;
    j["invariant_labels"] = r.invariant_labels;
    j["max_combined"] = r.max_combined;
    j["max_inv_err"] = r.max_inv_err;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows)
        j["rows"].push_back({{"step", row.step},
                             {"t", row.t},
                             {"state", row.state},
                             {"inv_err", row.inv_err},
                             {"combined", row.combined}});
    return j;
}

template <typename Report>
void export_report(const Report& report, const std::string& format, const std::string& path) {
    if (format != "csv" && format != "json")
        throw ConfigError("export_report: unknown format '" + format + "' (csv|json)");
    std::ofstream os(path);
    if (!os) throw ConfigError("export_report: cannot open '" + path + "' for writing");
    if (format == "csv") {
        if constexpr (std::is_same_v<Report, ConvergenceReport>)
            write_convergence_csv(report, os);
        else
            write_drift_csv(report, os);
    } else {
        os << to_json(report).dump(2) << '\n';
    }
    os.flush();
    if (!os) throw ConfigError("export_report: write to '" + path + "' failed");
}

} // namespace projsde
