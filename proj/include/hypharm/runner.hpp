#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "parallel.hpp"
#include "suites.hpp"

// Run configuration, suite execution and report files for the verify driver.
namespace hypharm::suites {

struct RunConfig {
    std::vector<std::string> suites;
    RunSettings settings;
    ToleranceMap tolerances;
    std::string output_dir = "verify_out";
    bool convergence = true;
};

namespace detail {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

inline void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [k, v] : j.items())
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) throw ConfigError(where + ": unknown key '" + k + "'");
}

} // namespace detail

// Parses a RunConfig from JSON; unknown keys, unknown suites and bad values raise ConfigError.
inline RunConfig parse_run_config(const nlohmann::json& j) {
    using detail::check_keys;
    check_keys(j, {"suites", "quadrature", "symbol_set", "probe_seed", "output_dir", "r_grid", "t_values", "tolerances", "convergence"},
               "config");
    RunConfig c;
    try {
        if (j.contains("suites")) {
            c.suites = j.at("suites").get<std::vector<std::string>>();
        } else {
            for (const Suite& s : registry()) c.suites.push_back(s.name);
        }
        if (c.suites.empty()) throw ConfigError("config: 'suites' is empty");
        for (const auto& name : c.suites)
            if (!find_suite(name)) throw ConfigError("config: unknown suite '" + name + "'");

        if (j.contains("quadrature")) {
            const auto& q = j.at("quadrature");
            check_keys(q, {"disc_radius_max", "disc_radial_nodes", "disc_angular_nodes", "line_halfwidth", "line_nodes", "r_halfwidth",
                           "r_nodes", "tol"},
                       "quadrature");
            auto& o = c.settings.quadrature;
            detail::read_opt(q, "disc_radius_max", o.disc_radius_max);
            detail::read_opt(q, "disc_radial_nodes", o.disc_radial_nodes);
            detail::read_opt(q, "disc_angular_nodes", o.disc_angular_nodes);
            detail::read_opt(q, "line_halfwidth", o.line_halfwidth);
            detail::read_opt(q, "line_nodes", o.line_nodes);
            detail::read_opt(q, "r_halfwidth", o.r_halfwidth);
            detail::read_opt(q, "r_nodes", o.r_nodes);
            detail::read_opt(q, "tol", o.tol);
            o.apply(QuadratureSpec{}).validate();
        }
        if (j.contains("symbol_set")) {
            const auto& s = j.at("symbol_set");
            check_keys(s, {"kernel_alpha", "kernel_beta", "bump_radius", "gaussian_alpha", "profile_center", "profile_width"}, "symbol_set");
            SymbolSet& y = c.settings.symbols;
            y.kernel_alpha = s.value("kernel_alpha", y.kernel_alpha);
            y.kernel_beta = s.value("kernel_beta", y.kernel_beta);
            y.bump_radius = s.value("bump_radius", y.bump_radius);
            y.gaussian_alpha = s.value("gaussian_alpha", y.gaussian_alpha);
            y.profile_center = s.value("profile_center", y.profile_center);
            y.profile_width = s.value("profile_width", y.profile_width);
            if (!(y.kernel_alpha > 0 && y.bump_radius > 0 && y.gaussian_alpha > 0 && y.profile_width > 0))
                throw ConfigError("symbol_set: widths, radii and alphas must be positive");
        }
        if (j.contains("probe_seed")) c.settings.probe_seed = j.at("probe_seed").get<std::uint64_t>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("r_grid")) c.settings.r_grid = j.at("r_grid").get<std::vector<double>>();
        if (j.contains("t_values")) c.settings.t_values = j.at("t_values").get<std::vector<double>>();
        if (j.contains("convergence")) c.convergence = j.at("convergence").get<bool>();
        if (j.contains("tolerances")) {
            c.tolerances = j.at("tolerances").get<ToleranceMap>();
            for (const auto& [k, v] : c.tolerances)
                if (!(v >= 0.0)) throw ConfigError("tolerances: '" + k + "' must be non-negative");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.settings.r_grid.size() < 2 || std::any_of(c.settings.r_grid.begin(), c.settings.r_grid.end(), [](double r) { return !(r > 0); }))
        throw ConfigError("r_grid: need at least two positive values");
    if (!std::is_sorted(c.settings.r_grid.begin(), c.settings.r_grid.end())) throw ConfigError("r_grid: must be increasing");
    if (c.settings.t_values.empty()) throw ConfigError("t_values: empty");
    if (c.output_dir.empty()) throw ConfigError("output_dir: empty");
    return c;
}

// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when possible, else
// taken as a string.
inline void apply_override(nlohmann::json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    nlohmann::json* node = &j;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("--set: empty key component in '" + key + "'");
        if (!node->is_object()) throw ConfigError("--set: '" + key + "' does not address an object member");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = nlohmann::json::object();
        start = dot + 1;
    }
}

struct ConvergenceLevel {
    double scale = 1.0;
    int nodes = 0;
    double median = 0.0;
    std::vector<ResidualReport> rows;
};

struct SuiteResult {
    const Suite* suite = nullptr;
    std::vector<ResidualReport> rows;
    std::vector<IdentityVerdict> verdicts;
    std::vector<ConvergenceLevel> convergence;
    bool monotone = true;
    std::string error;
    double wall_time_ms = 0.0;
    bool pass = false;
};

// Node counts of the convergence table, relative to the suite's tuned quadrature.
inline constexpr double convergence_scales[] = {0.5, 1.0};

inline SuiteResult run_suite(const Suite& s, const RunConfig& c) {
    SuiteResult r;
    r.suite = &s;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r.rows = s.run(c.settings, Level{}).rows;
        r.verdicts = judge(s, r.rows, c.tolerances);
        if (s.convergent && c.convergence) {
            for (double sc : convergence_scales) {
                SuiteOutput o = s.run(c.settings, Level{sc, true});
                r.convergence.push_back({sc, o.nodes, median_residual(s, o.rows), std::move(o.rows)});
            }
            // doubling the nodes must not increase the median residual (1e-14 absorbs roundoff)
            for (std::size_t k = 1; k < r.convergence.size(); ++k)
                if (!(r.convergence[k].median <= r.convergence[k - 1].median + 1e-14)) r.monotone = false;
        }
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    for (auto& row : r.rows) row.wall_time_ms = 0.0;
    r.pass = r.error.empty() && r.monotone && !r.rows.empty() &&
             std::all_of(r.verdicts.begin(), r.verdicts.end(), [](const IdentityVerdict& v) { return v.pass; });
    return r;
}

// Runs the configured suites in parallel; results come back in configuration order.
inline std::vector<SuiteResult> run_suites(const RunConfig& c) {
    std::vector<const Suite*> list;
    for (const auto& name : c.suites) list.push_back(find_suite(name));
    return parallel_map<SuiteResult>(list.size(), [&](std::size_t i) { return run_suite(*list[i], c); });
}

inline nlohmann::json verdicts_json(const SuiteResult& r) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : r.verdicts)
        out.push_back({{"identity", v.identity},
                       {"metric", v.metric == Metric::absolute ? "abs_residual" : "rel_residual"},
                       {"tolerance", v.informational ? nlohmann::json(nullptr) : nlohmann::json(v.tolerance)},
                       {"informational", v.informational},
                       {"count", v.count},
                       {"max_residual", v.max_residual},
                       {"median_residual", v.median_residual},
                       {"pass", v.pass}});
    return out;
}

inline nlohmann::json summary_json(const RunConfig& c, const std::vector<SuiteResult>& results, double total_ms) {
    nlohmann::json suites = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        nlohmann::json s{{"suite", r.suite->name},
                         {"anchor", r.suite->anchor},
                         {"pass", r.pass},
                         {"rows", r.rows.size()},
                         {"wall_time_ms", r.wall_time_ms},
                         {"identities", verdicts_json(r)}};
        if (!r.error.empty()) s["error"] = r.error;
        if (!r.convergence.empty()) {
            nlohmann::json levels = nlohmann::json::array();
            for (const auto& l : r.convergence) levels.push_back({{"node_scale", l.scale}, {"nodes", l.nodes}, {"median_residual", l.median}});
            s["convergence"] = {{"levels", levels}, {"monotone", r.monotone}};
        }
        suites.push_back(s);
    }
    return {{"pass", all},
            {"probe_seed", c.settings.probe_seed},
            {"threads", worker_count()},
            {"wall_time_ms", total_ms},
            {"suites", suites}};
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot write " + p.string());
    os << text;
    if (!os) throw Error("write failed: " + p.string());
}

// <suite>.csv, <suite>_convergence.csv (convergent suites) and summary.json in c.output_dir.
inline void write_reports(const RunConfig& c, const std::vector<SuiteResult>& results, double total_ms) {
    const std::filesystem::path dir(c.output_dir);
    std::filesystem::create_directories(dir);
    for (const auto& r : results) {
        std::ostringstream os;
        write_residual_csv(os, r.rows);
        write_text(dir / (r.suite->name + ".csv"), os.str());
        if (!r.convergence.empty()) {
            std::vector<ResidualReport> rows;
            for (const auto& l : r.convergence)
                for (ResidualReport row : l.rows) {
                    row.probe_id = "n" + std::to_string(l.nodes) + ":" + row.probe_id;
                    rows.push_back(std::move(row));
                }
            std::ostringstream cs;
            write_residual_csv(cs, rows);
            write_text(dir / (r.suite->name + "_convergence.csv"), cs.str());
        }
    }
    write_text(dir / "summary.json", summary_json(c, results, total_ms).dump(2) + "\n");
}

} // namespace hypharm::suites
