// verify: runs the registered identity suites and writes residual tables.
//
//   verify run --config run.json [--set key=value]...
//   verify list-suites [--json]
//
// Exit status: 0 all suites pass, 1 a suite failed, 2 configuration error.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hypharm/runner.hpp"

using namespace hypharm;
using namespace hypharm::suites;

namespace {

int list_suites(bool as_json) {
    if (as_json) {
        nlohmann::json out = nlohmann::json::array();
        for (const Suite& s : registry())
            out.push_back({{"name", s.name}, {"anchor", s.anchor}, {"family", s.family}, {"convergent", s.convergent}});
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    for (const Suite& s : registry()) std::cout << s.name << "\t" << s.anchor << "\n";
    return 0;
}

int run(const std::string& config_path, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    try {
        std::ifstream is(config_path);
        if (!is) throw ConfigError("cannot open config file '" + config_path + "'");
        nlohmann::json j = nlohmann::json::parse(is, nullptr, true, true);
        for (const auto& o : overrides) apply_override(j, o);
        cfg = parse_run_config(j);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "verify: config error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto results = run_suites(cfg);
    const double total = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    try {
        write_reports(cfg, results, total);
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return 2;
    }

    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.suite->name << "  rows=" << r.rows.size();
        if (!r.error.empty()) std::cout << "  error: " << r.error;
        for (const auto& v : r.verdicts)
            if (!v.pass) std::cout << "  " << v.identity << " max=" << v.max_residual << " tol=" << v.tolerance;
        if (!r.monotone) std::cout << "  convergence not monotone";
        std::cout << "\n";
    }
    std::cout << "reports in " << cfg.output_dir << "\n";
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Residual checks for hyperbolic-disc harmonic analysis identities"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "Run the suites named in a JSON configuration");
    std::string config;
    std::vector<std::string> sets;
    run_cmd->add_option("--config", config, "Run configuration (JSON)")->required();
    run_cmd->add_option("--set", sets, "Override a configuration key, e.g. --set quadrature.line_nodes=128")->take_all();

    auto* list_cmd = app.add_subcommand("list-suites", "List the registered suites and the identities they test");
    bool as_json = false;
    list_cmd->add_flag("--json", as_json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (*list_cmd) return list_suites(as_json);
    return run(config, sets);
}
