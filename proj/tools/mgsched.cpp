#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mgsched/mgsched.hpp"

using namespace mgsched;

int main(int argc, char** argv) {
    CLI::App app{"Yearly multi-microgrid scheduling with COVID load factors and downside risk"};
    app.require_subcommand(1);
    app.fallthrough();
    CliOverrides f;
    std::string config;
    app.add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--seed", f.seed, "synthesis seed");
    app.add_option("--scenarios", f.scenarios, "comma-separated scenario ids (1..4)");
    app.add_option("--architecture", f.architecture, "keep only mmg or smg scenarios");
    app.add_option("--covid", f.covid, "keep only scenarios with covid on or off");
    app.add_option("--edr-mode", f.edr_mode, "hard or report_only");
    app.add_option("--solver-mode", f.solver_mode, "chunked or exact");
    app.add_option("--out", f.out, "output directory or file");

    auto* synth = app.add_subcommand("synth", "write synthetic profiles and tariff CSVs");
    auto* run = app.add_subcommand("run", "solve the selected scenarios and write reports");
    auto* validate = app.add_subcommand("validate", "check a solution file against its instance");
    std::string solution;
    std::optional<int> v_scenario, v_month;
    double tol = 1e-6;
    validate->add_option("solution", solution, "solution file")->required()->check(CLI::ExistingFile);
    validate->add_option("--scenario", v_scenario, "scenario id when the file carries none");
    validate->add_option("--month", v_month, "month when the file carries none");
    validate->add_option("--tol", tol, "validation tolerance");
    auto* export_lp = app.add_subcommand("export-lp", "write one month's MIP in LP format");
    int e_scenario = 1, e_month = 1;
    std::string e_path;
    export_lp->add_option("--scenario", e_scenario, "scenario id")->check(CLI::Range(1, 4));
    export_lp->add_option("--month", e_month, "month")->check(CLI::Range(1, 12));
    export_lp->add_option("path", e_path, "LP file to write")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        RunConfig c = config.empty() ? RunConfig{} : load_config(config);
        c = apply_overrides(std::move(c), f);
        if (*synth) return cmd_synth(c, std::cout);
        if (*run) return cmd_run(c, std::cout, std::cerr);
        if (*validate) return cmd_validate(c, {solution, v_scenario, v_month, tol}, std::cout);
        if (*export_lp) return cmd_export_lp(c, e_scenario, e_month, e_path, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SchemaError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
