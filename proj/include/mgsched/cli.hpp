#pragma once

// Command implementations behind tools/mgsched. Each returns a process exit code.

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mgsched/config.hpp"
#include "mgsched/engine.hpp"
#include "mgsched/lp_format.hpp"
#include "mgsched/report.hpp"

namespace mgsched {

enum ExitCode : int {
    kExitOk = 0,
    kExitViolations = 1,
    kExitInfeasible = 2,
    kExitFailure = 3,
    kExitUsage = 64,
};

/// Command-line overrides; empty strings leave the config value alone.
struct CliOverrides {
    std::optional<long> seed;
    std::string scenarios;
    std::string architecture; // filters the scenario list
    std::string covid;        // filters the scenario list
    std::string edr_mode;
    std::string solver_mode;
    std::string out;
};

inline RunConfig apply_overrides(RunConfig c, const CliOverrides& f) {
    if (f.seed) {
        if (*f.seed < 0) throw ConfigError("--seed must be >= 0");
        c.seed = static_cast<std::uint64_t>(*f.seed);
    }
    if (!f.scenarios.empty()) c.scenarios = detail::parse_scenario_list(f.scenarios);
    if (!f.architecture.empty() || !f.covid.empty()) {
        std::optional<Architecture> arch;
        std::optional<bool> covid;
        if (!f.architecture.empty()) arch = parse_architecture(f.architecture);
        if (!f.covid.empty()) covid = detail::cfg_bool("--covid", f.covid);
        std::vector<int> keep;
        for (int id : c.scenarios) {
            const auto sc = ScenarioConfig::from_id(id);
            if (arch && sc.architecture != *arch) continue;
            if (covid && sc.covid != *covid) continue;
            keep.push_back(id);
        }
        if (keep.empty()) throw ConfigError("--architecture/--covid leave no scenario selected");
        c.scenarios = keep;
    }
    if (!f.edr_mode.empty()) c.edr_mode = parse_edr_mode(f.edr_mode);
    if (!f.solver_mode.empty()) {
        if (f.solver_mode == "exact") c.solver.mode = SolverMode::exact;
        else if (f.solver_mode == "chunked") c.solver.mode = SolverMode::chunked;
        else throw ConfigError("--solver-mode must be exact or chunked");
    }
    if (!f.out.empty()) c.out = f.out;
    c.validate();
    return c;
}

inline std::filesystem::path profile_file(const std::filesystem::path& dir, ProfileKind k, int smg_id) {
    return dir / (std::string(to_string(k)) + "_" + std::to_string(smg_id) + ".csv");
}

inline DataBundle load_bundle(const RunConfig& c) {
    DataBundle b;
    if (c.data_dir) {
        b.calendar = YearCalendar::build(c.january_first);
        for (int z = 1; z <= kMaxSmg; ++z) {
            b.profiles.load[z - 1] = load_profile_csv(profile_file(*c.data_dir, ProfileKind::load, z), ProfileKind::load, z);
            b.profiles.pv_max[z - 1] =
                load_profile_csv(profile_file(*c.data_dir, ProfileKind::pv_max, z), ProfileKind::pv_max, z);
            b.profiles.wt_max[z - 1] =
                load_profile_csv(profile_file(*c.data_dir, ProfileKind::wt_max, z), ProfileKind::wt_max, z);
        }
        b.tariff = load_tariff_csv(*c.data_dir / "tariff.csv", b.calendar, c.tariff.sell_bonus);
    } else {
        SynthesisSpec s = c.synthesis;
        s.seed = c.seed;
        b = synthetic_bundle(s, c.january_first, c.tariff);
    }
    if (c.covid_table) b.cvd = load_covid_table_csv(*c.covid_table);
    b.validate();
    return b;
}

/// Writes the nine hourly profiles and the tariff for the configured seed.
inline int cmd_synth(const RunConfig& c, std::ostream& out) {
    SynthesisSpec s = c.synthesis;
    s.seed = c.seed;
    const DataBundle b = synthetic_bundle(s, c.january_first, c.tariff);
    for (int z = 1; z <= kMaxSmg; ++z)
        for (auto k : {ProfileKind::load, ProfileKind::pv_max, ProfileKind::wt_max}) {
            const auto p = profile_file(c.out, k, z);
            write_profile_csv(p, b.profiles.get(k, z));
            out << "wrote " << p.generic_string() << '\n';
        }
    const auto tp = c.out / "tariff.csv";
    write_tariff_csv(tp, b.tariff);
    out << "wrote " << tp.generic_string() << '\n';
    return kExitOk;
}

struct SolutionMeta {
    std::optional<int> scenario;
    std::optional<int> month;
    std::optional<SmgValues> initial_soc;
};

/// Reads `# key value...` lines that cmd_run writes after the solution header.
inline SolutionMeta read_solution_meta(std::string_view src) {
    SolutionMeta m;
    for (auto raw : text::lines(src)) {
        auto line = text::trim(raw);
        if (line.size() < 2 || line.front() != '#') continue;
        std::istringstream is{std::string(line.substr(1))};
        std::string key;
        is >> key;
        if (key == "scenario") {
            int v;
            if (is >> v) m.scenario = v;
        } else if (key == "month") {
            int v;
            if (is >> v) m.month = v;
        } else if (key == "initial_soc") {
            SmgValues s{};
            bool ok = true;
            for (auto& v : s) ok = ok && static_cast<bool>(is >> v);
            if (ok) m.initial_soc = s;
        }
    }
    return m;
}

inline std::string solution_file_text(const MonthlyInstance& inst, const ScheduleSolution& sol, int scenario) {
    std::string s = write_solution(inst.lp, to_column_values(inst, sol));
    std::string meta = "# scenario " + std::to_string(scenario) + "\n# month " + std::to_string(sol.month) +
                       "\n# initial_soc";
    for (double v : sol.initial_soc) meta += " " + text::format_double(v);
    meta += "\n";
    const auto nl = s.find('\n');
    return s.insert(nl + 1, meta);
}

inline void print_summary(const std::vector<ScenarioResult>& results, std::ostream& out) {
    out << std::left << std::setw(10) << "scenario" << std::setw(22) << "label" << std::right << std::setw(16)
        << "annual_profit" << std::setw(16) << "annual_risk" << "  status\n";
    for (const auto& r : results) {
        std::ostringstream p, k;
        p << std::fixed << std::setprecision(2) << r.annual_profit;
        k << std::fixed << std::setprecision(2) << r.annual_risk;
        out << std::left << std::setw(10) << r.scenario << std::setw(22) << r.label << std::right << std::setw(16)
            << p.str() << std::setw(16) << k.str() << "  ";
        if (r.feasible()) out << "ok";
        else out << "infeasible months " << detail::join_ints(r.infeasible_months);
        out << '\n';
    }
}

/// Runs the selected scenarios and writes the reports into c.out.
inline int cmd_run(const RunConfig& c, std::ostream& out, std::ostream& log) {
    c.validate();
    const DataBundle data = load_bundle(c);
    std::vector<int> ids = c.scenarios;
    std::sort(ids.begin(), ids.end());
    RunOptions ro;
    ro.solver = c.solver;
    ro.initial_soc = c.initial_soc;
    ro.horizon_hours = c.horizon_hours;
    ro.keep_schedules = c.hourly || c.write_solutions;
    std::vector<ScenarioRun> runs;
    std::vector<ScenarioResult> results;
    for (int id : ids) {
        const auto sc = ScenarioConfig::from_id(id, c.terminal_soc_rule, c.edr_mode);
        log << "running scenario " << id << " (" << sc.label() << ")\n";
        runs.push_back(run_scenario(c.spec, sc, data, ro));
        results.push_back(runs.back().result);
    }
    Report report;
    report.run = config_summary(c);
    report.results = results;
    report.comparisons = standard_comparisons(results);
    for (const auto& p : emit_report(report, runs, data, c.format, c.out, c.hourly))
        log << "wrote " << p.generic_string() << '\n';
    if (c.write_solutions)
        for (const auto& run : runs) {
            const auto sc = ScenarioConfig::from_id(run.result.scenario, c.terminal_soc_rule, c.edr_mode);
            for (const auto& sol : run.schedules) {
                if (sol.hours() == 0) continue;
                const auto in = scenario_month_inputs(data, sc.covid, sol.month, c.horizon_hours);
                const auto inst = build_instance(c.spec, sc, in, sol.initial_soc);
                std::ostringstream name;
                name << "scenario" << run.result.scenario << "_month" << std::setw(2) << std::setfill('0') << sol.month
                     << ".sol";
                text::write_file(c.out / "solutions" / name.str(), solution_file_text(inst, sol, run.result.scenario));
            }
        }
    print_summary(results, out);
    int code = kExitOk;
    for (const auto& r : results)
        for (const auto& m : r.months) {
            if (m.included) continue;
            out << "scenario " << r.scenario << " month " << m.month << ": " << m.status;
            if (!m.infeasible_smgs.empty()) out << " (SMG " << detail::join_ints(m.infeasible_smgs) << ")";
            out << '\n';
            const bool edr = m.status == "infeasible" || m.status == "edr_violated";
            code = std::max(code, edr ? static_cast<int>(kExitInfeasible) : static_cast<int>(kExitFailure));
        }
    return code;
}

struct ValidateRequest {
    std::filesystem::path solution;
    std::optional<int> scenario;
    std::optional<int> month;
    double tol = 1e-6;
};

/// Checks a solution file against the instance rebuilt from the config.
inline int cmd_validate(const RunConfig& c, const ValidateRequest& req, std::ostream& out) {
    const std::string src = text::read_file(req.solution);
    const auto values = read_solution(src);
    const auto meta = read_solution_meta(src);
    const int scenario = req.scenario ? *req.scenario : meta.scenario.value_or(0);
    const int month = req.month ? *req.month : meta.month.value_or(0);
    if (scenario < 1 || scenario > 4) throw ConfigError("validate: scenario unknown; pass --scenario");
    if (month < 1 || month > kMonths) throw ConfigError("validate: month unknown; pass --month");
    SmgValues soc{};
    for (int z = 0; z < c.spec.n_smg; ++z) soc[z] = c.spec.soc_max;
    if (c.initial_soc) soc = *c.initial_soc;
    if (meta.initial_soc) soc = *meta.initial_soc;
    const DataBundle data = load_bundle(c);
    const auto sc = ScenarioConfig::from_id(scenario, c.terminal_soc_rule, c.edr_mode);
    const auto in = scenario_month_inputs(data, sc.covid, month, c.horizon_hours);
    const auto inst = build_instance(c.spec, sc, in, soc);
    std::vector<std::string> unknown;
    const auto sol = schedule_from_named_values(inst, values, &unknown);
    for (const auto& u : unknown) out << "warning: unknown column " << u << '\n';
    const auto rep = validate_solution(inst, sol, req.tol);
    for (const auto& v : rep.violations) out << "violation " << v.describe() << '\n';
    out << (rep.ok() ? "clean" : std::to_string(rep.violations.size()) + " violation(s)") << '\n';
    return rep.ok() ? kExitOk : kExitViolations;
}

/// Writes the LP of one month, for cross-checking with an external solver.
inline int cmd_export_lp(const RunConfig& c, int scenario, int month, const std::filesystem::path& path,
                         std::ostream& out) {
    SmgValues soc{};
    for (int z = 0; z < c.spec.n_smg; ++z) soc[z] = c.spec.soc_max;
    if (c.initial_soc) soc = *c.initial_soc;
    const DataBundle data = load_bundle(c);
    const auto sc = ScenarioConfig::from_id(scenario, c.terminal_soc_rule, c.edr_mode);
    const auto in = scenario_month_inputs(data, sc.covid, month, c.horizon_hours);
    const auto inst = build_instance(c.spec, sc, in, soc);
    text::write_file(path, write_lp(inst.lp, inst.binaries,
                                    "scenario " + std::to_string(scenario) + " month " + std::to_string(month)));
    out << "wrote " << path.generic_string() << " (" << inst.lp.num_rows() << " rows, " << inst.lp.num_cols()
        << " columns, " << inst.binaries.size() << " binaries)\n";
    return kExitOk;
}

} // namespace mgsched
