#pragma once

// Scenario runs over the twelve months and the comparison tables built from them.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mgsched/demand.hpp"
#include "mgsched/model.hpp"
#include "mgsched/profiles.hpp"
#include "mgsched/solve.hpp"
#include "mgsched/system.hpp"

namespace mgsched {

struct DataBundle {
    YearCalendar calendar;
    YearProfiles profiles;
    TariffSchedule tariff;
    CovidFactorTable cvd = CovidFactorTable::standard();

    void validate() const {
        profiles.validate();
        tariff.validate(calendar);
        cvd.validate();
    }
};

inline DataBundle synthetic_bundle(const SynthesisSpec& synth = {}, Weekday january_first = Weekday::monday,
                                   const TariffOptions& tariff = {}) {
    DataBundle b;
    b.calendar = YearCalendar::build(january_first);
    b.profiles = synthesize_year(synth, january_first);
    b.tariff = build_tariff(b.profiles, b.calendar, tariff);
    return b;
}

struct RunOptions {
    SolverOptions solver;
    std::optional<SmgValues> initial_soc; // soc_max for every SMG when unset
    std::optional<int> horizon_hours;     // solve only the first hours of each month
    bool keep_schedules = true;
};

inline MonthInputs scenario_month_inputs(const DataBundle& data, bool covid, int month,
                                         std::optional<int> horizon = std::nullopt) {
    MonthInputs in = make_month_inputs(data.calendar, data.profiles, data.tariff, data.cvd, covid, month);
    if (horizon && *horizon < in.hours()) in = in.slice(0, *horizon);
    return in;
}

struct MonthResult {
    int month = 1;
    double cvd = 1.0;
    std::string status;
    bool heuristic = false;
    bool included = false; // feasible, validated and counted in the annual totals
    int violations = 0;
    SmgValues profit{};
    SmgValues risk{};
    SmgValues w{};
    double total_profit = 0.0;
    double total_risk = 0.0;
    long nodes = 0;
    int windows = 0;
    std::optional<double> bound;
    std::vector<int> infeasible_smgs;
    SmgValues soc_start{};
    SmgValues soc_end{};
    int soc_carried_from = 0; // month whose final SOC was reused after an infeasible month, 0 if none

    bool operator==(const MonthResult&) const = default;
};

struct ScenarioResult {
    int scenario = 1;
    std::string label;
    std::string architecture;
    bool covid = true;
    std::string edr_mode;
    std::string terminal_soc_rule;
    std::string solver_mode;
    int n_smg = kMaxSmg;
    std::vector<MonthResult> months;
    double annual_profit = 0.0;
    double annual_risk = 0.0;
    std::vector<int> infeasible_months;

    bool feasible() const { return infeasible_months.empty(); }
    bool operator==(const ScenarioResult&) const = default;
};

struct ScenarioRun {
    ScenarioResult result;
    std::vector<ScheduleSolution> schedules; // one per month, empty entries for months without a schedule
};

/// Sums in month order then SMG order, over included months only.
inline void recompute_totals(ScenarioResult& r) {
    r.annual_profit = 0.0;
    r.annual_risk = 0.0;
    r.infeasible_months.clear();
    for (const auto& m : r.months) {
        if (!m.included) {
            r.infeasible_months.push_back(m.month);
            continue;
        }
        for (int z = 0; z < r.n_smg; ++z) {
            r.annual_profit += m.profit[z];
            r.annual_risk += m.risk[z];
        }
    }
}

inline MonthSolveResult solve_month(const SystemSpec& spec, const ScenarioConfig& scenario, const MonthInputs& in,
                                    const SmgValues& soc, const SolverOptions& opt) {
    if (opt.mode == SolverMode::chunked) return solve_month_chunked(spec, scenario, in, soc, opt);
    return solve_mip(build_instance(spec, scenario, in, soc), opt);
}

inline ScenarioRun run_scenario(const SystemSpec& spec, const ScenarioConfig& scenario, const DataBundle& data,
                                const RunOptions& opt = {}) {
    spec.validate();
    opt.solver.validate();
    if (opt.horizon_hours && *opt.horizon_hours < 1) throw ConfigError("horizon must be at least one hour");
    ScenarioRun run;
    auto& r = run.result;
    r.scenario = scenario.id();
    r.label = scenario.label();
    r.architecture = to_string(scenario.architecture);
    r.covid = scenario.covid;
    r.edr_mode = to_string(scenario.edr_mode);
    r.terminal_soc_rule = to_string(scenario.terminal_soc_rule);
    r.solver_mode = to_string(opt.solver.mode);
    r.n_smg = spec.n_smg;

    SmgValues soc{};
    for (int z = 0; z < spec.n_smg; ++z) soc[z] = spec.soc_max;
    if (opt.initial_soc) soc = *opt.initial_soc;
    int last_feasible = 0;
    bool carrying = false;

    for (int m = 1; m <= spec.months; ++m) {
        const MonthInputs in = scenario_month_inputs(data, scenario.covid, m, opt.horizon_hours);
        MonthResult mr;
        mr.month = m;
        mr.cvd = in.cvd;
        mr.soc_start = soc;
        if (carrying) mr.soc_carried_from = last_feasible;
        MonthSolveResult res = solve_month(spec, scenario, in, soc, opt.solver);
        mr.heuristic = res.heuristic;
        mr.nodes = res.nodes;
        mr.windows = res.windows;
        if (std::isfinite(res.bound)) mr.bound = res.bound;
        mr.infeasible_smgs = res.infeasible_smgs;
        const bool solved = res.has_solution();
        if (solved && !res.validation.ok()) {
            mr.status = "validation_failed";
            mr.violations = static_cast<int>(res.validation.violations.size());
        } else if (solved) {
            mr.status = res.heuristic ? "heuristic" : to_string(res.status);
            mr.included = true;
        } else {
            mr.status = res.solution.status.empty() ? to_string(res.status) : res.solution.status;
            mr.violations = static_cast<int>(res.validation.violations.size());
        }
        if (mr.included) {
            const auto& s = res.solution;
            mr.profit = s.profit;
            mr.risk = s.risk;
            mr.w = s.w;
            mr.total_profit = s.total_profit();
            mr.total_risk = s.total_risk();
            mr.soc_end = s.final_soc();
            soc = mr.soc_end;
            last_feasible = m;
            carrying = false;
        } else {
            mr.soc_end = soc;
            carrying = true;
        }
        if (opt.keep_schedules) run.schedules.push_back(mr.included ? res.solution : ScheduleSolution{});
        r.months.push_back(std::move(mr));
    }
    recompute_totals(r);
    return run;
}

enum class Metric { profit, risk };

inline const char* to_string(Metric m) { return m == Metric::profit ? "profit" : "risk"; }

struct ComparisonRow {
    std::string label; // month number, "year_total" or "year_mean"
    double a = 0.0;
    double b = 0.0;
    double abs_change = 0.0;
    std::optional<double> change_percent;
    std::string flag; // "", "zero_baseline", "negative_baseline", "excluded"

    bool operator==(const ComparisonRow&) const = default;
};

/// Percent change of a relative to b. year_total compares annual sums;
/// year_mean averages the monthly percents that are defined.
struct ComparisonTable {
    std::string name;
    std::string metric;
    int a = 0;
    int b = 0;
    std::vector<ComparisonRow> months;
    ComparisonRow year_total;
    ComparisonRow year_mean;

    bool operator==(const ComparisonTable&) const = default;
};

inline ComparisonRow compare_values(std::string label, double a, double b) {
    ComparisonRow row{std::move(label), a, b, a - b, std::nullopt, ""};
    if (b == 0.0) {
        row.flag = "zero_baseline";
        return row;
    }
    row.change_percent = 100.0 * (a - b) / std::abs(b);
    if (b < 0.0) row.flag = "negative_baseline";
    return row;
}

inline ComparisonTable compare(const ScenarioResult& a, const ScenarioResult& b, Metric metric, std::string name = {}) {
    if (a.months.size() != b.months.size()) throw DomainError("compared scenarios cover different months");
    ComparisonTable t;
    t.name = name.empty() ? std::to_string(a.scenario) + "_vs_" + std::to_string(b.scenario) : std::move(name);
    t.metric = to_string(metric);
    t.a = a.scenario;
    t.b = b.scenario;
    auto value = [&](const MonthResult& m) { return metric == Metric::profit ? m.total_profit : m.total_risk; };
    double sum_a = 0.0, sum_b = 0.0, sum_pct = 0.0;
    int n_pct = 0;
    for (std::size_t i = 0; i < a.months.size(); ++i) {
        const auto& ma = a.months[i];
        const auto& mb = b.months[i];
        if (ma.month != mb.month) throw DomainError("compared scenarios have misaligned months");
        const std::string label = std::to_string(ma.month);
        if (!ma.included || !mb.included) {
            t.months.push_back({label, value(ma), value(mb), 0.0, std::nullopt, "excluded"});
            continue;
        }
        auto row = compare_values(label, value(ma), value(mb));
        sum_a += row.a;
        sum_b += row.b;
        if (row.change_percent) {
            sum_pct += *row.change_percent;
            ++n_pct;
        }
        t.months.push_back(std::move(row));
    }
    t.year_total = compare_values("year_total", sum_a, sum_b);
    t.year_mean = {"year_mean", sum_a, sum_b, sum_a - sum_b, std::nullopt, ""};
    if (n_pct > 0) t.year_mean.change_percent = sum_pct / n_pct;
    else t.year_mean.flag = "zero_baseline";
    return t;
}

/// Standard tables for whichever of the four scenarios are present.
inline std::vector<ComparisonTable> standard_comparisons(const std::vector<ScenarioResult>& results) {
    auto find = [&](int id) -> const ScenarioResult* {
        for (const auto& r : results)
            if (r.scenario == id) return &r;
        return nullptr;
    };
    struct Pair {
        int a, b;
        const char* name;
    };
    const Pair pairs[] = {{1, 2, "covid_effect_mmg"},
                          {3, 4, "covid_effect_smg"},
                          {1, 3, "clustering_effect_covid"},
                          {2, 4, "clustering_effect_no_covid"}};
    std::vector<ComparisonTable> out;
    for (const auto& p : pairs) {
        const auto* a = find(p.a);
        const auto* b = find(p.b);
        if (!a || !b) continue;
        out.push_back(compare(*a, *b, Metric::profit, p.name));
        out.push_back(compare(*a, *b, Metric::risk, p.name));
    }
    return out;
}

} // namespace mgsched
