// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace mgsched;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Ledger {
    long checked = 0;
    std::vector<std::string> failures;

    void add(const std::string& where, const ValidationReport& rep) {
        ++checked;
        if (!rep.ok()) failures.push_back(where + ": " + rep.summary());
    }
    void add(const std::string& where, const MonthSolveResult& r) {
        if (r.has_solution()) add(where, r.validation);
    }
};

Ledger g_validated;
int g_failed = 0;

void report(const char* id, const char* title, const Outcome& o) {
    std::printf("[%s] %s %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++g_failed;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ------------------------------------------------------------------ AC1

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    int matched = 0;
    double worst = 0.0;
    int max_binaries = 0;
    std::string first_miss;
    for (std::uint64_t s = 1; s <= 50; ++s) {
        const auto c = fixtures::random_tiny_case(1000 + s, 6, 24);
        const auto inst = fixtures::build(c);
        int free = 0;
        for (int j : inst.binaries)
            if (inst.lp.lower[j] < inst.lp.upper[j]) ++free;
        max_binaries = std::max(max_binaries, free);
        const auto bb = solve_mip(inst);
        const auto bf = brute_force_mip(inst);
        g_validated.add("AC1 seed " + std::to_string(1000 + s) + " solve_mip", bb);
        g_validated.add("AC1 seed " + std::to_string(1000 + s) + " brute_force", bf);
        bool ok = false;
        if (bb.has_solution() && bf.has_solution() && bb.status == MipStatus::optimal &&
            bf.status == MipStatus::optimal) {
            const double d = std::abs(bb.solution.objective - bf.solution.objective);
            worst = std::max(worst, d);
            ok = d <= 1e-6;
        } else {
            ok = bb.status == MipStatus::infeasible && bf.status == MipStatus::infeasible;
        }
        if (ok) ++matched;
        else if (first_miss.empty()) first_miss = " first mismatch seed " + std::to_string(1000 + s);
    }
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = matched == 50 && t < 60.0;
    o.detail = std::to_string(matched) + "/50 match, max |diff| " + fmt("%.3g", worst) + ", up to " +
               std::to_string(max_binaries) + " free binaries, " + fmt("%.1f s", t) + " (limit 60 s)" + first_miss;
    return o;
}

// ------------------------------------------------------------------ AC3

double risk_identity_error(const SystemSpec& spec, int n, const SmgValues& profit, const SmgValues& risk) {
    double worst = 0.0;
    for (int z = 0; z < n; ++z) worst = std::max(worst, std::abs(risk[z] - std::max(0.0, spec.target[z] - profit[z])));
    return worst;
}

struct RiskTally {
    int cells = 0;
    int shortfall_cells = 0;
    double worst = 0.0;
};

Outcome risk_identity(const std::vector<ScenarioRun>& year, const SystemSpec& year_spec) {
    RiskTally exact, yearly;
    int runs = 0;
    for (int k = 0; k < 20; ++k) {
        SynthesisSpec synth;
        synth.seed = static_cast<std::uint64_t>(k + 1);
        const DataBundle data = synthetic_bundle(synth);
        const int month = 1 + k % 12;
        const auto sc = ScenarioConfig::from_id(1 + k % 4, TerminalSocRule::free, EdrMode::report_only);
        const auto in = scenario_month_inputs(data, sc.covid, month, 24);
        SystemSpec spec;
        for (int z = 0; z < spec.n_smg; ++z) spec.target[z] *= 24.0 / kMonthHours[month - 1];
        SmgValues soc{};
        for (int z = 0; z < spec.n_smg; ++z) soc[z] = spec.soc_max;
        SolverOptions opt;
        opt.node_limit = 400;
        const auto inst = build_instance(spec, sc, in, soc);
        const auto r = solve_mip(inst, opt);
        g_validated.add("AC3 run " + std::to_string(k + 1), r);
        if (!r.has_solution()) continue;
        ++runs;
        for (int z = 0; z < spec.n_smg; ++z) {
            ++exact.cells;
            if (r.solution.risk[z] > 1e-9) ++exact.shortfall_cells;
        }
        exact.worst = std::max(exact.worst, risk_identity_error(spec, spec.n_smg, r.solution.profit, r.solution.risk));
    }
    for (const auto& run : year)
        for (const auto& m : run.result.months) {
            if (!m.included) continue;
            for (int z = 0; z < run.result.n_smg; ++z) {
                ++yearly.cells;
                if (m.risk[z] > 1e-9) ++yearly.shortfall_cells;
            }
            yearly.worst = std::max(yearly.worst, risk_identity_error(year_spec, run.result.n_smg, m.profit, m.risk));
        }
    Outcome o;
    o.pass = runs == 20 && exact.worst <= 1e-6 && yearly.worst <= 1e-6;
    o.detail = std::to_string(runs) + "/20 exact 24 h runs with the risk block, " + std::to_string(exact.cells) +
               " cells (" + std::to_string(exact.shortfall_cells) + " in shortfall), max error " +
               fmt("%.3g", exact.worst) + "; year cells " + std::to_string(yearly.cells) + " (" +
               std::to_string(yearly.shortfall_cells) + " in shortfall), max error " + fmt("%.3g", yearly.worst);
    return o;
}

// ------------------------------------------------------------------ AC4, AC5

const ScenarioResult& by_id(const std::vector<ScenarioRun>& runs, int id) {
    for (const auto& r : runs)
        if (r.result.scenario == id) return r.result;
    throw std::runtime_error("missing scenario");
}

Outcome clustering_dominance(const std::vector<ScenarioRun>& year) {
    const auto& s1 = by_id(year, 1);
    const auto& s2 = by_id(year, 2);
    const auto& s3 = by_id(year, 3);
    const auto& s4 = by_id(year, 4);
    const bool feasible = s1.feasible() && s2.feasible() && s3.feasible() && s4.feasible();
    const double on = s1.annual_profit - s3.annual_profit;
    const double off = s2.annual_profit - s4.annual_profit;
    Outcome o;
    o.pass = feasible && on > 0.0 && off > 0.0;
    o.detail = "covid on MMG " + fmt("%.2f", s1.annual_profit) + " vs SMG " + fmt("%.2f", s3.annual_profit) + " (+" +
               fmt("%.2f%%", 100.0 * on / std::abs(s3.annual_profit)) + "); covid off MMG " +
               fmt("%.2f", s2.annual_profit) + " vs SMG " + fmt("%.2f", s4.annual_profit) + " (+" +
               fmt("%.2f%%", 100.0 * off / std::abs(s4.annual_profit)) + ")";
    return o;
}

Outcome covid_direction(const std::vector<ScenarioRun>& year) {
    Outcome o;
    std::ostringstream d;
    int months_checked = 0;
    for (auto [on_id, off_id] : {std::pair{1, 2}, std::pair{3, 4}}) {
        const auto& on = by_id(year, on_id);
        const auto& off = by_id(year, off_id);
        for (int m = 0; m < kMonths; ++m) {
            const auto& a = on.months[m];
            const auto& b = off.months[m];
            if (!(a.cvd < 1.0)) continue;
            ++months_checked;
            if (!a.included || !b.included || a.total_profit < b.total_profit) {
                o.pass = false;
                d << "scenario " << on_id << " month " << a.month << " " << a.total_profit << " < " << b.total_profit
                  << "; ";
            }
        }
        if (!(on.annual_profit > off.annual_profit)) o.pass = false;
        d << "scenario " << on_id << " vs " << off_id << " annual " << fmt("%.2f", on.annual_profit) << " vs "
          << fmt("%.2f", off.annual_profit) << "; ";
    }
    d << months_checked << " month pairs with CVD < 1 checked";
    o.detail = d.str();
    return o;
}

// ------------------------------------------------------------------ AC6

Outcome load_monotonicity(const DataBundle& data) {
    const SystemSpec spec;
    const auto sc = ScenarioConfig::from_id(2, TerminalSocRule::free, EdrMode::report_only);
    SmgValues soc{};
    for (int z = 0; z < spec.n_smg; ++z) soc[z] = spec.soc_max;
    const SolverOptions opt;
    Outcome o;
    std::ostringstream d;
    int months = 0;
    for (int m = 1; m <= kMonths; ++m) {
        const auto base = scenario_month_inputs(data, false, m);
        double prev = -kInf;
        bool month_ok = true;
        std::ostringstream row;
        for (double alpha : {1.0, 0.95, 0.9}) {
            const auto r = solve_month_chunked(spec, sc, base.with_load_scaled(alpha), soc, opt);
            g_validated.add("AC6 month " + std::to_string(m) + " alpha " + fmt("%.2f", alpha), r);
            const double v = r.has_solution() ? r.solution.total_profit() : -kInf;
            if (!r.has_solution() || v < prev) month_ok = false;
            prev = v;
            row << ' ' << fmt("%.2f", v);
        }
        if (month_ok) ++months;
        else {
            o.pass = false;
            d << "month " << m << ":" << row.str() << "; ";
        }
    }
    d << months << "/12 months non-decreasing over alpha 1, 0.95, 0.9";
    o.detail = d.str();
    return o;
}

// ------------------------------------------------------------------ AC7

Outcome demand_model(const DataBundle& data) {
    Outcome o;
    std::ostringstream d;
    // published monthly factors
    const double published[kMonths] = {0.948, 1.01, 0.944, 0.933, 0.924, 1.004, 1.002, 0.996, 0.927, 0.982, 0.956, 1.019};
    const auto table = load_covid_table_csv(std::filesystem::path(MGSCHED_SOURCE_DIR) / "data" / "covid_factors.csv");
    const auto rows = parse_covid_table_csv(
        text::read_file(std::filesystem::path(MGSCHED_SOURCE_DIR) / "data" / "covid_factors.csv"));
    int exact = 0;
    for (int m = 0; m < kMonths; ++m) {
        if (table.cvd[m] == published[m] && CovidFactorTable::standard().cvd[m] == published[m] &&
            std::abs(rows[m].cvd - (1.0 + rows[m].load_change_percent / 100.0)) < 1e-12)
            ++exact;
    }
    if (exact != kMonths) o.pass = false;
    d << exact << "/12 CVD values exact";

    Rng rng(7);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double eps = rng.uniform(-0.16, -0.08);
        const double load = rng.uniform(1.0, 20.0);
        const double price = rng.uniform(0.05, 0.3);
        const auto f = fit_demand_function(eps, load, price);
        const double load_err = std::abs(f(price) - load) / load;
        const double price_err = std::abs(price_from_load(f, load).price - price) / price;
        const double eps_err = std::abs(point_elasticity(f, price).value - eps);
        worst = std::max({worst, load_err, price_err, eps_err});
    }
    if (!(worst < 1e-9)) o.pass = false;
    d << "; fit/inversion max relative error " << fmt("%.3g", worst) << " over 1000 triples";

    long hours = 0;
    double worst_ratio = 0.0;
    for (int m = 1; m <= kMonths; ++m)
        for (bool covid : {true, false}) {
            const auto in = scenario_month_inputs(data, covid, m);
            for (int t = 0; t < in.hours(); ++t) {
                ++hours;
                if (!(in.buy_price[t] > 0.0)) {
                    worst_ratio = kInf;
                    continue;
                }
                worst_ratio = std::max(worst_ratio, std::abs(in.grid_sell_price[t] / in.buy_price[t] - 1.1));
            }
        }
    if (!(worst_ratio < 1e-12)) o.pass = false;
    d << "; sell/buy ratio max |r - 1.1| " << fmt("%.3g", worst_ratio) << " over " << hours << " hours";
    o.detail = d.str();
    return o;
}

// ------------------------------------------------------------------ AC8

MonthInputs toy_month() {
    MonthInputs in;
    in.month = 1;
    in.cvd = 1.0;
    const double pi = std::acos(-1.0);
    for (int t = 0; t < 72; ++t) {
        const int h = t % 24;
        const double sun = std::max(0.0, std::sin(pi * (h - 6) / 12.0));
        in.load.push_back({7.0 + 1.5 * std::sin(pi * (h - 9) / 12.0), 0.0, 0.0});
        in.pv_max.push_back({7.0 * sun, 0.0, 0.0});
        in.wt_max.push_back({1.0 + 0.5 * std::cos(0.7 * t), 0.0, 0.0});
        const double price = h >= kOnPeakStart && h < kOnPeakEnd ? 0.16 : 0.09;
        in.buy_price.push_back(price);
        in.grid_sell_price.push_back(1.1 * price);
        in.internal_price.push_back(price);
    }
    return in;
}

Outcome chunked_soundness(double year_seconds) {
    SystemSpec spec;
    spec.n_smg = 1;
    spec.target[0] *= 72.0 / kMonthHours[0];
    const auto sc = ScenarioConfig::from_id(2, TerminalSocRule::free, EdrMode::report_only);
    const auto in = toy_month();
    const SmgValues soc{spec.soc_max, 0.0, 0.0};
    SolverOptions opt;
    const auto t0 = Clock::now();
    const auto chunked = solve_month_chunked(spec, sc, in, soc, opt);
    const double tc = seconds_since(t0);
    const auto t1 = Clock::now();
    const auto exact = solve_mip(build_instance(spec, sc, in, soc), opt);
    const double te = seconds_since(t1);
    g_validated.add("AC8 chunked", chunked);
    g_validated.add("AC8 exact", exact);
    Outcome o;
    const bool both = chunked.has_solution() && exact.has_solution();
    const double gap = both ? exact.solution.objective - chunked.solution.objective : kInf;
    o.pass = both && exact.status == MipStatus::optimal && chunked.validation.ok() && exact.validation.ok() &&
             gap >= -1e-6 && year_seconds < 600.0;
    std::ostringstream d;
    d << "72 h toy: chunked " << fmt("%.6f", chunked.solution.objective) << " (" << chunked.windows << " windows, "
      << fmt("%.2f s", tc) << ") vs exact " << to_string(exact.status) << ' ' << fmt("%.6f", exact.solution.objective)
      << " (" << exact.nodes << " nodes, " << fmt("%.2f s", te) << "), gap " << fmt("%.6f", gap) << " ("
      << fmt("%.4f%%", 100.0 * gap / std::max(1e-12, std::abs(exact.solution.objective))) << "), validator "
      << (chunked.validation.ok() ? "clean" : "dirty") << '/' << (exact.validation.ok() ? "clean" : "dirty")
      << "; full-year 4-scenario chunked run " << fmt("%.1f s", year_seconds) << " (limit 600 s)";
    o.detail = d.str();
    return o;
}

// ------------------------------------------------------------------ AC9

std::map<std::string, std::string> read_tree(const std::filesystem::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            files[std::filesystem::relative(e.path(), dir).generic_string()] = text::read_file(e.path());
    return files;
}

Outcome determinism() {
    std::map<std::string, std::string> trees[2];
    for (int k = 0; k < 2; ++k) {
        auto c = parse_config("schema_version = 1\nseed = 3\nhorizon_hours = 48\nwrite_solutions = true\n");
        c.out = fixtures::scratch_dir("acceptance_ac9_" + std::to_string(k));
        std::ostringstream out, log;
        cmd_run(c, out, log);
        trees[k] = read_tree(c.out);
        trees[k]["<stdout>"] = out.str();
    }
    Outcome o;
    std::size_t bytes = 0;
    for (const auto& [name, body] : trees[0]) bytes += body.size();
    o.pass = !trees[0].empty() && trees[0] == trees[1];
    o.detail = std::to_string(trees[0].size()) + " outputs, " + std::to_string(bytes) + " bytes, " +
               (o.pass ? "byte-identical" : "differ");
    return o;
}

} // namespace

int main() {
    const auto start = Clock::now();
    report("AC1", "oracle equivalence", oracle_equivalence());

    const DataBundle data = synthetic_bundle();
    const SystemSpec spec;
    RunOptions ro;
    std::vector<ScenarioRun> year;
    const auto ty = Clock::now();
    for (int id = 1; id <= 4; ++id)
        year.push_back(run_scenario(spec, ScenarioConfig::from_id(id, TerminalSocRule::free, EdrMode::report_only),
                                    data, ro));
    const double year_seconds = seconds_since(ty);
    for (const auto& run : year) {
        for (const auto& m : run.result.months)
            if (m.status == "validation_failed")
                g_validated.failures.push_back("year scenario " + std::to_string(run.result.scenario) + " month " +
                                               std::to_string(m.month));
        for (std::size_t k = 0; k < run.schedules.size(); ++k) {
            if (run.schedules[k].hours() == 0) continue;
            const auto sc = ScenarioConfig::from_id(run.result.scenario, TerminalSocRule::free, EdrMode::report_only);
            const auto in = scenario_month_inputs(data, sc.covid, run.schedules[k].month);
            const auto inst = build_instance(spec, sc, in, run.schedules[k].initial_soc);
            g_validated.add("year scenario " + std::to_string(run.result.scenario) + " month " +
                                std::to_string(run.schedules[k].month),
                            validate_solution(inst, run.schedules[k]));
        }
    }

    report("AC3", "risk identity", risk_identity(year, spec));
    report("AC4", "clustering dominance", clustering_dominance(year));
    report("AC5", "COVID direction", covid_direction(year));
    report("AC6", "load monotonicity", load_monotonicity(data));
    report("AC7", "demand model", demand_model(data));
    report("AC8", "chunked soundness", chunked_soundness(year_seconds));
    report("AC9", "determinism", determinism());

    Outcome v;
    v.pass = g_validated.failures.empty() && g_validated.checked > 0;
    v.detail = std::to_string(g_validated.checked) + " solutions validated at tol 1e-6, " +
               std::to_string(g_validated.failures.size()) + " with violations";
    for (const auto& f : g_validated.failures) v.detail += "\n    " + f;
    report("AC2", "constraint validator", v);

    std::printf("%d criteria failed, %.1f s total\n", g_failed, seconds_since(start));
    return g_failed == 0 ? 0 : 1;
}
