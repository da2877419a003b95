#pragma once

// Monthly scheduling MIP: instance assembly, solution extraction, profit
// accounting and an independent constraint validator.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mgsched/demand.hpp"
#include "mgsched/error.hpp"
#include "mgsched/lp.hpp"
#include "mgsched/mip.hpp"
#include "mgsched/profiles.hpp"
#include "mgsched/system.hpp"

namespace mgsched {

using SmgValues = std::array<double, kMaxSmg>;
using LineValues = std::array<std::array<double, kMaxSmg>, kMaxSmg>;

/// Hourly data of one month (or a window of it). Load is before the COVID factor.
struct MonthInputs {
    int month = 1;
    double cvd = 1.0;
    std::vector<SmgValues> load;
    std::vector<SmgValues> pv_max;
    std::vector<SmgValues> wt_max;
    std::vector<double> buy_price;
    std::vector<double> grid_sell_price;
    std::vector<double> internal_price;

    int hours() const { return static_cast<int>(load.size()); }

    void validate(int n_smg) const {
        const auto t = load.size();
        if (pv_max.size() != t || wt_max.size() != t || buy_price.size() != t || grid_sell_price.size() != t ||
            internal_price.size() != t)
            throw SchemaError("month inputs have inconsistent lengths");
        if (!(cvd > 0.0)) throw DomainError("COVID factor must be positive");
        for (std::size_t h = 0; h < t; ++h) {
            for (int z = 0; z < n_smg; ++z)
                if (!(load[h][z] >= 0.0) || !(pv_max[h][z] >= 0.0) || !(wt_max[h][z] >= 0.0))
                    throw DomainError("loads and generation limits must be >= 0");
            if (!(buy_price[h] >= 0.0) || !(grid_sell_price[h] >= 0.0) || !(internal_price[h] >= 0.0))
                throw DomainError("prices must be >= 0");
        }
    }

    MonthInputs slice(int t0, int len) const {
        if (t0 < 0 || len < 0 || t0 + len > hours()) throw DomainError("window outside the month");
        MonthInputs w;
        w.month = month;
        w.cvd = cvd;
        auto cut = [&](const auto& v) { return std::vector(v.begin() + t0, v.begin() + t0 + len); };
        w.load = cut(load);
        w.pv_max = cut(pv_max);
        w.wt_max = cut(wt_max);
        w.buy_price = cut(buy_price);
        w.grid_sell_price = cut(grid_sell_price);
        w.internal_price = cut(internal_price);
        return w;
    }

    MonthInputs with_load_scaled(double alpha) const {
        MonthInputs w = *this;
        for (auto& row : w.load)
            for (double& v : row) v *= alpha;
        return w;
    }
};

inline MonthInputs make_month_inputs(const YearCalendar& cal, const YearProfiles& profiles, const TariffSchedule& tariff,
                                     const CovidFactorTable& cvd, bool covid, int month) {
    const auto& mc = cal.month(month);
    MonthInputs in;
    in.month = month;
    in.cvd = cvd.factor(month, covid);
    in.load.resize(mc.hours);
    in.pv_max.resize(mc.hours);
    in.wt_max.resize(mc.hours);
    for (int z = 0; z < kMaxSmg; ++z) {
        auto l = profiles.load[z].month(mc);
        auto p = profiles.pv_max[z].month(mc);
        auto w = profiles.wt_max[z].month(mc);
        for (int t = 0; t < mc.hours; ++t) {
            in.load[t][z] = l[t];
            in.pv_max[t][z] = p[t];
            in.wt_max[t][z] = w[t];
        }
    }
    in.buy_price.resize(mc.hours);
    in.grid_sell_price.resize(mc.hours);
    in.internal_price.resize(mc.hours);
    for (int t = 0; t < mc.hours; ++t) {
        in.buy_price[t] = tariff.buy(month, t);
        in.grid_sell_price[t] = tariff.grid_sell(month, t);
        in.internal_price[t] = tariff.internal(month, t);
    }
    return in;
}

/// Upper bound on what an SMG set can earn or spend in the window, $.
inline double gross_trade_bound(const SystemSpec& spec, const MonthInputs& in) {
    double s = 0.0;
    for (int t = 0; t < in.hours(); ++t)
        for (int z = 0; z < spec.n_smg; ++z) {
            s += spec.line_max[z][z] * std::max(in.buy_price[t], in.grid_sell_price[t]);
            for (int y = 0; y < spec.n_smg; ++y)
                if (y != z) s += spec.line_max[z][y] * std::max(in.buy_price[t], in.internal_price[t]);
        }
    return s;
}

inline double derive_big_m(const SystemSpec& spec, const MonthInputs& in) {
    if (spec.big_m) return *spec.big_m;
    double tmax = 0.0;
    for (int z = 0; z < spec.n_smg; ++z) tmax = std::max(tmax, std::abs(spec.target[z]));
    return 10.0 * (tmax + gross_trade_bound(spec, in));
}

struct BuildOptions {
    bool include_risk = true;
    bool tighten_lines = true;
};

struct MonthlyInstance {
    SystemSpec spec;
    ScenarioConfig scenario;
    MonthInputs inputs;
    SmgValues initial_soc{};
    bool has_risk = true;
    double big_m = 0.0;

    LinearProgram lp;
    std::vector<std::array<int, kMaxSmg>> pv, wt, bat, soc;
    // Internal flows are shared: buy[z][y] and sell[y][z] are the same column.
    std::vector<std::array<std::array<int, kMaxSmg>, kMaxSmg>> buy, sell;
    // x[z][z]: grid line binary; x[z][y], z < y: internal pair binary; -1 elsewhere.
    std::vector<std::array<std::array<int, kMaxSmg>, kMaxSmg>> x;
    std::array<int, kMaxSmg> risk{-1, -1, -1};
    std::array<int, kMaxSmg> w{-1, -1, -1};

    std::vector<int> binaries;
    std::vector<int> priority;
    std::vector<RoundingHint> hints;
    std::vector<int> rounding_class;
    std::vector<std::vector<int>> hour_groups;

    int hours() const { return inputs.hours(); }
    int n() const { return spec.n_smg; }
    double load(int t, int z) const { return inputs.cvd * inputs.load[t][z]; }

    MipProblem mip() const { return {&lp, binaries, priority, hints, rounding_class, hour_groups}; }

    /// OF_z as a linear expression over the columns.
    std::vector<std::pair<int, double>> profit_terms(int z) const {
        std::vector<std::pair<int, double>> terms;
        for (int t = 0; t < hours(); ++t) {
            for (int y = 0; y < n(); ++y) {
                const double sp = y == z ? inputs.grid_sell_price[t] : inputs.internal_price[t];
                terms.emplace_back(sell[t][z][y], sp);
                terms.emplace_back(buy[t][z][y], -inputs.buy_price[t]);
            }
        }
        return terms;
    }
};

inline std::string var_name(const char* base, int z, int t) {
    return std::string(base) + "_" + std::to_string(z + 1) + "_" + std::to_string(t + 1);
}

inline std::string var_name(const char* base, int z, int y, int t) {
    return std::string(base) + "_" + std::to_string(z + 1) + "_" + std::to_string(y + 1) + "_" + std::to_string(t + 1);
}

inline MonthlyInstance build_instance(const SystemSpec& spec, const ScenarioConfig& scenario, const MonthInputs& inputs,
                                      const SmgValues& initial_soc, const BuildOptions& opts = {}) {
    spec.validate();
    inputs.validate(spec.n_smg);
    const int n = spec.n_smg;
    for (int z = 0; z < n; ++z)
        if (!(initial_soc[z] >= spec.soc_min - 1e-12 && initial_soc[z] <= spec.soc_max + 1e-12))
            throw DomainError("initial SOC of SMG" + std::to_string(z + 1) + " outside [soc_min, soc_max]");

    MonthlyInstance inst;
    inst.spec = spec;
    inst.scenario = scenario;
    inst.inputs = inputs;
    inst.initial_soc = initial_soc;
    inst.has_risk = opts.include_risk;
    inst.big_m = derive_big_m(spec, inputs);
    const int T = inputs.hours();
    const bool mmg = scenario.architecture == Architecture::mmg;
    auto& lp = inst.lp;
    std::array<int, kMaxSmg> none{-1, -1, -1};
    inst.pv.assign(T, none);
    inst.wt.assign(T, none);
    inst.bat.assign(T, none);
    inst.soc.assign(T, none);
    std::array<std::array<int, kMaxSmg>, kMaxSmg> none2{none, none, none};
    inst.buy.assign(T, none2);
    inst.sell.assign(T, none2);
    inst.x.assign(T, none2);

    const int bin_class_line = 0;
    const int bin_class_risk = 1;
    auto add_binary = [&](int col, int prio, int cls, RoundingHint hint) {
        inst.binaries.push_back(col);
        inst.priority.push_back(prio);
        inst.rounding_class.push_back(cls);
        inst.hints.push_back(std::move(hint));
    };

    for (int t = 0; t < T; ++t) {
        const int first_binary = static_cast<int>(inst.binaries.size());
        for (int z = 0; z < n; ++z) {
            inst.pv[t][z] = lp.add_column(0.0, inputs.pv_max[t][z], 0.0, var_name("pv", z, t));
            inst.wt[t][z] = lp.add_column(0.0, inputs.wt_max[t][z], 0.0, var_name("wt", z, t));
            inst.bat[t][z] = lp.add_column(spec.bat_min[z], spec.bat_max[z], 0.0, var_name("bat", z, t));
            double slo = spec.soc_min, shi = spec.soc_max;
            if (t == T - 1 && scenario.terminal_soc_rule == TerminalSocRule::return_to_initial)
                slo = shi = initial_soc[z];
            inst.soc[t][z] = lp.add_column(slo, shi, 0.0, var_name("soc", z, t));
        }
        for (int z = 0; z < n; ++z) {
            inst.buy[t][z][z] = lp.add_column(0.0, spec.line_max[z][z], -inputs.buy_price[t], var_name("buy", z, z, t));
            inst.sell[t][z][z] =
                lp.add_column(0.0, spec.line_max[z][z], inputs.grid_sell_price[t], var_name("sell", z, z, t));
        }
        for (int z = 0; z < n; ++z)
            for (int y = z + 1; y < n; ++y) {
                const double cap = mmg ? spec.line_max[z][y] : 0.0;
                // flow y -> z: z buys, y sells
                const int a = lp.add_column(0.0, cap, inputs.internal_price[t] - inputs.buy_price[t],
                                            var_name("buy", z, y, t));
                // flow z -> y: z sells, y buys
                const int c = lp.add_column(0.0, cap, inputs.internal_price[t] - inputs.buy_price[t],
                                            var_name("sell", z, y, t));
                inst.buy[t][z][y] = a;
                inst.sell[t][y][z] = a;
                inst.sell[t][z][y] = c;
                inst.buy[t][y][z] = c;
            }
        for (int z = 0; z < n; ++z) {
            const int col = lp.add_column(0.0, 1.0, 0.0, var_name("X", z, z, t));
            inst.x[t][z][z] = col;
            add_binary(col, 0, bin_class_line, {0.0, {{inst.buy[t][z][z], 1.0}, {inst.sell[t][z][z], -1.0}}});
        }
        for (int z = 0; z < n; ++z)
            for (int y = z + 1; y < n; ++y) {
                const int col = lp.add_column(0.0, mmg ? 1.0 : 0.0, 0.0, var_name("X", z, y, t));
                inst.x[t][z][y] = col;
                add_binary(col, 0, bin_class_line, {0.0, {{inst.buy[t][z][y], 1.0}, {inst.sell[t][z][y], -1.0}}});
            }
        auto& group = inst.hour_groups.emplace_back();
        for (int k = first_binary; k < static_cast<int>(inst.binaries.size()); ++k) group.push_back(k);
    }

    for (int t = 0; t < T; ++t)
        for (int z = 0; z < n; ++z) {
            // CVD * PL = PV + WT + Pbat + sum_y (buy_zy - sell_zy)
            std::vector<std::pair<int, double>> row{{inst.pv[t][z], 1.0}, {inst.wt[t][z], 1.0}, {inst.bat[t][z], 1.0}};
            for (int y = 0; y < n; ++y) {
                row.emplace_back(inst.buy[t][z][y], 1.0);
                row.emplace_back(inst.sell[t][z][y], -1.0);
            }
            lp.add_row(std::move(row), RowSense::eq, inst.load(t, z), var_name("balance", z, t));

            // SOC_t - SOC_{t-1} + Pbat_t / S = 0
            std::vector<std::pair<int, double>> srow{{inst.soc[t][z], 1.0}, {inst.bat[t][z], 1.0 / spec.base_power[z]}};
            double rhs = 0.0;
            if (t > 0) srow.emplace_back(inst.soc[t - 1][z], -1.0);
            else rhs = initial_soc[z];
            lp.add_row(std::move(srow), RowSense::eq, rhs, var_name("soc_dyn", z, t));

            // grid line complementarity with implied capacities
            const double line = spec.line_max[z][z];
            double mb = line, ms = line;
            if (opts.tighten_lines) {
                double internal = 0.0;
                if (mmg)
                    for (int y = 0; y < n; ++y)
                        if (y != z) internal += spec.line_max[z][y];
                const double demand = inst.load(t, z);
                const double supply = inputs.pv_max[t][z] + inputs.wt_max[t][z] + spec.bat_max[z];
                mb = std::min(line, demand - spec.bat_min[z] + internal);
                ms = std::min(line, std::max(0.0, supply + internal - demand));
            }
            const int xc = inst.x[t][z][z];
            lp.add_row({{inst.buy[t][z][z], 1.0}, {xc, -mb}}, RowSense::le, 0.0, var_name("grid_buy", z, t));
            lp.add_row({{inst.sell[t][z][z], 1.0}, {xc, ms}}, RowSense::le, ms, var_name("grid_sell", z, t));
        }

    for (int t = 0; t < T; ++t)
        for (int z = 0; z < n; ++z)
            for (int y = z + 1; y < n; ++y) {
                const double cap = mmg ? spec.line_max[z][y] : 0.0;
                const int xc = inst.x[t][z][y];
                lp.add_row({{inst.buy[t][z][y], 1.0}, {xc, -cap}}, RowSense::le, 0.0, var_name("pair_buy", z, y, t));
                lp.add_row({{inst.sell[t][z][y], 1.0}, {xc, cap}}, RowSense::le, cap, var_name("pair_sell", z, y, t));
            }

    if (opts.include_risk) {
        const double M = inst.big_m;
        const bool hard = scenario.edr_mode == EdrMode::hard;
        for (int z = 0; z < n; ++z) {
            const std::string id = std::to_string(z + 1);
            inst.risk[z] = lp.add_column(0.0, hard ? std::min(M, spec.edr_cap) : M, 0.0, "risk_" + id);
            inst.w[z] = lp.add_column(0.0, 1.0, 0.0, "W_" + id);
            auto of = inst.profit_terms(z);
            RoundingHint hint{spec.target[z], {}};
            for (auto [j, a] : of) hint.terms.emplace_back(j, -a);
            add_binary(inst.w[z], hard ? 1 : 0, bin_class_risk, std::move(hint));

            lp.add_row({{inst.risk[z], 1.0}, {inst.w[z], -M}}, RowSense::le, 0.0, "risk_cap_" + id);
            auto lo_row = of;
            lo_row.emplace_back(inst.risk[z], 1.0);
            lp.add_row(lo_row, RowSense::ge, spec.target[z], "risk_lo_" + id);
            auto hi_row = of;
            hi_row.emplace_back(inst.risk[z], 1.0);
            hi_row.emplace_back(inst.w[z], M);
            lp.add_row(hi_row, RowSense::le, spec.target[z] + M, "risk_hi_" + id);
        }
    }
    return inst;
}

inline MonthlyInstance build_month_instance(const SystemSpec& spec, const ScenarioConfig& scenario,
                                            const YearCalendar& cal, const YearProfiles& profiles,
                                            const TariffSchedule& tariff, const CovidFactorTable& cvd, int month,
                                            const SmgValues& initial_soc) {
    return build_instance(spec, scenario, make_month_inputs(cal, profiles, tariff, cvd, scenario.covid, month),
                          initial_soc);
}

// ---------------------------------------------------------------------------
// Solutions

struct ScheduleSolution {
    int month = 1;
    int n_smg = kMaxSmg;
    SmgValues initial_soc{};
    std::vector<SmgValues> pv, wt, bat, soc;
    std::vector<LineValues> buy, sell, x;
    SmgValues profit{};
    SmgValues risk{};
    SmgValues w{};
    double objective = 0.0;
    bool heuristic = false;
    std::string status = "optimal";

    int hours() const { return static_cast<int>(pv.size()); }
    double total_profit() const {
        double s = 0.0;
        for (int z = 0; z < n_smg; ++z) s += profit[z];
        return s;
    }
    double total_risk() const {
        double s = 0.0;
        for (int z = 0; z < n_smg; ++z) s += risk[z];
        return s;
    }

    void resize(int hours) {
        pv.assign(hours, {});
        wt.assign(hours, {});
        bat.assign(hours, {});
        soc.assign(hours, {});
        buy.assign(hours, {});
        sell.assign(hours, {});
        x.assign(hours, {});
    }

    /// Appends the hours of a later window.
    void append(const ScheduleSolution& o) {
        auto cat = [](auto& a, const auto& b) { a.insert(a.end(), b.begin(), b.end()); };
        cat(pv, o.pv);
        cat(wt, o.wt);
        cat(bat, o.bat);
        cat(soc, o.soc);
        cat(buy, o.buy);
        cat(sell, o.sell);
        cat(x, o.x);
    }

    SmgValues final_soc() const {
        if (soc.empty()) return initial_soc;
        return soc.back();
    }
};

struct ProfitBreakdown {
    SmgValues smg{};
    double month = 0.0;
    double grid_only = 0.0; // grid sales minus grid purchases
};

/// OF_z = sum_t [grid sell * C_sell_grid + internal sell * C_internal - all buys * C_buy].
inline ProfitBreakdown profit_accounting(const ScheduleSolution& sol, std::span<const double> buy_price,
                                         std::span<const double> grid_sell_price, std::span<const double> internal_price) {
    ProfitBreakdown out;
    const int T = sol.hours();
    if (buy_price.size() < static_cast<std::size_t>(T) || grid_sell_price.size() < static_cast<std::size_t>(T) ||
        internal_price.size() < static_cast<std::size_t>(T))
        throw SchemaError("price vectors shorter than the solution");
    for (int t = 0; t < T; ++t)
        for (int z = 0; z < sol.n_smg; ++z) {
            out.smg[z] += sol.sell[t][z][z] * grid_sell_price[t];
            out.grid_only += sol.sell[t][z][z] * grid_sell_price[t] - sol.buy[t][z][z] * buy_price[t];
            for (int y = 0; y < sol.n_smg; ++y) {
                if (y != z) out.smg[z] += sol.sell[t][z][y] * internal_price[t];
                out.smg[z] -= sol.buy[t][z][y] * buy_price[t];
            }
        }
    for (int z = 0; z < sol.n_smg; ++z) out.month += out.smg[z];
    return out;
}

inline ProfitBreakdown profit_accounting(const ScheduleSolution& sol, const TariffSchedule& tariff) {
    const auto& buy = tariff.buy_price.at(sol.month - 1);
    std::vector<double> grid(buy.size());
    for (std::size_t t = 0; t < buy.size(); ++t) grid[t] = tariff.sell_bonus * buy[t];
    return profit_accounting(sol, buy, grid, buy);
}

inline ProfitBreakdown profit_accounting(const ScheduleSolution& sol, const MonthInputs& in) {
    return profit_accounting(sol, in.buy_price, in.grid_sell_price, in.internal_price);
}

/// Fills risk and W from the profits: risk = max(0, target - OF), W = 1 iff OF < target.
inline void settle_risk(ScheduleSolution& sol, const SystemSpec& spec) {
    for (int z = 0; z < sol.n_smg; ++z) {
        const double shortfall = spec.target[z] - sol.profit[z];
        sol.risk[z] = std::max(0.0, shortfall);
        sol.w[z] = shortfall > 0.0 ? 1.0 : 0.0;
    }
}

inline ScheduleSolution extract_solution(const MonthlyInstance& inst, const std::vector<double>& xv) {
    if (xv.size() != static_cast<std::size_t>(inst.lp.num_cols())) throw SolverError("solution vector size mismatch");
    ScheduleSolution s;
    s.month = inst.inputs.month;
    s.n_smg = inst.n();
    s.initial_soc = inst.initial_soc;
    const int T = inst.hours();
    s.resize(T);
    for (int t = 0; t < T; ++t)
        for (int z = 0; z < inst.n(); ++z) {
            s.pv[t][z] = xv[inst.pv[t][z]];
            s.wt[t][z] = xv[inst.wt[t][z]];
            s.bat[t][z] = xv[inst.bat[t][z]];
            s.soc[t][z] = xv[inst.soc[t][z]];
            for (int y = 0; y < inst.n(); ++y) {
                s.buy[t][z][y] = xv[inst.buy[t][z][y]];
                s.sell[t][z][y] = xv[inst.sell[t][z][y]];
                if (y == z) s.x[t][z][z] = xv[inst.x[t][z][z]];
                else if (z < y) s.x[t][z][y] = xv[inst.x[t][z][y]];
                else s.x[t][z][y] = 1.0 - xv[inst.x[t][y][z]];
            }
        }
    auto pb = profit_accounting(s, inst.inputs);
    s.profit = pb.smg;
    s.objective = inst.lp.objective_value(xv);
    if (inst.has_risk) {
        for (int z = 0; z < inst.n(); ++z) {
            s.risk[z] = xv[inst.risk[z]];
            s.w[z] = xv[inst.w[z]];
        }
    } else {
        settle_risk(s, inst.spec);
    }
    return s;
}

/// Column vector for an instance from a schedule (inverse of extract_solution).
inline std::vector<double> to_column_values(const MonthlyInstance& inst, const ScheduleSolution& s) {
    if (s.hours() != inst.hours() || s.n_smg != inst.n()) throw SolverError("solution does not match instance shape");
    std::vector<double> xv(inst.lp.num_cols(), 0.0);
    for (int t = 0; t < inst.hours(); ++t)
        for (int z = 0; z < inst.n(); ++z) {
            xv[inst.pv[t][z]] = s.pv[t][z];
            xv[inst.wt[t][z]] = s.wt[t][z];
            xv[inst.bat[t][z]] = s.bat[t][z];
            xv[inst.soc[t][z]] = s.soc[t][z];
            for (int y = 0; y < inst.n(); ++y) {
                if (z <= y) {
                    xv[inst.buy[t][z][y]] = s.buy[t][z][y];
                    xv[inst.sell[t][z][y]] = s.sell[t][z][y];
                    xv[inst.x[t][z][y]] = s.x[t][z][y];
                }
            }
        }
    if (inst.has_risk)
        for (int z = 0; z < inst.n(); ++z) {
            xv[inst.risk[z]] = s.risk[z];
            xv[inst.w[z]] = s.w[z];
        }
    return xv;
}

/// Rebuilds a schedule from per-column values keyed by column name.
inline ScheduleSolution schedule_from_named_values(const MonthlyInstance& inst,
                                                   const std::vector<std::pair<std::string, double>>& values,
                                                   std::vector<std::string>* unknown = nullptr) {
    std::vector<double> xv(inst.lp.num_cols(), 0.0);
    std::vector<char> seen(inst.lp.num_cols(), 0);
    std::unordered_map<std::string, int> index;
    for (int j = 0; j < inst.lp.num_cols(); ++j) index.emplace(inst.lp.col_names[j], j);
    for (const auto& [name, v] : values) {
        auto it = index.find(name);
        if (it == index.end()) {
            if (unknown) unknown->push_back(name);
            continue;
        }
        xv[it->second] = v;
        seen[it->second] = 1;
    }
    for (int j = 0; j < inst.lp.num_cols(); ++j)
        if (!seen[j] && inst.lp.lower[j] != inst.lp.upper[j])
            throw SchemaError("solution has no value for column " + inst.lp.col_names[j]);
        else if (!seen[j])
            xv[j] = inst.lp.lower[j];
    return extract_solution(inst, xv);
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::string constraint;
    int hour = 0; // 1-based, 0 when not hour-specific
    int smg = 0;  // 1-based
    int peer = 0; // 1-based line partner, 0 when n/a
    double amount = 0.0;

    std::string describe() const {
        std::ostringstream os;
        os << constraint;
        if (smg) os << " smg=" << smg;
        if (peer) os << " peer=" << peer;
        if (hour) os << " hour=" << hour;
        os << " amount=" << amount;
        return os.str();
    }
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::size_t count(const std::string& constraint) const {
        return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                      [&](const Violation& v) { return v.constraint == constraint; }));
    }
    std::string summary() const {
        if (ok()) return "clean";
        std::string s = std::to_string(violations.size()) + " violation(s)";
        for (const auto& v : violations) s += "\n  " + v.describe();
        return s;
    }
};

/// Checks a schedule against the model equations using only the instance's
/// data, never its coefficient rows.
inline ValidationReport validate_solution(const MonthlyInstance& inst, const ScheduleSolution& sol, double tol = 1e-6) {
    ValidationReport rep;
    auto flag = [&](const char* what, int t, int z, int y, double amount) {
        rep.violations.push_back({what, t >= 0 ? t + 1 : 0, z >= 0 ? z + 1 : 0, y >= 0 ? y + 1 : 0, amount});
    };
    const int T = inst.hours();
    const int n = inst.n();
    const auto& spec = inst.spec;
    if (sol.hours() != T || sol.n_smg != n || static_cast<int>(sol.soc.size()) != T ||
        static_cast<int>(sol.buy.size()) != T || static_cast<int>(sol.x.size()) != T) {
        flag("dimensions", -1, -1, -1, static_cast<double>(sol.hours() - T));
        return rep;
    }
    const bool mmg = inst.scenario.architecture == Architecture::mmg;
    auto excess = [&](double v, double lo, double hi) { return v < lo ? lo - v : (v > hi ? v - hi : 0.0); };
    auto binary_gap = [](double v) { return std::min(std::abs(v), std::abs(v - 1.0)); };

    SmgValues cumulative{};
    for (int t = 0; t < T; ++t) {
        for (int z = 0; z < n; ++z) {
            if (double e = excess(sol.pv[t][z], 0.0, inst.inputs.pv_max[t][z]); e > tol) flag("pv_limit", t, z, -1, e);
            if (double e = excess(sol.wt[t][z], 0.0, inst.inputs.wt_max[t][z]); e > tol) flag("wt_limit", t, z, -1, e);
            if (double e = excess(sol.bat[t][z], spec.bat_min[z], spec.bat_max[z]); e > tol)
                flag("battery_power", t, z, -1, e);
            if (double e = excess(sol.soc[t][z], spec.soc_min, spec.soc_max); e > tol) flag("soc_bounds", t, z, -1, e);
            cumulative[z] += sol.bat[t][z] / spec.base_power[z];
            if (double e = std::abs(sol.soc[t][z] - (inst.initial_soc[z] - cumulative[z])); e > tol)
                flag("soc_recurrence", t, z, -1, e);

            double net = 0.0;
            for (int y = 0; y < n; ++y) net += sol.buy[t][z][y] - sol.sell[t][z][y];
            const double supply = sol.pv[t][z] + sol.wt[t][z] + sol.bat[t][z] + net;
            if (double e = std::abs(inst.load(t, z) - supply); e > tol) flag("balance", t, z, -1, e);

            for (int y = 0; y < n; ++y) {
                const double L = spec.line_max[z][y];
                const double X = sol.x[t][z][y];
                const double b = sol.buy[t][z][y];
                const double s = sol.sell[t][z][y];
                if (b < -tol) flag("buy_nonnegative", t, z, y, -b);
                if (s < -tol) flag("sell_nonnegative", t, z, y, -s);
                if (binary_gap(X) > tol) flag("binary", t, z, y, binary_gap(X));
                if (b > L * X + tol) flag("buy_line_limit", t, z, y, b - L * X);
                if (s > L * (1.0 - X) + tol) flag("sell_line_limit", t, z, y, s - L * (1.0 - X));
                if (y != z) {
                    if (double e = std::abs(s - sol.buy[t][y][z]); e > tol) flag("trade_symmetry", t, z, y, e);
                    if (z < y)
                        if (double e = std::abs(X + sol.x[t][y][z] - 1.0); e > tol) flag("pair_binary", t, z, y, e);
                    if (!mmg && (b > tol || s > tol)) flag("isolated_trade", t, z, y, std::max(b, s));
                }
            }
        }
    }
    if (inst.scenario.terminal_soc_rule == TerminalSocRule::return_to_initial && T > 0)
        for (int z = 0; z < n; ++z)
            if (double e = std::abs(sol.soc[T - 1][z] - inst.initial_soc[z]); e > tol) flag("terminal_soc", T - 1, z, -1, e);

    const auto pb = profit_accounting(sol, inst.inputs);
    for (int z = 0; z < n; ++z) {
        const double scale = std::max(1.0, std::abs(pb.smg[z]));
        if (double e = std::abs(pb.smg[z] - sol.profit[z]); e > tol * scale) flag("profit_accounting", -1, z, -1, e);
    }
    if (double e = std::abs(pb.month - sol.objective); e > tol * std::max(1.0, std::abs(pb.month)))
        flag("objective_accounting", -1, -1, -1, e);

    const double M = inst.big_m;
    for (int z = 0; z < n; ++z) {
        const double r = sol.risk[z];
        const double W = sol.w[z];
        const double shortfall = spec.target[z] - pb.smg[z];
        const double scale = std::max(1.0, std::abs(spec.target[z]) + std::abs(pb.smg[z]));
        if (binary_gap(W) > tol) flag("risk_binary", -1, z, -1, binary_gap(W));
        if (r < -tol) flag("risk_nonnegative", -1, z, -1, -r);
        if (r > M * W + tol * scale) flag("risk_big_m", -1, z, -1, r - M * W);
        if (r - shortfall < -tol * scale) flag("risk_shortfall", -1, z, -1, shortfall - r);
        if (r - shortfall > M * (1.0 - W) + tol * scale) flag("risk_shortfall_big_m", -1, z, -1, r - shortfall);
        if (inst.scenario.edr_mode == EdrMode::hard && r > spec.edr_cap + tol) flag("edr_cap", -1, z, -1, r - spec.edr_cap);
        if (double e = std::abs(r - std::max(0.0, shortfall)); e > tol * scale) flag("risk_identity", -1, z, -1, e);
    }
    return rep;
}

/// SMGs whose best achievable monthly profit (LP relaxation, EDR cap lifted)
/// still leaves a downside risk above the cap.
inline std::vector<int> diagnose_edr_infeasibility(const MonthlyInstance& inst, const LpOptions& lo = {}) {
    std::vector<int> out;
    if (!inst.has_risk) return out;
    LinearProgram lp = inst.lp;
    for (int z = 0; z < inst.n(); ++z) {
        lp.upper[inst.risk[z]] = inst.big_m;
    }
    for (int z = 0; z < inst.n(); ++z) {
        LinearProgram probe = lp;
        std::fill(probe.objective.begin(), probe.objective.end(), 0.0);
        for (auto [j, a] : inst.profit_terms(z)) probe.objective[j] += a;
        auto sol = solve_lp(probe, lo);
        if (sol.status == LpStatus::infeasible) {
            out.push_back(z + 1);
            continue;
        }
        if (sol.status != LpStatus::optimal) continue;
        if (inst.spec.target[z] - sol.objective > inst.spec.edr_cap + 1e-9) out.push_back(z + 1);
    }
    return out;
}

} // namespace mgsched
