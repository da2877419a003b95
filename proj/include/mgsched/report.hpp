#pragma once

// CSV and JSON reports. Numbers are printed in shortest round-trip form so
// identical results give identical bytes.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgsched/engine.hpp"
#include "mgsched/error.hpp"
#include "mgsched/textio.hpp"

namespace mgsched {

inline constexpr int kReportSchemaVersion = 1;

using nlohmann::json;

inline void to_json(json& j, const MonthResult& m) {
    j = json{{"month", m.month},
             {"cvd", m.cvd},
             {"status", m.status},
             {"heuristic", m.heuristic},
             {"included", m.included},
             {"violations", m.violations},
             {"profit", m.profit},
             {"risk", m.risk},
             {"w", m.w},
             {"total_profit", m.total_profit},
             {"total_risk", m.total_risk},
             {"nodes", m.nodes},
             {"windows", m.windows},
             {"bound", m.bound ? json(*m.bound) : json(nullptr)},
             {"infeasible_smgs", m.infeasible_smgs},
             {"soc_start", m.soc_start},
             {"soc_end", m.soc_end},
             {"soc_carried_from", m.soc_carried_from}};
}

inline void from_json(const json& j, MonthResult& m) {
    j.at("month").get_to(m.month);
    j.at("cvd").get_to(m.cvd);
    j.at("status").get_to(m.status);
    j.at("heuristic").get_to(m.heuristic);
    j.at("included").get_to(m.included);
    j.at("violations").get_to(m.violations);
    j.at("profit").get_to(m.profit);
    j.at("risk").get_to(m.risk);
    j.at("w").get_to(m.w);
    j.at("total_profit").get_to(m.total_profit);
    j.at("total_risk").get_to(m.total_risk);
    j.at("nodes").get_to(m.nodes);
    j.at("windows").get_to(m.windows);
    if (j.at("bound").is_null()) m.bound.reset();
    else m.bound = j.at("bound").get<double>();
    j.at("infeasible_smgs").get_to(m.infeasible_smgs);
    j.at("soc_start").get_to(m.soc_start);
    j.at("soc_end").get_to(m.soc_end);
    j.at("soc_carried_from").get_to(m.soc_carried_from);
}

inline void to_json(json& j, const ScenarioResult& r) {
    j = json{{"scenario", r.scenario},
             {"label", r.label},
             {"architecture", r.architecture},
             {"covid", r.covid},
             {"edr_mode", r.edr_mode},
             {"terminal_soc_rule", r.terminal_soc_rule},
             {"solver_mode", r.solver_mode},
             {"n_smg", r.n_smg},
             {"months", r.months},
             {"annual_profit", r.annual_profit},
             {"annual_risk", r.annual_risk},
             {"infeasible_months", r.infeasible_months}};
}

inline void from_json(const json& j, ScenarioResult& r) {
    j.at("scenario").get_to(r.scenario);
    j.at("label").get_to(r.label);
    j.at("architecture").get_to(r.architecture);
    j.at("covid").get_to(r.covid);
    j.at("edr_mode").get_to(r.edr_mode);
    j.at("terminal_soc_rule").get_to(r.terminal_soc_rule);
    j.at("solver_mode").get_to(r.solver_mode);
    j.at("n_smg").get_to(r.n_smg);
    j.at("months").get_to(r.months);
    j.at("annual_profit").get_to(r.annual_profit);
    j.at("annual_risk").get_to(r.annual_risk);
    j.at("infeasible_months").get_to(r.infeasible_months);
}

inline void to_json(json& j, const ComparisonRow& r) {
    j = json{{"label", r.label},
             {"a", r.a},
             {"b", r.b},
             {"abs_change", r.abs_change},
             {"change_percent", r.change_percent ? json(*r.change_percent) : json(nullptr)},
             {"flag", r.flag}};
}

inline void from_json(const json& j, ComparisonRow& r) {
    j.at("label").get_to(r.label);
    j.at("a").get_to(r.a);
    j.at("b").get_to(r.b);
    j.at("abs_change").get_to(r.abs_change);
    if (j.at("change_percent").is_null()) r.change_percent.reset();
    else r.change_percent = j.at("change_percent").get<double>();
    j.at("flag").get_to(r.flag);
}

inline void to_json(json& j, const ComparisonTable& t) {
    j = json{{"name", t.name},         {"metric", t.metric},       {"a", t.a},
             {"b", t.b},               {"months", t.months},       {"year_total", t.year_total},
             {"year_mean", t.year_mean}};
}

inline void from_json(const json& j, ComparisonTable& t) {
    j.at("name").get_to(t.name);
    j.at("metric").get_to(t.metric);
    j.at("a").get_to(t.a);
    j.at("b").get_to(t.b);
    j.at("months").get_to(t.months);
    j.at("year_total").get_to(t.year_total);
    j.at("year_mean").get_to(t.year_mean);
}

struct Report {
    int schema_version = kReportSchemaVersion;
    json run;  // echo of the settings that produced the results
    std::vector<ScenarioResult> results;
    std::vector<ComparisonTable> comparisons;

    bool operator==(const Report&) const = default;
};

inline std::string report_json(const Report& r) {
    json j{{"schema_version", r.schema_version},
           {"run", r.run.is_null() ? json::object() : r.run},
           {"results", r.results},
           {"comparisons", r.comparisons}};
    return j.dump(2) + "\n";
}

inline Report parse_report_json(std::string_view content) {
    json j;
    try {
        j = json::parse(content);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("report JSON: ") + e.what());
    }
    Report r;
    try {
        j.at("schema_version").get_to(r.schema_version);
        if (r.schema_version != kReportSchemaVersion)
            throw SchemaError("unsupported report schema_version " + std::to_string(r.schema_version));
        r.run = j.at("run");
        j.at("results").get_to(r.results);
        j.at("comparisons").get_to(r.comparisons);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("report JSON: ") + e.what());
    }
    return r;
}

namespace detail {

inline std::string csv_num(double v) { return text::format_double(v); }

inline std::string csv_opt(const std::optional<double>& v) { return v ? text::format_double(*v) : std::string(); }

inline std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
    return s;
}

} // namespace detail

inline std::string monthly_csv(const std::vector<ScenarioResult>& results) {
    std::string s = "scenario,month,cvd,status,heuristic,included,violations,profit_1,profit_2,profit_3,profit_total,"
                    "risk_1,risk_2,risk_3,risk_total,w_1,w_2,w_3,nodes,windows,bound,infeasible_smgs,soc_carried_from\n";
    for (const auto& r : results)
        for (const auto& m : r.months) {
            s += std::to_string(r.scenario) + ',' + std::to_string(m.month) + ',' + detail::csv_num(m.cvd) + ',' +
                 m.status + ',' + (m.heuristic ? "1" : "0") + ',' + (m.included ? "1" : "0") + ',' +
                 std::to_string(m.violations);
            for (double v : m.profit) s += ',' + detail::csv_num(v);
            s += ',' + detail::csv_num(m.total_profit);
            for (double v : m.risk) s += ',' + detail::csv_num(v);
            s += ',' + detail::csv_num(m.total_risk);
            for (double v : m.w) s += ',' + detail::csv_num(v);
            s += ',' + std::to_string(m.nodes) + ',' + std::to_string(m.windows) + ',' + detail::csv_opt(m.bound) + ',' +
                 detail::join_ints(m.infeasible_smgs) + ',' + std::to_string(m.soc_carried_from) + '\n';
        }
    return s;
}

inline std::string annual_csv(const std::vector<ScenarioResult>& results) {
    std::string s = "scenario,label,architecture,covid,edr_mode,solver_mode,annual_profit,annual_risk,infeasible_months\n";
    for (const auto& r : results)
        s += std::to_string(r.scenario) + ',' + r.label + ',' + r.architecture + ',' + (r.covid ? "on" : "off") + ',' +
             r.edr_mode + ',' + r.solver_mode + ',' + detail::csv_num(r.annual_profit) + ',' +
             detail::csv_num(r.annual_risk) + ',' + detail::join_ints(r.infeasible_months) + '\n';
    return s;
}

inline std::string comparisons_csv(const std::vector<ComparisonTable>& tables) {
    std::string s = "table,metric,a,b,row,a_value,b_value,abs_change,change_percent,flag\n";
    auto row = [&](const ComparisonTable& t, const ComparisonRow& r) {
        s += t.name + ',' + t.metric + ',' + std::to_string(t.a) + ',' + std::to_string(t.b) + ',' + r.label + ',' +
             detail::csv_num(r.a) + ',' + detail::csv_num(r.b) + ',' + detail::csv_num(r.abs_change) + ',' +
             detail::csv_opt(r.change_percent) + ',' + r.flag + '\n';
    };
    for (const auto& t : tables) {
        for (const auto& r : t.months) row(t, r);
        row(t, t.year_total);
        row(t, t.year_mean);
    }
    return s;
}

/// Plot-ready hourly series: dispatch, SOC and prices per SMG.
inline std::string hourly_csv(const std::vector<ScenarioRun>& runs, const DataBundle& data) {
    std::string s = "scenario,month,hour,smg,load,pv,wt,bat,soc,grid_buy,grid_sell,internal_buy,internal_sell,"
                    "buy_price,grid_sell_price,x_grid\n";
    for (const auto& run : runs) {
        const auto& r = run.result;
        for (const auto& sol : run.schedules) {
            if (sol.hours() == 0) continue;
            const MonthInputs in = scenario_month_inputs(data, r.covid, sol.month, sol.hours());
            const std::string head = std::to_string(r.scenario) + ',' + std::to_string(sol.month) + ',';
            for (int t = 0; t < sol.hours(); ++t)
                for (int z = 0; z < sol.n_smg; ++z) {
                    double ib = 0.0, is = 0.0;
                    for (int y = 0; y < sol.n_smg; ++y)
                        if (y != z) {
                            ib += sol.buy[t][z][y];
                            is += sol.sell[t][z][y];
                        }
                    s += head + std::to_string(t + 1) + ',' + std::to_string(z + 1) + ',' +
                         detail::csv_num(in.cvd * in.load[t][z]) + ',' + detail::csv_num(sol.pv[t][z]) + ',' +
                         detail::csv_num(sol.wt[t][z]) + ',' + detail::csv_num(sol.bat[t][z]) + ',' +
                         detail::csv_num(sol.soc[t][z]) + ',' + detail::csv_num(sol.buy[t][z][z]) + ',' +
                         detail::csv_num(sol.sell[t][z][z]) + ',' + detail::csv_num(ib) + ',' + detail::csv_num(is) +
                         ',' + detail::csv_num(in.buy_price[t]) + ',' + detail::csv_num(in.grid_sell_price[t]) + ',' +
                         detail::csv_num(sol.x[t][z][z]) + '\n';
                }
        }
    }
    return s;
}

enum class ReportFormat { csv, json, both };

inline ReportFormat parse_report_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    if (s == "both") return ReportFormat::both;
    throw ConfigError("report format must be csv, json or both, got '" + s + "'");
}

inline const char* to_string(ReportFormat f) {
    return f == ReportFormat::csv ? "csv" : f == ReportFormat::json ? "json" : "both";
}

/// Writes the report files into `dir` and returns their paths in write order.
inline std::vector<std::filesystem::path> emit_report(const Report& report, const std::vector<ScenarioRun>& runs,
                                                      const DataBundle& data, ReportFormat format,
                                                      const std::filesystem::path& dir, bool hourly = true) {
    std::vector<std::filesystem::path> written;
    auto put = [&](const char* name, const std::string& content) {
        const auto p = dir / name;
        text::write_file(p, content);
        written.push_back(p);
    };
    if (format != ReportFormat::json) {
        put("monthly.csv", monthly_csv(report.results));
        put("annual.csv", annual_csv(report.results));
        put("comparisons.csv", comparisons_csv(report.comparisons));
        if (hourly) put("hourly.csv", hourly_csv(runs, data));
    }
    if (format != ReportFormat::csv) put("report.json", report_json(report));
    return written;
}

} // namespace mgsched
