#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace mgsched;

namespace {

ScenarioResult fake(int id, std::vector<double> profits, std::vector<double> risks = {}) {
    ScenarioResult r;
    r.scenario = id;
    r.n_smg = 1;
    for (std::size_t i = 0; i < profits.size(); ++i) {
        MonthResult m;
        m.month = static_cast<int>(i) + 1;
        m.included = true;
        m.profit[0] = m.total_profit = profits[i];
        m.risk[0] = m.total_risk = risks.empty() ? 0.0 : risks[i];
        r.months.push_back(m);
    }
    recompute_totals(r);
    return r;
}

const DataBundle& bundle() {
    static const DataBundle b = synthetic_bundle();
    return b;
}

ScenarioConfig report_only(int id) { return ScenarioConfig::from_id(id, TerminalSocRule::free, EdrMode::report_only); }

} // namespace

TEST(Compare, Examples) {
    const auto same = compare_values("1", 100.0, 100.0);
    EXPECT_EQ(same.abs_change, 0.0);
    EXPECT_EQ(same.change_percent, 0.0);
    EXPECT_EQ(same.flag, "");
    const auto up = compare_values("1", 125.0, 100.0);
    EXPECT_EQ(up.abs_change, 25.0);
    EXPECT_NEAR(*up.change_percent, 25.0, 1e-12);
    const auto zero = compare_values("1", 5.0, 0.0);
    EXPECT_FALSE(zero.change_percent);
    EXPECT_EQ(zero.flag, "zero_baseline");
    const auto neg = compare_values("1", -5.0, -10.0);
    EXPECT_NEAR(*neg.change_percent, 50.0, 1e-12);
    EXPECT_EQ(neg.flag, "negative_baseline");
}

TEST(Compare, TablesSumAndAverage) {
    const auto a = fake(1, {110, 0, 300});
    const auto b = fake(2, {100, 0, 200});
    const auto t = compare(a, b, Metric::profit);
    EXPECT_EQ(t.name, "1_vs_2");
    ASSERT_EQ(t.months.size(), 3u);
    EXPECT_EQ(t.months[1].flag, "zero_baseline");
    EXPECT_NEAR(*t.year_total.change_percent, 100.0 * 110.0 / 300.0, 1e-12);
    EXPECT_NEAR(*t.year_mean.change_percent, (10.0 + 50.0) / 2.0, 1e-12);
}

TEST(Compare, ExcludedMonthsDropOutOfTotals) {
    auto a = fake(1, {110, 50});
    auto b = fake(2, {100, 40});
    a.months[1].included = false;
    recompute_totals(a);
    EXPECT_EQ(a.annual_profit, 110.0);
    EXPECT_EQ(a.infeasible_months, (std::vector<int>{2}));
    const auto t = compare(a, b, Metric::profit);
    EXPECT_EQ(t.months[1].flag, "excluded");
    EXPECT_FALSE(t.months[1].change_percent);
    EXPECT_NEAR(*t.year_total.change_percent, 10.0, 1e-12);
    EXPECT_THROW(compare(a, fake(2, {1}), Metric::profit), DomainError);
}

TEST(Compare, StandardPairs) {
    std::vector<ScenarioResult> all;
    for (int id = 1; id <= 4; ++id) all.push_back(fake(id, {1.0 * id}, {2.0 * id}));
    const auto tables = standard_comparisons(all);
    ASSERT_EQ(tables.size(), 8u);
    EXPECT_EQ(tables[0].name, "covid_effect_mmg");
    EXPECT_EQ(tables[0].metric, "profit");
    EXPECT_EQ(tables[1].metric, "risk");
    EXPECT_EQ(tables[4].name, "clustering_effect_covid");
    EXPECT_EQ(tables[4].a, 1);
    EXPECT_EQ(tables[4].b, 3);
    EXPECT_EQ(standard_comparisons({all[0], all[1]}).size(), 2u);
    EXPECT_TRUE(standard_comparisons({all[0]}).empty());
}

TEST(RunScenario, IdentityCovidTableMatchesCovidOff) {
    DataBundle data = bundle();
    data.cvd = CovidFactorTable::identity();
    const auto opt = fixtures::quick_run();
    const auto with = run_scenario(SystemSpec{}, report_only(1), data, opt);
    const auto without = run_scenario(SystemSpec{}, report_only(2), data, opt);
    ASSERT_EQ(with.result.months.size(), 12u);
    for (int m = 0; m < 12; ++m) {
        EXPECT_EQ(with.result.months[m].cvd, 1.0);
        EXPECT_EQ(with.result.months[m].profit, without.result.months[m].profit);
        EXPECT_EQ(with.result.months[m].risk, without.result.months[m].risk);
    }
    EXPECT_EQ(with.result.annual_profit, without.result.annual_profit);
}

TEST(RunScenario, CarriesSocAndKeepsSchedulesClean) {
    SystemSpec spec;
    const auto opt = fixtures::quick_run();
    const auto run = run_scenario(spec, report_only(1), bundle(), opt);
    const auto& r = run.result;
    EXPECT_TRUE(r.feasible());
    ASSERT_EQ(run.schedules.size(), 12u);
    for (int z = 0; z < 3; ++z) EXPECT_EQ(r.months[0].soc_start[z], spec.soc_max);
    double annual = 0.0;
    for (int m = 0; m < 12; ++m) {
        const auto& mr = r.months[m];
        EXPECT_TRUE(mr.included);
        if (m > 0) {
            EXPECT_EQ(mr.soc_start, r.months[m - 1].soc_end);
        }
        EXPECT_EQ(mr.soc_end, run.schedules[m].final_soc());
        const auto in = scenario_month_inputs(bundle(), true, m + 1, 6);
        const auto inst = build_instance(spec, report_only(1), in, mr.soc_start);
        const auto rep = validate_solution(inst, run.schedules[m]);
        EXPECT_TRUE(rep.ok()) << "month " << m + 1 << ": " << rep.summary();
        annual += mr.total_profit;
    }
    EXPECT_NEAR(r.annual_profit, annual, 1e-9);
    EXPECT_EQ(r.label, "MMG with COVID");
    EXPECT_EQ(r.solver_mode, "chunked");
}

TEST(RunScenario, SmgArchitectureHasNoInternalFlows) {
    const auto run = run_scenario(SystemSpec{}, report_only(3), bundle(), fixtures::quick_run(4));
    for (const auto& s : run.schedules)
        for (int t = 0; t < s.hours(); ++t)
            for (int z = 0; z < 3; ++z)
                for (int y = 0; y < 3; ++y)
                    if (y != z) {
                        EXPECT_EQ(s.buy[t][z][y], 0.0);
                        EXPECT_EQ(s.sell[t][z][y], 0.0);
                    }
}

TEST(RunScenario, InfeasibleMonthsAreListedAndSocCarried) {
    SystemSpec spec;
    spec.edr_cap = 1.0;
    const auto run = run_scenario(spec, ScenarioConfig::from_id(3), bundle(), fixtures::quick_run(4));
    const auto& r = run.result;
    EXPECT_FALSE(r.feasible());
    EXPECT_EQ(r.infeasible_months.size(), 12u);
    EXPECT_EQ(r.annual_profit, 0.0);
    for (const auto& m : r.months) {
        EXPECT_FALSE(m.included);
        EXPECT_EQ(m.status, "infeasible");
        EXPECT_FALSE(m.infeasible_smgs.empty());
        EXPECT_EQ(m.soc_end, m.soc_start);
        EXPECT_EQ(m.soc_carried_from, 0);
    }
}

TEST(RunScenario, RejectsBadHorizon) {
    RunOptions o;
    o.horizon_hours = 0;
    EXPECT_THROW(run_scenario(SystemSpec{}, report_only(1), bundle(), o), ConfigError);
}
