#include <gtest/gtest.h>

#include "mgsched/demand.hpp"
#include "mgsched/rng.hpp"

using namespace mgsched;

TEST(DemandFunction, FitFromElasticity) {
    const auto f = fit_demand_function(-0.12, 10.0, 0.10);
    EXPECT_NEAR(f.slope_b, -12.0, 1e-12);
    EXPECT_NEAR(f.intercept_A, 11.2, 1e-12);
    EXPECT_NEAR(f(0.10), 10.0, 1e-12);
    const auto g = fit_demand_function(0.0, 10.0, 0.10);
    EXPECT_EQ(g.slope_b, 0.0);
    EXPECT_EQ(g.intercept_A, 10.0);
}

TEST(DemandFunction, RejectsBadAnchors) {
    EXPECT_THROW(fit_demand_function(-0.1, 0.0, 0.1), DomainError);
    EXPECT_THROW(fit_demand_function(-0.1, 1.0, -0.1), DomainError);
    EXPECT_THROW(fit_demand_function(0.1, 1.0, 0.1), DomainError);
}

TEST(PointElasticity, AtAnchorAndElsewhere) {
    const auto f = fit_demand_function(-0.12, 10.0, 0.10);
    EXPECT_NEAR(point_elasticity(f, 0.10).value, -0.12, 1e-12);
    const auto e = point_elasticity(f, 0.2);
    EXPECT_NEAR(e.value, -12.0 * 0.2 / 8.8, 1e-12);
    EXPECT_EQ(e.cls, ElasticityClass::inelastic);
    const auto flat = fit_demand_function(0.0, 10.0, 0.10);
    EXPECT_EQ(point_elasticity(flat, 0.3).value, 0.0);
    EXPECT_EQ(point_elasticity(flat, 0.3).cls, ElasticityClass::inelastic);
    EXPECT_THROW(point_elasticity(f, 1.0), DomainError);
}

TEST(PointElasticity, Classes) {
    EXPECT_EQ(classify_elasticity(-1.0), ElasticityClass::unit);
    EXPECT_EQ(classify_elasticity(-1.5), ElasticityClass::elastic);
    EXPECT_EQ(classify_elasticity(0.0), ElasticityClass::inelastic);
}

TEST(PriceFromLoad, InverseInterceptAndClamp) {
    const auto f = fit_demand_function(-0.12, 10.0, 0.10);
    EXPECT_NEAR(price_from_load(f, 10.0).price, 0.10, 1e-12);
    EXPECT_NEAR(price_from_load(f, 11.2).price, 0.0, 1e-12);
    auto c = price_from_load(f, 12.0);
    EXPECT_EQ(c.price, 0.0);
    EXPECT_TRUE(c.clamped);
    EXPECT_THROW(price_from_load(fit_demand_function(0.0, 1.0, 1.0), 1.0), DomainError);
}

TEST(PriceFromLoad, RoundTripOverRandomTriples) {
    Rng rng(7);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double eps = rng.uniform(-0.16, -0.08);
        const double load = rng.uniform(1.0, 20.0);
        const double price = rng.uniform(0.05, 0.3);
        const auto f = fit_demand_function(eps, load, price);
        const double c = rng.uniform(0.0, f.intercept_A / std::abs(f.slope_b));
        worst = std::max(worst, std::abs(price_from_load(f, f(c)).price - c));
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(DemandSuite, TenFunctionsAcrossLevels) {
    const auto s = build_demand_suite(3, 10.0, 1.0, 0.12);
    ASSERT_EQ(s.functions.size(), 10u);
    const double expected[] = {8, 9, 10, 11, 12};
    for (int k = 0; k < 5; ++k) {
        EXPECT_DOUBLE_EQ(s.functions[k].anchor_load, expected[k]);
        EXPECT_EQ(s.functions[k].segment, TouSegment::on_peak);
        EXPECT_DOUBLE_EQ(s.functions[5 + k].anchor_load, expected[k]);
        EXPECT_EQ(s.functions[5 + k].segment, TouSegment::off_peak);
    }
    for (const auto& f : s.functions) {
        const double b = f.elasticity * f.anchor_load / f.anchor_price;
        EXPECT_NEAR(f.slope_b, b, 1e-9 * std::abs(b));
        EXPECT_NEAR(f.intercept_A + f.slope_b * f.anchor_price, f.anchor_load, 1e-9 * f.anchor_load);
        EXPECT_LT(std::abs(f.elasticity), 1.0);
    }
    EXPECT_EQ(s.average(TouSegment::on_peak).elasticity, -0.08);
    EXPECT_EQ(s.average(TouSegment::off_peak).elasticity, -0.16);
}

TEST(DemandSuite, ZeroSpreadCollapses) {
    const auto s = build_demand_suite(1, 10.0, 0.0, 0.12);
    ASSERT_EQ(s.functions.size(), 10u);
    for (int k = 1; k < 5; ++k) {
        EXPECT_EQ(s.functions[k].anchor_load, s.functions[0].anchor_load);
        EXPECT_EQ(s.functions[5 + k].slope_b, s.functions[5].slope_b);
    }
    EXPECT_NE(s.functions[0].slope_b, s.functions[5].slope_b);
}

TEST(DemandSuite, Errors) {
    EXPECT_THROW(build_demand_suite(1, 2.0, 1.0, 0.1), DomainError);
    EXPECT_THROW(build_demand_suite(0, 10.0, 1.0, 0.1), DomainError);
    ElasticityAssignment bad;
    bad.on_peak = -0.3;
    EXPECT_THROW(build_demand_suite(1, 10.0, 1.0, 0.1, bad), DomainError);
}

namespace {

YearProfiles constant_profiles(double v) {
    YearProfiles y;
    for (int z = 0; z < 3; ++z) {
        y.load[z] = {ProfileKind::load, z + 1, std::vector<double>(kYearHours, v * (3 - z))};
        y.pv_max[z] = {ProfileKind::pv_max, z + 1, std::vector<double>(kYearHours, 0.0)};
        y.wt_max[z] = {ProfileKind::wt_max, z + 1, std::vector<double>(kYearHours, 0.0)};
    }
    return y;
}

} // namespace

TEST(Tariff, ConstantLoadGivesConstantSegmentPrices) {
    const auto cal = YearCalendar::build();
    const auto t = build_tariff(constant_profiles(1.0), cal);
    for (int m = 1; m <= 12; ++m) {
        const auto& mc = cal.month(m);
        for (int h = 0; h < mc.hours; ++h) EXPECT_NEAR(t.buy(m, h), kDefaultBasePrice[m - 1], 1e-12);
    }
}

TEST(Tariff, GridSellIsBonusTimesBuyAndInternalEqualsBuy) {
    const auto cal = YearCalendar::build();
    const auto y = synthesize_year({});
    const auto t = build_tariff(y, cal);
    for (int m = 1; m <= 12; ++m)
        for (int h = 0; h < cal.month(m).hours; ++h) {
            ASSERT_GE(t.buy(m, h), 0.0);
            ASSERT_GT(t.buy(m, h), 0.0);
            ASSERT_NEAR(t.grid_sell(m, h) / t.buy(m, h), 1.1, 1e-12);
            ASSERT_EQ(t.internal(m, h), t.buy(m, h));
        }
}

TEST(Tariff, DoublingSellBonusOnlyScalesGridSell) {
    const auto cal = YearCalendar::build();
    const auto y = synthesize_year({});
    TariffOptions a, b;
    b.sell_bonus = 2.2;
    const auto ta = build_tariff(y, cal, a);
    const auto tb = build_tariff(y, cal, b);
    EXPECT_EQ(ta.buy_price, tb.buy_price);
    for (int h = 0; h < 744; ++h) EXPECT_NEAR(tb.grid_sell(1, h), 2.0 * ta.grid_sell(1, h), 1e-12);
}

TEST(Tariff, MonotoneOnPeakLoadPricesHigher) {
    // On-peak hours carry the higher load in every month.
    const auto cal = YearCalendar::build();
    YearProfiles y = constant_profiles(1.0);
    for (int m = 1; m <= 12; ++m) {
        const auto& mc = cal.month(m);
        for (int z = 0; z < 3; ++z)
            for (int h = 0; h < mc.hours; ++h)
                y.load[z].values[mc.first_hour + h] = (mc.onpeak_mask[h] ? 1.5 : 0.8) * (3 - z);
    }
    const auto t = build_tariff(y, cal);
    for (int m = 1; m <= 12; ++m) {
        const auto& mc = cal.month(m);
        double min_on = 1e9, max_off = -1e9;
        for (int h = 0; h < mc.hours; ++h) {
            if (mc.onpeak_mask[h]) min_on = std::min(min_on, t.buy(m, h));
            else max_off = std::max(max_off, t.buy(m, h));
        }
        EXPECT_GE(min_on, max_off) << "month " << m;
    }
}

TEST(Tariff, CsvRoundTripAndErrors) {
    const auto cal = YearCalendar::build();
    const auto t = build_tariff(synthesize_year({}), cal);
    EXPECT_EQ(parse_tariff_csv(tariff_csv(t), cal), t);
    EXPECT_THROW(parse_tariff_csv("month,hour,price\n", cal), SchemaError);
    EXPECT_THROW(parse_tariff_csv("month,hour,buy_price\n1,2,0.1\n", cal), SchemaError);
    EXPECT_THROW(parse_tariff_csv("month,hour,buy_price\n1,1,-0.1\n", cal), DomainError);
    EXPECT_THROW(parse_tariff_csv("month,hour,buy_price\n1,1,0.1\n", cal), SchemaError);
}
