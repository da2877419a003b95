#pragma once

// Linear short-run demand model PL(C) = A + b C and the hourly tariffs it induces.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mgsched/error.hpp"
#include "mgsched/profiles.hpp"
#include "mgsched/textio.hpp"

namespace mgsched {

enum class TouSegment { on_peak, off_peak };

inline const char* to_string(TouSegment s) { return s == TouSegment::on_peak ? "on_peak" : "off_peak"; }

struct DemandFunction {
    double intercept_A = 0.0;  // kWh
    double slope_b = 0.0;      // kWh per $/kWh, <= 0
    double elasticity = 0.0;
    double anchor_load = 0.0;  // kWh
    double anchor_price = 0.0; // $/kWh
    TouSegment segment = TouSegment::on_peak;
    int consumer_level = 0; // offset in standard deviations

    double operator()(double price) const { return intercept_A + slope_b * price; }
};

inline DemandFunction fit_demand_function(double elasticity, double anchor_load, double anchor_price,
                                          TouSegment segment = TouSegment::on_peak, int level = 0) {
    if (!(anchor_load > 0.0)) throw DomainError("anchor load must be positive");
    if (!(anchor_price > 0.0)) throw DomainError("anchor price must be positive");
    if (!(elasticity <= 0.0)) throw DomainError("elasticity must be <= 0");
    DemandFunction f;
    f.elasticity = elasticity;
    f.anchor_load = anchor_load;
    f.anchor_price = anchor_price;
    f.segment = segment;
    f.consumer_level = level;
    f.slope_b = elasticity * anchor_load / anchor_price;
    f.intercept_A = anchor_load - f.slope_b * anchor_price;
    return f;
}

enum class ElasticityClass { elastic, unit, inelastic };

inline const char* to_string(ElasticityClass c) {
    switch (c) {
    case ElasticityClass::elastic: return "elastic";
    case ElasticityClass::unit: return "unit";
    case ElasticityClass::inelastic: return "inelastic";
    }
    return "?";
}

inline ElasticityClass classify_elasticity(double eps, double tol = 1e-12) {
    const double a = std::abs(eps);
    if (std::abs(a - 1.0) <= tol) return ElasticityClass::unit;
    return a > 1.0 ? ElasticityClass::elastic : ElasticityClass::inelastic;
}

struct PointElasticity {
    double value = 0.0;
    ElasticityClass cls = ElasticityClass::inelastic;
};

inline PointElasticity point_elasticity(const DemandFunction& f, double price) {
    const double q = f(price);
    if (!(q > 0.0)) throw DomainError("demand is not positive at the given price");
    const double eps = f.slope_b * price / q;
    return {eps, classify_elasticity(eps)};
}

struct PriceFromLoad {
    double price = 0.0;
    bool clamped = false;
};

inline PriceFromLoad price_from_load(const DemandFunction& f, double load) {
    if (!(f.slope_b < 0.0)) throw DomainError("perfectly inelastic demand has no price inverse");
    const double p = (load - f.intercept_A) / f.slope_b;
    if (p < 0.0) return {0.0, true};
    return {p, false};
}

struct ElasticityAssignment {
    double range_low = -0.16;
    double range_high = -0.08;
    double on_peak = -0.08;
    double off_peak = -0.16;

    void validate() const {
        if (!(range_low <= range_high && range_high <= 0.0)) throw DomainError("elasticity range must satisfy lo <= hi <= 0");
        if (range_low <= -1.0) throw DomainError("elasticity range must stay inelastic (|e| < 1)");
        for (double e : {on_peak, off_peak})
            if (e < range_low || e > range_high) throw DomainError("segment elasticity outside the configured range");
    }

    double for_segment(TouSegment s) const { return s == TouSegment::on_peak ? on_peak : off_peak; }
};

inline constexpr std::array<int, 5> kConsumerLevels{-2, -1, 0, 1, 2};

struct DemandSuite {
    int month = 1;
    std::vector<DemandFunction> functions; // level-major within each segment: on-peak first

    const DemandFunction& average(TouSegment s) const {
        for (const auto& f : functions)
            if (f.segment == s && f.consumer_level == 0) return f;
        throw DomainError("suite has no average consumer for segment");
    }
};

inline DemandSuite build_demand_suite(int month, double avg_load, double load_std, double avg_price,
                                      const ElasticityAssignment& elasticity = {}) {
    if (month < 1 || month > kMonths) throw DomainError("month must be in 1..12");
    if (!(load_std >= 0.0)) throw DomainError("load standard deviation must be >= 0");
    if (!(avg_load > 2.0 * load_std)) throw DomainError("consumer level -2 sigma has non-positive load");
    elasticity.validate();
    DemandSuite suite;
    suite.month = month;
    for (auto seg : {TouSegment::on_peak, TouSegment::off_peak})
        for (int level : kConsumerLevels)
            suite.functions.push_back(fit_demand_function(elasticity.for_segment(seg), avg_load + level * load_std,
                                                          avg_price, seg, level));
    return suite;
}

// ---------------------------------------------------------------------------
// Tariffs

/// Stand-in monthly residential base prices, $/kWh.
inline constexpr std::array<double, kMonths> kDefaultBasePrice{0.125, 0.127, 0.130, 0.132, 0.131, 0.128,
                                                               0.124, 0.120, 0.129, 0.136, 0.133, 0.127};

struct TariffSchedule {
    std::array<std::vector<double>, kMonths> buy_price; // per month, per hour
    double sell_bonus = 1.1;

    double buy(int month, int t) const { return buy_price.at(month - 1).at(t); }
    double internal(int month, int t) const { return buy(month, t); }
    double grid_sell(int month, int t) const { return sell_bonus * buy(month, t); }

    void validate(const YearCalendar& cal) const {
        if (!(sell_bonus > 1.0)) throw DomainError("sell bonus must exceed 1");
        for (int m = 1; m <= kMonths; ++m) {
            const auto& v = buy_price[m - 1];
            if (v.size() != static_cast<std::size_t>(cal.month(m).hours))
                throw SchemaError("tariff for month " + std::to_string(m) + " has wrong hour count");
            for (double p : v)
                if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("tariff prices must be finite and >= 0");
        }
    }

    bool operator==(const TariffSchedule&) const = default;
};

struct TariffOptions {
    std::array<double, kMonths> base_price = kDefaultBasePrice;
    double load_std_ratio = 0.015; // sigma as a fraction of the average hourly load
    double sell_bonus = 1.1;
    ElasticityAssignment elasticity;
};

/// Hour weights are the month's system-load z-scores, clipped to the
/// +-2 sigma consumer range; the quantity fed to the inverse demand is the
/// average consumer's load shifted against that score, so busy hours price high.
inline TariffSchedule build_tariff(const YearProfiles& profiles, const YearCalendar& cal,
                                   std::span<const DemandSuite> suites, double sell_bonus, double load_std_ratio) {
    if (suites.size() != static_cast<std::size_t>(kMonths)) throw DomainError("tariff needs a suite for all 12 months");
    if (!(sell_bonus > 1.0)) throw DomainError("sell bonus must exceed 1");
    TariffSchedule tariff;
    tariff.sell_bonus = sell_bonus;
    for (int m = 1; m <= kMonths; ++m) {
        const auto& mc = cal.month(m);
        const auto& suite = suites[m - 1];
        if (suite.month != m) throw DomainError("suites must be ordered by month");
        std::vector<double> sys(mc.hours, 0.0);
        for (int z = 1; z <= 3; ++z) {
            auto v = profiles.load[z - 1].month(mc);
            for (int t = 0; t < mc.hours; ++t) sys[t] += v[t];
        }
        double mean = 0.0;
        for (double v : sys) mean += v;
        mean /= mc.hours;
        double var = 0.0;
        for (double v : sys) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / mc.hours);
        auto& prices = tariff.buy_price[m - 1];
        prices.resize(mc.hours);
        for (int t = 0; t < mc.hours; ++t) {
            const auto seg = mc.onpeak_mask[t] ? TouSegment::on_peak : TouSegment::off_peak;
            const auto& f = suite.average(seg);
            const double score = sd > 0.0 ? std::clamp((sys[t] - mean) / sd, -2.0, 2.0) : 0.0;
            const double sigma = load_std_ratio * f.anchor_load;
            if (f.slope_b < 0.0)
                prices[t] = price_from_load(f, f.anchor_load - sigma * score).price;
            else
                prices[t] = f.anchor_price;
        }
    }
    return tariff;
}

/// Builds the suites from the profiles' monthly mean system load, then the tariff.
inline TariffSchedule build_tariff(const YearProfiles& profiles, const YearCalendar& cal, const TariffOptions& opt = {}) {
    std::vector<DemandSuite> suites;
    for (int m = 1; m <= kMonths; ++m) {
        const auto& mc = cal.month(m);
        double total = 0.0;
        for (int z = 1; z <= 3; ++z)
            for (double v : profiles.load[z - 1].month(mc)) total += v;
        const double avg = std::max(total / mc.hours, 1e-9);
        suites.push_back(build_demand_suite(m, avg, opt.load_std_ratio * avg, opt.base_price[m - 1], opt.elasticity));
    }
    return build_tariff(profiles, cal, suites, opt.sell_bonus, opt.load_std_ratio);
}

inline std::string tariff_csv(const TariffSchedule& t) {
    std::string out = "month,hour,buy_price\n";
    for (int m = 1; m <= kMonths; ++m)
        for (std::size_t h = 0; h < t.buy_price[m - 1].size(); ++h) {
            out += std::to_string(m);
            out += ',';
            out += std::to_string(h + 1);
            out += ',';
            out += text::format_double(t.buy_price[m - 1][h]);
            out += '\n';
        }
    return out;
}

inline void write_tariff_csv(const std::filesystem::path& path, const TariffSchedule& t) {
    text::write_file(path, tariff_csv(t));
}

inline TariffSchedule parse_tariff_csv(std::string_view content, const YearCalendar& cal, double sell_bonus = 1.1,
                                       const std::string& origin = "tariff") {
    TariffSchedule t;
    t.sell_bonus = sell_bonus;
    auto ls = text::lines(content);
    bool header = false;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        auto line = text::trim(ls[i]);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(i + 1);
        auto f = text::split(line, ',');
        if (!header) {
            if (f.size() != 3 || f[0] != "month" || f[1] != "hour" || f[2] != "buy_price")
                throw SchemaError(where + ": header must be 'month,hour,buy_price'");
            header = true;
            continue;
        }
        if (f.size() != 3) throw SchemaError(where + ": expected 3 fields");
        auto m = text::parse_long(f[0]);
        auto h = text::parse_long(f[1]);
        auto p = text::parse_double(f[2]);
        if (!m || !h || !p) throw SchemaError(where + ": unparsable row");
        if (*m < 1 || *m > kMonths) throw SchemaError(where + ": month out of range");
        auto& v = t.buy_price[*m - 1];
        if (*h != static_cast<long>(v.size()) + 1) throw SchemaError(where + ": hours must be contiguous from 1");
        if (*p < 0.0) throw DomainError(where + ": negative price");
        v.push_back(*p);
    }
    t.validate(cal);
    return t;
}

inline TariffSchedule load_tariff_csv(const std::filesystem::path& path, const YearCalendar& cal, double sell_bonus = 1.1) {
    return parse_tariff_csv(text::read_file(path), cal, sell_bonus, path.string());
}

} // namespace mgsched
