#pragma once

// Calendar, TOU masks, COVID load factors, hourly profile ingestion and
// deterministic synthetic year generation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mgsched/error.hpp"
#include "mgsched/rng.hpp"
#include "mgsched/textio.hpp"

namespace mgsched {

inline constexpr int kMonths = 12;
inline constexpr int kYearHours = 8760;
inline constexpr std::array<int, kMonths> kMonthHours{744, 672, 744, 720, 744, 720, 744, 744, 720, 744, 720, 744};
inline constexpr int kOnPeakStart = 7;
inline constexpr int kOnPeakEnd = 23;

inline int month_first_hour(int month) {
    if (month < 1 || month > kMonths) throw DomainError("month must be in 1..12, got " + std::to_string(month));
    return std::accumulate(kMonthHours.begin(), kMonthHours.begin() + (month - 1), 0);
}

enum class Weekday { monday = 0, tuesday, wednesday, thursday, friday, saturday, sunday };

inline Weekday parse_weekday(std::string_view s) {
    static constexpr std::array<std::string_view, 7> names{"monday", "tuesday", "wednesday", "thursday",
                                                           "friday", "saturday", "sunday"};
    for (std::size_t i = 0; i < names.size(); ++i)
        if (s == names[i] || s == names[i].substr(0, 3)) return static_cast<Weekday>(i);
    throw ConfigError("unknown weekday '" + std::string(s) + "'");
}

inline const char* to_string(Weekday d) {
    static constexpr std::array<const char*, 7> names{"monday", "tuesday", "wednesday", "thursday",
                                                      "friday", "saturday", "sunday"};
    return names[static_cast<int>(d)];
}

struct MonthCalendar {
    int month_index = 1;
    int hours = 0;
    int first_hour = 0; // offset from 1 January 00:00
    std::vector<bool> weekday_pattern; // per day; true = Monday..Friday
    std::vector<bool> onpeak_mask;     // per hour

    int days() const { return hours / 24; }
    static int hour_of_day(int t) { return t % 24; }
};

struct YearCalendar {
    Weekday january_first = Weekday::monday;
    std::array<MonthCalendar, kMonths> months;

    static YearCalendar build(Weekday january_first = Weekday::monday) {
        YearCalendar cal;
        cal.january_first = january_first;
        int day_of_year = 0;
        for (int m = 1; m <= kMonths; ++m) {
            MonthCalendar& mc = cal.months[m - 1];
            mc.month_index = m;
            mc.hours = kMonthHours[m - 1];
            mc.first_hour = day_of_year * 24;
            mc.weekday_pattern.resize(mc.days());
            mc.onpeak_mask.resize(mc.hours);
            for (int d = 0; d < mc.days(); ++d) {
                const int wd = (static_cast<int>(january_first) + day_of_year + d) % 7;
                const bool weekday = wd < 5;
                mc.weekday_pattern[d] = weekday;
                for (int h = 0; h < 24; ++h) mc.onpeak_mask[d * 24 + h] = weekday && h >= kOnPeakStart && h < kOnPeakEnd;
            }
            day_of_year += mc.days();
        }
        return cal;
    }

    const MonthCalendar& month(int m) const {
        if (m < 1 || m > kMonths) throw DomainError("month must be in 1..12, got " + std::to_string(m));
        return months[m - 1];
    }

    int total_hours() const {
        int s = 0;
        for (const auto& mc : months) s += mc.hours;
        return s;
    }
};

// ---------------------------------------------------------------------------
// COVID load factors

/// Monthly change in load, 2020 versus 2019, percent.
inline constexpr std::array<double, kMonths> kLoadChangePercent{-5.2, 1.0, -5.6, -6.7, -7.6, 0.4,
                                                                0.2,  -0.4, -7.3, -1.8, -4.4, 1.9};
inline constexpr std::array<double, kMonths> kCovidFactors{0.948, 1.01,  0.944, 0.933, 0.924, 1.004,
                                                           1.002, 0.996, 0.927, 0.982, 0.956, 1.019};

struct CovidFactorTable {
    std::array<double, kMonths> cvd{};

    static CovidFactorTable standard() { return {kCovidFactors}; }
    static CovidFactorTable identity() {
        CovidFactorTable t;
        t.cvd.fill(1.0);
        return t;
    }

    void validate() const {
        for (int m = 0; m < kMonths; ++m)
            if (!(cvd[m] > 0.9 && cvd[m] < 1.1))
                throw DomainError("COVID factor for month " + std::to_string(m + 1) + " outside (0.9, 1.1)");
    }

    double factor(int month) const {
        if (month < 1 || month > kMonths) throw DomainError("month must be in 1..12, got " + std::to_string(month));
        return cvd[month - 1];
    }

    double factor(int month, bool covid_enabled) const {
        const double f = factor(month);
        return covid_enabled ? f : 1.0;
    }
};

inline double mean_load_change_percent(std::span<const double> change = kLoadChangePercent) {
    return std::accumulate(change.begin(), change.end(), 0.0) / static_cast<double>(change.size());
}

struct CovidTableRow {
    int month = 0;
    int hours = 0;
    double load_change_percent = 0.0;
    double cvd = 1.0;
};

/// Parses `month,hours,load_change_percent,cvd`; months must be 1..12 in order.
inline std::vector<CovidTableRow> parse_covid_table_csv(std::string_view content) {
    auto ls = text::lines(content);
    std::vector<CovidTableRow> rows;
    bool header = false;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        auto line = text::trim(ls[i]);
        if (line.empty() || line.front() == '#') continue;
        auto f = text::split(line, ',');
        if (!header) {
            if (f.size() != 4 || f[0] != "month" || f[1] != "hours" || f[2] != "load_change_percent" || f[3] != "cvd")
                throw SchemaError("COVID table header must be month,hours,load_change_percent,cvd");
            header = true;
            continue;
        }
        if (f.size() != 4) throw SchemaError("COVID table line " + std::to_string(i + 1) + ": expected 4 fields");
        auto m = text::parse_long(f[0]);
        auto h = text::parse_long(f[1]);
        auto c = text::parse_double(f[2]);
        auto v = text::parse_double(f[3]);
        if (!m || !h || !c || !v) throw SchemaError("COVID table line " + std::to_string(i + 1) + ": bad number");
        rows.push_back({static_cast<int>(*m), static_cast<int>(*h), *c, *v});
    }
    if (rows.size() != kMonths) throw SchemaError("COVID table must have 12 rows");
    for (int k = 0; k < kMonths; ++k) {
        if (rows[k].month != k + 1) throw SchemaError("COVID table months must run 1..12 in order");
        if (rows[k].hours != kMonthHours[k])
            throw SchemaError("COVID table month " + std::to_string(k + 1) + " has wrong hour count");
    }
    return rows;
}

inline CovidFactorTable load_covid_table_csv(const std::filesystem::path& path) {
    auto rows = parse_covid_table_csv(text::read_file(path));
    CovidFactorTable t;
    for (int k = 0; k < kMonths; ++k) t.cvd[k] = rows[k].cvd;
    t.validate();
    return t;
}

// ---------------------------------------------------------------------------
// Hourly profiles

enum class ProfileKind { load, pv_max, wt_max };

inline const char* to_string(ProfileKind k) {
    switch (k) {
    case ProfileKind::load: return "load";
    case ProfileKind::pv_max: return "pv_max";
    case ProfileKind::wt_max: return "wt_max";
    }
    return "?";
}

struct HourlyProfile {
    ProfileKind kind = ProfileKind::load;
    int smg_id = 1;
    std::vector<double> values; // kW

    std::size_t size() const { return values.size(); }
    double total() const { return std::accumulate(values.begin(), values.end(), 0.0); }

    /// The hours of one month out of a full-year profile.
    std::span<const double> month(const MonthCalendar& mc) const {
        if (values.size() != static_cast<std::size_t>(kYearHours))
            throw SchemaError("month slice needs a full-year profile");
        return std::span<const double>(values).subspan(mc.first_hour, mc.hours);
    }

    bool operator==(const HourlyProfile&) const = default;
};

inline HourlyProfile parse_profile_csv(std::string_view content, ProfileKind kind, int smg_id,
                                       const std::string& origin = "profile") {
    if (smg_id < 1 || smg_id > 3) throw DomainError("smg_id must be in 1..3");
    HourlyProfile p{kind, smg_id, {}};
    auto ls = text::lines(content);
    bool header = false;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        auto line = text::trim(ls[i]);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(i + 1);
        auto f = text::split(line, ',');
        if (!header) {
            if (f.size() != 2 || f[0] != "hour" || f[1] != "value")
                throw SchemaError(where + ": header must be 'hour,value'");
            header = true;
            continue;
        }
        if (f.size() != 2) throw SchemaError(where + ": expected 2 fields");
        auto h = text::parse_long(f[0]);
        auto v = text::parse_double(f[1]);
        if (!h || !v) throw SchemaError(where + ": unparsable row");
        const long expected = static_cast<long>(p.values.size()) + 1;
        if (*h < expected) throw SchemaError(where + ": duplicate hour " + std::to_string(*h));
        if (*h > expected) throw SchemaError(where + ": missing hour " + std::to_string(expected));
        if (!std::isfinite(*v)) throw DomainError(where + ": non-finite value");
        if (*v < 0.0) throw DomainError(where + ": negative value at hour " + std::to_string(*h));
        p.values.push_back(*v);
    }
    if (!header) throw SchemaError(origin + ": empty file");
    return p;
}

inline HourlyProfile load_profile_csv(const std::filesystem::path& path, ProfileKind kind, int smg_id) {
    return parse_profile_csv(text::read_file(path), kind, smg_id, path.string());
}

inline std::string profile_csv(const HourlyProfile& p) {
    std::string out = "hour,value\n";
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += text::format_double(p.values[i]);
        out += '\n';
    }
    return out;
}

inline void write_profile_csv(const std::filesystem::path& path, const HourlyProfile& p) {
    text::write_file(path, profile_csv(p));
}

/// Load, PV and WT profiles for the three SMGs over one year.
struct YearProfiles {
    std::array<HourlyProfile, 3> load;
    std::array<HourlyProfile, 3> pv_max;
    std::array<HourlyProfile, 3> wt_max;

    const HourlyProfile& get(ProfileKind k, int smg_id) const {
        switch (k) {
        case ProfileKind::load: return load.at(smg_id - 1);
        case ProfileKind::pv_max: return pv_max.at(smg_id - 1);
        case ProfileKind::wt_max: return wt_max.at(smg_id - 1);
        }
        throw DomainError("bad profile kind");
    }

    void validate() const {
        for (int z = 1; z <= 3; ++z)
            for (auto k : {ProfileKind::load, ProfileKind::pv_max, ProfileKind::wt_max}) {
                const auto& p = get(k, z);
                if (p.values.size() != static_cast<std::size_t>(kYearHours))
                    throw SchemaError(std::string(to_string(k)) + " profile for SMG" + std::to_string(z) +
                                      " must have 8760 hours");
                for (double v : p.values)
                    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("profile values must be finite and >= 0");
            }
    }

    bool operator==(const YearProfiles&) const = default;
};

// ---------------------------------------------------------------------------
// Synthetic year

struct SynthesisSpec {
    std::uint64_t seed = 1;
    std::array<double, 3> pv_rated{12.0, 6.0, 3.0};
    std::array<double, 3> wt_rated{10.0, 5.0, 3.0};
    double pv_energy_share = 0.40;
    std::array<double, 3> load_ratios{4.0, 2.0, 1.0};
    double total_generation_kwh = 81250.0;
    double total_load_kwh = 63000.0;

    double wt_energy_share() const { return 1.0 - pv_energy_share; }

    void validate() const {
        if (!(pv_energy_share >= 0.0 && pv_energy_share <= 1.0))
            throw DomainError("pv_energy_share must be in [0, 1]");
        for (int z = 0; z < 3; ++z) {
            if (!(pv_rated[z] >= 0.0) || !(wt_rated[z] >= 0.0)) throw DomainError("rated powers must be >= 0");
            if (!(load_ratios[z] > 0.0)) throw DomainError("load ratios must be > 0");
        }
        if (!(total_generation_kwh >= 0.0) || !(total_load_kwh >= 0.0))
            throw DomainError("annual energies must be >= 0");
    }
};

namespace detail {

inline int month_of_hour(int hour_of_year) {
    int acc = 0;
    for (int m = 0; m < kMonths; ++m) {
        acc += kMonthHours[m];
        if (hour_of_year < acc) return m + 1;
    }
    return kMonths;
}

/// Scales a unit shape so that sum(min(cap, k * shape)) hits the target.
inline std::vector<double> scale_to_energy(const std::vector<double>& shape, double cap, double target) {
    std::vector<double> out(shape.size(), 0.0);
    if (target <= 0.0 || cap <= 0.0) return out;
    auto energy = [&](double k) {
        double s = 0.0;
        for (double v : shape) s += std::min(cap, k * v);
        return s;
    };
    const double peak = *std::max_element(shape.begin(), shape.end());
    if (peak <= 0.0) return out;
    double lo = 0.0;
    double hi = cap / peak;
    while (energy(hi) < target && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (energy(mid) < target ? lo : hi) = mid;
    }
    for (std::size_t i = 0; i < shape.size(); ++i) out[i] = std::min(cap, hi * shape[i]);
    return out;
}

} // namespace detail

/// Deterministic synthetic year: one shared shape per kind, scaled per SMG.
inline YearProfiles synthesize_year(const SynthesisSpec& spec, Weekday january_first = Weekday::monday) {
    spec.validate();
    Rng rng(spec.seed);
    const auto cal = YearCalendar::build(january_first);

    static constexpr std::array<double, 24> daily_load{0.72, 0.68, 0.66, 0.65, 0.66, 0.72, 0.85, 0.98,
                                                       1.04, 1.06, 1.08, 1.10, 1.11, 1.12, 1.13, 1.15,
                                                       1.19, 1.24, 1.27, 1.24, 1.16, 1.04, 0.92, 0.80};
    static constexpr std::array<double, kMonths> season_load{1.02, 0.97, 0.90, 0.86, 0.92, 1.08,
                                                             1.20, 1.24, 1.06, 0.90, 0.93, 1.02};
    static constexpr std::array<double, kMonths> season_pv{0.66, 0.75, 0.86, 0.95, 1.00, 1.04,
                                                           1.00, 0.95, 0.88, 0.79, 0.69, 0.63};
    static constexpr std::array<double, kMonths> season_wt{1.05, 1.10, 1.20, 1.25, 1.10, 0.90,
                                                           0.70, 0.62, 0.80, 0.95, 1.05, 1.05};

    std::vector<double> load_shape(kYearHours), pv_shape(kYearHours, 0.0), wt_shape(kYearHours);
    double load_noise = 0.0;
    double wind_state = 0.0;
    for (int day = 0; day < kYearHours / 24; ++day) {
        const int month = detail::month_of_hour(day * 24);
        const bool weekday = cal.month(month).weekday_pattern[day - cal.month(month).first_hour / 24];
        const double cloud = rng.uniform(0.55, 1.0);
        for (int h = 0; h < 24; ++h) {
            const int t = day * 24 + h;
            load_noise = 0.8 * load_noise + 0.6 * rng.normal();
            const double noise = std::clamp(1.0 + 0.04 * load_noise, 0.92, 1.08);
            load_shape[t] = daily_load[h] * season_load[month - 1] * (weekday ? 1.0 : 0.94) * noise;

            if (h >= 8 && h < 16)
                pv_shape[t] = season_pv[month - 1] * cloud * std::sin(std::numbers::pi * (h - 8 + 0.5) / 8.0);

            wind_state = 0.97 * wind_state + std::sqrt(1.0 - 0.97 * 0.97) * rng.normal();
            const double diurnal = 1.0 + 0.12 * std::cos(2.0 * std::numbers::pi * (h - 2) / 24.0);
            const double speed = season_wt[month - 1] * diurnal * std::exp(0.45 * wind_state - 0.1);
            wt_shape[t] = std::clamp(speed - 0.25, 0.0, 1.0);
        }
    }

    const double ratio_sum = spec.load_ratios[0] + spec.load_ratios[1] + spec.load_ratios[2];
    const double load_shape_sum = std::accumulate(load_shape.begin(), load_shape.end(), 0.0);
    YearProfiles out;
    for (int z = 0; z < 3; ++z) {
        const double w = spec.load_ratios[z] / ratio_sum;
        out.load[z] = {ProfileKind::load, z + 1, std::vector<double>(kYearHours)};
        const double k = spec.total_load_kwh * w / load_shape_sum;
        for (int t = 0; t < kYearHours; ++t) out.load[z].values[t] = k * load_shape[t];
        out.pv_max[z] = {ProfileKind::pv_max, z + 1,
                         detail::scale_to_energy(pv_shape, spec.pv_rated[z],
                                                 spec.total_generation_kwh * spec.pv_energy_share * w)};
        out.wt_max[z] = {ProfileKind::wt_max, z + 1,
                         detail::scale_to_energy(wt_shape, spec.wt_rated[z],
                                                 spec.total_generation_kwh * spec.wt_energy_share() * w)};
    }
    return out;
}

} // namespace mgsched
