#pragma once

// Run configuration: a `key = value` file with `#` comments. See
// config/example.conf for every key.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgsched/demand.hpp"
#include "mgsched/error.hpp"
#include "mgsched/mip.hpp"
#include "mgsched/model.hpp"
#include "mgsched/profiles.hpp"
#include "mgsched/report.hpp"
#include "mgsched/system.hpp"
#include "mgsched/textio.hpp"

namespace mgsched {

inline constexpr int kConfigSchemaVersion = 1;

struct RunConfig {
    int schema_version = kConfigSchemaVersion;
    std::uint64_t seed = 1;
    Weekday january_first = Weekday::monday;
    std::optional<std::filesystem::path> data_dir; // CSV source; synthesis from `seed` when unset
    std::optional<std::filesystem::path> covid_table;
    SystemSpec spec;
    SynthesisSpec synthesis;
    TariffOptions tariff;
    std::vector<int> scenarios{1, 2, 3, 4};
    TerminalSocRule terminal_soc_rule = TerminalSocRule::free;
    EdrMode edr_mode = EdrMode::report_only;
    SolverOptions solver;
    std::optional<SmgValues> initial_soc;
    std::optional<int> horizon_hours;
    std::filesystem::path out = "results";
    ReportFormat format = ReportFormat::both;
    bool hourly = true;
    bool write_solutions = false;

    void validate() const {
        if (schema_version != kConfigSchemaVersion)
            throw ConfigError("unsupported config schema_version " + std::to_string(schema_version));
        spec.validate();
        synthesis.validate();
        tariff.elasticity.validate();
        solver.validate();
        if (scenarios.empty()) throw ConfigError("no scenarios selected");
        for (int s : scenarios)
            if (s < 1 || s > 4) throw ConfigError("scenario ids must be in 1..4");
        if (horizon_hours && *horizon_hours < 1) throw ConfigError("horizon_hours must be >= 1");
        if (initial_soc)
            for (int z = 0; z < spec.n_smg; ++z)
                if (!((*initial_soc)[z] >= spec.soc_min && (*initial_soc)[z] <= spec.soc_max))
                    throw ConfigError("initial_soc must lie in [soc_min, soc_max]");
    }
};

namespace detail {

inline double cfg_double(const std::string& key, const std::string& v) {
    auto d = text::parse_double(v);
    if (!d) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return *d;
}

inline long cfg_long(const std::string& key, const std::string& v) {
    auto d = text::parse_long(v);
    if (!d) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return *d;
}

inline bool cfg_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline std::vector<double> cfg_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (auto part : text::split(v, ',')) out.push_back(cfg_double(key, std::string(text::trim(part))));
    return out;
}

template <std::size_t N>
inline std::array<double, N> cfg_array(const std::string& key, const std::string& v) {
    auto l = cfg_list(key, v);
    if (l.size() != N) throw ConfigError(key + ": expected " + std::to_string(N) + " comma-separated values");
    std::array<double, N> a{};
    std::copy(l.begin(), l.end(), a.begin());
    return a;
}

inline std::vector<int> parse_scenario_list(const std::string& v) {
    std::vector<int> out;
    for (auto part : text::split(v, ',')) {
        auto s = std::string(text::trim(part));
        auto id = text::parse_long(s);
        if (!id || *id < 1 || *id > 4) throw ConfigError("scenarios: '" + s + "' is not a scenario id in 1..4");
        if (std::find(out.begin(), out.end(), static_cast<int>(*id)) == out.end()) out.push_back(static_cast<int>(*id));
    }
    if (out.empty()) throw ConfigError("scenarios: empty list");
    return out;
}

inline int smg_index(const std::string& key, std::string_view digit) {
    auto i = text::parse_long(digit);
    if (!i || *i < 1 || *i > kMaxSmg) throw ConfigError("unknown key '" + key + "'");
    return static_cast<int>(*i) - 1;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

inline const std::map<std::string, Setter>& config_setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        t["schema_version"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.schema_version = static_cast<int>(cfg_long(k, v));
        };
        t["seed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            const long s = cfg_long(k, v);
            if (s < 0) throw ConfigError("seed must be >= 0");
            c.seed = static_cast<std::uint64_t>(s);
        };
        t["january_first"] = [](RunConfig& c, const std::string&, const std::string& v) {
            c.january_first = parse_weekday(v);
        };
        t["data_dir"] = [](RunConfig& c, const std::string&, const std::string& v) { c.data_dir = v; };
        t["covid_table"] = [](RunConfig& c, const std::string&, const std::string& v) { c.covid_table = v; };
        t["scenarios"] = [](RunConfig& c, const std::string&, const std::string& v) {
            c.scenarios = parse_scenario_list(v);
        };
        t["terminal_soc_rule"] = [](RunConfig& c, const std::string&, const std::string& v) {
            c.terminal_soc_rule = parse_terminal_rule(v);
        };
        t["edr_mode"] = [](RunConfig& c, const std::string&, const std::string& v) { c.edr_mode = parse_edr_mode(v); };
        t["initial_soc"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.initial_soc = cfg_array<kMaxSmg>(k, v);
        };
        t["horizon_hours"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "full") c.horizon_hours.reset();
            else c.horizon_hours = static_cast<int>(cfg_long(k, v));
        };
        t["out"] = [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; };
        t["format"] = [](RunConfig& c, const std::string&, const std::string& v) { c.format = parse_report_format(v); };
        t["hourly"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.hourly = cfg_bool(k, v); };
        t["write_solutions"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.write_solutions = cfg_bool(k, v);
        };

        t["solver.mode"] = [](RunConfig& c, const std::string&, const std::string& v) {
            if (v == "exact") c.solver.mode = SolverMode::exact;
            else if (v == "chunked") c.solver.mode = SolverMode::chunked;
            else throw ConfigError("solver.mode must be exact or chunked, got '" + v + "'");
        };
        t["solver.chunk_hours"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.solver.chunk_hours = static_cast<int>(cfg_long(k, v));
        };
        t["solver.node_limit"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.solver.node_limit = cfg_long(k, v);
        };
        t["solver.window_node_limit"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.solver.window_node_limit = cfg_long(k, v);
        };
        t["solver.heuristic_interval"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.solver.heuristic_interval = static_cast<int>(cfg_long(k, v));
        };
        t["solver.local_search_passes"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.solver.local_search_passes = static_cast<int>(cfg_long(k, v));
        };
        t["solver.max_exact_rows"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.solver.max_exact_rows = static_cast<int>(cfg_long(k, v));
        };
        t["solver.feasibility_tol"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.solver.feasibility_tol = cfg_double(k, v);
        };
        t["solver.integrality_tol"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.solver.integrality_tol = cfg_double(k, v);
        };
        t["solver.optimality_gap"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.solver.optimality_gap = cfg_double(k, v);
        };

        t["spec.n_smg"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.spec.n_smg = static_cast<int>(cfg_long(k, v));
        };
        t["spec.soc_min"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.spec.soc_min = cfg_double(k, v);
        };
        t["spec.soc_max"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.spec.soc_max = cfg_double(k, v);
        };
        t["spec.edr_cap"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.spec.edr_cap = cfg_double(k, v);
        };
        t["spec.target_total"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.spec.target_total = cfg_double(k, v);
        };
        t["spec.big_m"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            if (v == "auto") c.spec.big_m.reset();
            else c.spec.big_m = cfg_double(k, v);
        };
        t["spec.months"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.spec.months = static_cast<int>(cfg_long(k, v));
        };
        for (int z = 1; z <= kMaxSmg; ++z) {
            const std::string id = std::to_string(z);
            t["spec.bat_min." + id] = [](RunConfig& c, const std::string& k, const std::string& v) {
                c.spec.bat_min[smg_index(k, k.substr(k.size() - 1))] = cfg_double(k, v);
            };
            t["spec.bat_max." + id] = [](RunConfig& c, const std::string& k, const std::string& v) {
                c.spec.bat_max[smg_index(k, k.substr(k.size() - 1))] = cfg_double(k, v);
            };
            t["spec.base_power." + id] = [](RunConfig& c, const std::string& k, const std::string& v) {
                c.spec.base_power[smg_index(k, k.substr(k.size() - 1))] = cfg_double(k, v);
            };
            t["spec.target." + id] = [](RunConfig& c, const std::string& k, const std::string& v) {
                c.spec.target[smg_index(k, k.substr(k.size() - 1))] = cfg_double(k, v);
            };
            for (int y = 1; y <= kMaxSmg; ++y)
                t["spec.line_max." + id + std::to_string(y)] = [](RunConfig& c, const std::string& k,
                                                                  const std::string& v) {
                    const int a = smg_index(k, k.substr(k.size() - 2, 1));
                    const int b = smg_index(k, k.substr(k.size() - 1));
                    c.spec.line_max[a][b] = cfg_double(k, v);
                };
        }

        t["synthesis.pv_energy_share"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.synthesis.pv_energy_share = cfg_double(k, v);
        };
        t["synthesis.total_generation_kwh"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.synthesis.total_generation_kwh = cfg_double(k, v);
        };
        t["synthesis.total_load_kwh"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.synthesis.total_load_kwh = cfg_double(k, v);
        };
        t["synthesis.pv_rated"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.synthesis.pv_rated = cfg_array<3>(k, v);
        };
        t["synthesis.wt_rated"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.synthesis.wt_rated = cfg_array<3>(k, v);
        };
        t["synthesis.load_ratios"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.synthesis.load_ratios = cfg_array<3>(k, v);
        };

        t["tariff.base_price"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.tariff.base_price = cfg_array<kMonths>(k, v);
        };
        t["tariff.sell_bonus"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.tariff.sell_bonus = cfg_double(k, v);
        };
        t["tariff.load_std_ratio"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.tariff.load_std_ratio = cfg_double(k, v);
        };
        t["tariff.on_peak_elasticity"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.tariff.elasticity.on_peak = cfg_double(k, v);
        };
        t["tariff.off_peak_elasticity"] = [](RunConfig& c, const std::string& k, const std::string& v) {
            c.tariff.elasticity.off_peak = cfg_double(k, v);
        };
        return t;
    }();
    return table;
}

} // namespace detail

/// Applies `key = value` lines on top of `base`. Relative paths resolve against `base_dir`.
inline RunConfig parse_config(std::string_view content, RunConfig base = {},
                              const std::filesystem::path& base_dir = {}) {
    const auto& setters = detail::config_setters();
    std::map<std::string, int> seen;
    auto ls = text::lines(content);
    bool has_version = false;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        std::string_view line = ls[i];
        if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        line = text::trim(line);
        if (line.empty()) continue;
        const std::string where = "config line " + std::to_string(i + 1) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key(text::trim(line.substr(0, eq)));
        const std::string value(text::trim(line.substr(eq + 1)));
        if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
        auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(where + "unknown key '" + key + "'");
        if (auto [pos, fresh] = seen.emplace(key, static_cast<int>(i + 1)); !fresh)
            throw ConfigError(where + "'" + key + "' already set on line " + std::to_string(pos->second));
        try {
            it->second(base, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        } catch (const std::exception& e) {
            throw ConfigError(where + key + ": " + e.what());
        }
        if (key == "schema_version") has_version = true;
    }
    if (!has_version) throw ConfigError("config is missing 'schema_version = " + std::to_string(kConfigSchemaVersion) + "'");
    auto resolve = [&](std::filesystem::path& p) {
        if (!base_dir.empty() && p.is_relative()) p = base_dir / p;
    };
    if (base.data_dir) resolve(*base.data_dir);
    if (base.covid_table) resolve(*base.covid_table);
    try {
        base.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return base;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(text::read_file(path), {}, path.parent_path());
}

/// Settings echoed into reports; paths appear as given.
inline nlohmann::json config_summary(const RunConfig& c) {
    nlohmann::json j;
    j["schema_version"] = c.schema_version;
    j["data_source"] = c.data_dir ? "csv" : "synthetic";
    if (c.data_dir) j["data_dir"] = c.data_dir->generic_string();
    else j["seed"] = c.seed;
    j["january_first"] = to_string(c.january_first);
    j["covid_table"] = c.covid_table ? c.covid_table->generic_string() : std::string("builtin");
    j["scenarios"] = c.scenarios;
    j["horizon_hours"] = c.horizon_hours ? nlohmann::json(*c.horizon_hours) : nlohmann::json("full");
    j["terminal_soc_rule"] = to_string(c.terminal_soc_rule);
    j["edr_mode"] = to_string(c.edr_mode);
    j["solver_mode"] = to_string(c.solver.mode);
    j["chunk_hours"] = c.solver.chunk_hours;
    j["window_node_limit"] = c.solver.window_node_limit;
    j["node_limit"] = c.solver.node_limit;
    j["local_search_passes"] = c.solver.local_search_passes;
    j["target"] = c.spec.target;
    j["edr_cap"] = c.spec.edr_cap;
    return j;
}

} // namespace mgsched
