#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "mgsched/error.hpp"

namespace mgsched {

inline constexpr int kMaxSmg = 3;

using LineMatrix = std::array<std::array<double, kMaxSmg>, kMaxSmg>;

/// Static system parameters. Row z, column y of line_max is the line between
/// SMG z and SMG y; the diagonal holds each SMG's line to the main grid.
struct SystemSpec {
    int n_smg = 3;
    LineMatrix line_max{{{16.0, 8.0, 4.0}, {8.0, 4.0, 2.0}, {4.0, 2.0, 2.0}}};
    std::array<double, kMaxSmg> bat_min{-2.0, -1.0, -0.5};
    std::array<double, kMaxSmg> bat_max{2.0, 1.0, 0.5};
    double soc_min = 0.2;
    double soc_max = 1.0;
    std::array<double, kMaxSmg> base_power{4.0, 2.0, 1.0};
    std::array<double, kMaxSmg> target{150.0, 250.0, 650.0};
    double edr_cap = 500.0;
    double target_total = 1050.0;
    std::optional<double> big_m; // derived from each month's data when unset
    int months = 12;

    void validate() const {
        if (n_smg < 1 || n_smg > kMaxSmg) throw DomainError("n_smg must be in 1..3");
        for (int z = 0; z < n_smg; ++z) {
            for (int y = 0; y < n_smg; ++y) {
                if (!(line_max[z][y] >= 0.0) || !std::isfinite(line_max[z][y]))
                    throw DomainError("line limits must be finite and >= 0");
                if (line_max[z][y] != line_max[y][z]) throw DomainError("internal line limits must be symmetric");
            }
            if (!(bat_max[z] >= 0.0) || bat_min[z] != -bat_max[z])
                throw DomainError("battery bounds must satisfy bat_min = -bat_max <= 0");
            if (!(base_power[z] > 0.0)) throw DomainError("battery base power must be positive");
            if (!std::isfinite(target[z])) throw DomainError("targets must be finite");
        }
        if (!(soc_min >= 0.0 && soc_min < soc_max)) throw DomainError("need 0 <= soc_min < soc_max");
        if (!(edr_cap >= 0.0)) throw DomainError("EDR cap must be >= 0");
        if (big_m && !(*big_m > 0.0)) throw DomainError("big_m must be positive");
        if (months != 12) throw DomainError("the model covers exactly 12 months");
    }
};

enum class Architecture { mmg, smg };
enum class TerminalSocRule { free, return_to_initial };
enum class EdrMode { hard, report_only };

inline const char* to_string(Architecture a) { return a == Architecture::mmg ? "mmg" : "smg"; }
inline const char* to_string(TerminalSocRule r) { return r == TerminalSocRule::free ? "free" : "return_to_initial"; }
inline const char* to_string(EdrMode e) { return e == EdrMode::hard ? "hard" : "report_only"; }

inline Architecture parse_architecture(const std::string& s) {
    if (s == "mmg" || s == "MMG") return Architecture::mmg;
    if (s == "smg" || s == "SMG") return Architecture::smg;
    throw ConfigError("architecture must be mmg or smg, got '" + s + "'");
}

inline TerminalSocRule parse_terminal_rule(const std::string& s) {
    if (s == "free") return TerminalSocRule::free;
    if (s == "return_to_initial") return TerminalSocRule::return_to_initial;
    throw ConfigError("terminal_soc_rule must be free or return_to_initial, got '" + s + "'");
}

inline EdrMode parse_edr_mode(const std::string& s) {
    if (s == "hard") return EdrMode::hard;
    if (s == "report_only") return EdrMode::report_only;
    throw ConfigError("edr_mode must be hard or report_only, got '" + s + "'");
}

struct ScenarioConfig {
    Architecture architecture = Architecture::mmg;
    bool covid = true;
    TerminalSocRule terminal_soc_rule = TerminalSocRule::free;
    EdrMode edr_mode = EdrMode::hard;

    /// 1: MMG with COVID, 2: MMG without, 3: SMG with, 4: SMG without.
    int id() const { return (architecture == Architecture::mmg ? 1 : 3) + (covid ? 0 : 1); }

    static ScenarioConfig from_id(int id, TerminalSocRule rule = TerminalSocRule::free, EdrMode mode = EdrMode::hard) {
        if (id < 1 || id > 4) throw ConfigError("scenario id must be in 1..4");
        return {id <= 2 ? Architecture::mmg : Architecture::smg, id % 2 == 1, rule, mode};
    }

    std::string label() const {
        return std::string(architecture == Architecture::mmg ? "MMG" : "SMG") + (covid ? " with COVID" : " without COVID");
    }
};

} // namespace mgsched
