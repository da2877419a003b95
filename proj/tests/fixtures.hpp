#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "mgsched/mgsched.hpp"

namespace fixtures {

using namespace mgsched;

/// Month inputs with constant hourly values and grid sell at 1.1x the buy price.
inline MonthInputs flat_inputs(int hours, SmgValues load, SmgValues pv, SmgValues wt, double price, double cvd = 1.0,
                               int month = 1) {
    MonthInputs in;
    in.month = month;
    in.cvd = cvd;
    in.load.assign(hours, load);
    in.pv_max.assign(hours, pv);
    in.wt_max.assign(hours, wt);
    in.buy_price.assign(hours, price);
    in.grid_sell_price.assign(hours, 1.1 * price);
    in.internal_price.assign(hours, price);
    return in;
}

struct TinyCase {
    SystemSpec spec;
    ScenarioConfig scenario;
    MonthInputs inputs;
    SmgValues initial_soc{};
};

/// Random instance within the default system envelopes: at most
/// `max_hours` hours, one or two SMGs, targets scaled to the short horizon.
inline TinyCase random_tiny_case(std::uint64_t seed, int max_hours = 6, int max_binaries = 24) {
    Rng rng(seed);
    TinyCase c;
    for (;;) {
        c.spec = SystemSpec{};
        c.spec.n_smg = rng.uniform() < 0.5 ? 1 : 2;
        c.scenario.architecture = rng.uniform() < 0.5 ? Architecture::mmg : Architecture::smg;
        const int hours = 1 + static_cast<int>(rng.uniform() * max_hours) % max_hours;
        const int n = c.spec.n_smg;
        const int per_hour = n + (c.scenario.architecture == Architecture::mmg ? n * (n - 1) / 2 : 0);
        if (per_hour * hours + n > max_binaries) continue;
        c.scenario.covid = rng.uniform() < 0.5;
        c.scenario.edr_mode = rng.uniform() < 0.5 ? EdrMode::hard : EdrMode::report_only;
        c.scenario.terminal_soc_rule = rng.uniform() < 0.3 ? TerminalSocRule::return_to_initial : TerminalSocRule::free;
        c.inputs.month = 1 + static_cast<int>(rng.uniform() * 12) % 12;
        c.inputs.cvd = c.scenario.covid ? rng.uniform(0.92, 1.02) : 1.0;
        for (int t = 0; t < hours; ++t) {
            SmgValues l{}, p{}, w{};
            for (int z = 0; z < n; ++z) {
                const double scale = c.spec.bat_max[z] * 3.0;
                l[z] = rng.uniform(0.0, scale);
                p[z] = rng.uniform() < 0.4 ? 0.0 : rng.uniform(0.0, 1.5 * scale);
                w[z] = rng.uniform(0.0, scale);
            }
            c.inputs.load.push_back(l);
            c.inputs.pv_max.push_back(p);
            c.inputs.wt_max.push_back(w);
            const double price = rng.uniform(0.08, 0.2);
            c.inputs.buy_price.push_back(price);
            c.inputs.grid_sell_price.push_back(1.1 * price);
            c.inputs.internal_price.push_back(price);
        }
        for (int z = 0; z < n; ++z) {
            c.spec.target[z] = rng.uniform(-0.2, 0.8) * hours;
            c.initial_soc[z] = rng.uniform(c.spec.soc_min, c.spec.soc_max);
        }
        c.spec.edr_cap = rng.uniform(0.05, 1.0) * hours;
        return c;
    }
}

/// Options for year runs in tests: the first `hours` of each month, one window, few nodes.
inline RunOptions quick_run(int hours = 6, long nodes = 60) {
    RunOptions o;
    o.horizon_hours = hours;
    o.solver.node_limit = nodes;
    o.solver.window_node_limit = nodes;
    return o;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("mgsched_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline MonthlyInstance build(const TinyCase& c, bool risk = true) {
    return build_instance(c.spec, c.scenario, c.inputs, c.initial_soc, {.include_risk = risk});
}

} // namespace fixtures
