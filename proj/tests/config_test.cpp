#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace mgsched;

namespace {

RunConfig parse(const std::string& body) { return parse_config("schema_version = 1\n" + body); }

std::string error_of(const std::string& content) {
    try {
        parse_config(content);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Config, ExampleFileIsTheDefaults) {
    const auto c = load_config(std::filesystem::path(MGSCHED_SOURCE_DIR) / "config" / "example.conf");
    const RunConfig d;
    EXPECT_EQ(c.seed, d.seed);
    EXPECT_EQ(c.scenarios, d.scenarios);
    EXPECT_EQ(c.edr_mode, d.edr_mode);
    EXPECT_EQ(c.solver.mode, d.solver.mode);
    EXPECT_EQ(c.solver.window_node_limit, d.solver.window_node_limit);
    EXPECT_EQ(c.spec.line_max, d.spec.line_max);
    EXPECT_EQ(c.spec.target, d.spec.target);
    EXPECT_FALSE(c.spec.big_m);
    EXPECT_EQ(c.tariff.base_price, d.tariff.base_price);
    EXPECT_EQ(c.tariff.sell_bonus, d.tariff.sell_bonus);
    EXPECT_EQ(c.synthesis.pv_energy_share, d.synthesis.pv_energy_share);
    EXPECT_FALSE(c.horizon_hours);
    EXPECT_FALSE(c.data_dir);
}

TEST(Config, ValuesAndComments) {
    const auto c = parse(R"(
seed = 42               # trailing comment
scenarios = 3, 1
edr_mode = hard
horizon_hours = 48
spec.target.2 = 300.5
spec.line_max.13 = 5
spec.line_max.31 = 5
spec.big_m = 1e6
solver.mode = exact
initial_soc = 0.5,0.6,0.7
format = json
hourly = off
)");
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.scenarios, (std::vector<int>{3, 1}));
    EXPECT_EQ(c.edr_mode, EdrMode::hard);
    EXPECT_EQ(*c.horizon_hours, 48);
    EXPECT_EQ(c.spec.target[1], 300.5);
    EXPECT_EQ(c.spec.line_max[0][2], 5.0);
    EXPECT_EQ(*c.spec.big_m, 1e6);
    EXPECT_EQ(c.solver.mode, SolverMode::exact);
    EXPECT_EQ((*c.initial_soc)[2], 0.7);
    EXPECT_EQ(c.format, ReportFormat::json);
    EXPECT_FALSE(c.hourly);
    EXPECT_FALSE(parse("horizon_hours = full\nspec.big_m = auto\n").spec.big_m);
}

TEST(Config, AllSystemKeysAreAccepted) {
    std::vector<std::string> keys{"spec.n_smg", "spec.months", "spec.soc_min", "spec.soc_max",
                                  "spec.edr_cap", "spec.target_total", "spec.big_m"};
    for (int z = 1; z <= 3; ++z) {
        for (const char* k : {"bat_min", "bat_max", "base_power", "target"})
            keys.push_back("spec." + std::string(k) + "." + std::to_string(z));
        for (int y = 1; y <= 3; ++y) keys.push_back("spec.line_max." + std::to_string(z) + std::to_string(y));
    }
    ASSERT_EQ(keys.size(), 28u);
    const auto& setters = detail::config_setters();
    for (const auto& k : keys) EXPECT_TRUE(setters.count(k)) << k;
}

TEST(Config, ErrorsNameTheLine) {
    EXPECT_NE(error_of("schema_version = 1\nbogus = 3\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("schema_version = 1\nseed = 1\nseed = 2\n").find("already set on line 2"), std::string::npos);
    EXPECT_NE(error_of("schema_version = 1\nseed =\n").find("missing value"), std::string::npos);
    EXPECT_NE(error_of("schema_version = 1\nseed 4\n").find("key = value"), std::string::npos);
    EXPECT_NE(error_of("schema_version = 1\nspec.edr_cap = lots\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("seed = 1\n").find("schema_version"), std::string::npos);
    EXPECT_NE(error_of("schema_version = 2\n").find("schema_version"), std::string::npos);
}

TEST(Config, RejectsInconsistentValues) {
    EXPECT_THROW(parse("spec.line_max.12 = 7\n"), ConfigError);
    EXPECT_THROW(parse("spec.bat_min.1 = -1\n"), ConfigError);
    EXPECT_THROW(parse("scenarios = 5\n"), ConfigError);
    EXPECT_EQ(parse("scenarios = 2,2\n").scenarios, (std::vector<int>{2}));
    EXPECT_THROW(parse("edr_mode = soft\n"), ConfigError);
    EXPECT_THROW(parse("initial_soc = 0.1,1,1\n"), ConfigError);
    EXPECT_THROW(parse("horizon_hours = 0\n"), ConfigError);
    EXPECT_THROW(parse("solver.chunk_hours = 0\n"), ConfigError);
    EXPECT_THROW(parse("tariff.base_price = 0.1,0.2\n"), ConfigError);
    EXPECT_THROW(parse("spec.months = 6\n"), ConfigError);
    EXPECT_THROW(parse("hourly = maybe\n"), ConfigError);
}

TEST(Config, RelativePathsResolveAgainstTheFile) {
    const auto c = parse_config("schema_version = 1\ndata_dir = d\ncovid_table = /abs/c.csv\n", {}, "/etc/x");
    EXPECT_EQ(*c.data_dir, std::filesystem::path("/etc/x/d"));
    EXPECT_EQ(*c.covid_table, std::filesystem::path("/abs/c.csv"));
    const auto j = config_summary(c);
    EXPECT_EQ(j["data_source"], "csv");
    EXPECT_EQ(j["horizon_hours"], "full");
}
