#include <gtest/gtest.h>

#include "vodsim/rng.hpp"
#include "vodsim/scenario.hpp"

using namespace vodsim;

namespace {

std::string field_of(const std::string& text)
{
    try {
        parse_scenario_text(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST(Scenario, EmptyFileGivesDefaults)
{
    const auto o = parse_scenario_text("");
    EXPECT_EQ(format_scenario(o), format_scenario(RunOptions{}));
    EXPECT_EQ(o.config.strategy, StrategyKind::Cooperative);
    EXPECT_DOUBLE_EQ(o.config.video.streaming_rate, 512000.0);
    EXPECT_DOUBLE_EQ(o.config.topology.server_up_bps, 20e6);
    EXPECT_DOUBLE_EQ(o.config.session_width_s, 120.0);
    EXPECT_EQ(o.config.params.urgent_window, 20u);
}

TEST(Scenario, OverridesApply)
{
    const auto o = parse_scenario_text(
        "[strategy]\nname = mining\nprefetch_budget = 7\n[run]\nseed = 42\nrepeats = 3\n"
        "[workload]\nseek_distribution = uniform\n[topology]\naccess_delay_max_ms = 8\n");
    EXPECT_EQ(o.config.strategy, StrategyKind::Mining);
    EXPECT_EQ(o.config.seed, 42u);
    EXPECT_EQ(o.repeats, 3u);
    EXPECT_EQ(o.config.params.prefetch_budget, 7u);
    EXPECT_EQ(o.config.workload.seek_distribution, SeekDistribution::Uniform);
    EXPECT_DOUBLE_EQ(o.config.topology.access_delay_max_ms, 8.0);

    RunOptions p;
    apply_setting(p, "strategy", "name", "random");
    EXPECT_EQ(p.config.strategy, StrategyKind::Random);
}

TEST(Scenario, RejectsUnknownAndMalformed)
{
    EXPECT_EQ(field_of("[strategy]\nbogus = 1\n"), "strategy.bogus");
    EXPECT_EQ(field_of("[nonsense]\nx = 1\n"), "nonsense");
    EXPECT_EQ(field_of("[run]\nseed = abc\n"), "run.seed");
    EXPECT_EQ(field_of("[strategy]\nname = fastest\n"), "strategy.name");
    EXPECT_EQ(field_of("[strategy]\nretain_played = maybe\n"), "strategy.retain_played");
    EXPECT_EQ(field_of("seed = 3\n"), "seed");
    EXPECT_NE(field_of("[run\nseed = 3\n"), "");
}

TEST(Scenario, FinalizeValidates)
{
    auto o = parse_scenario_text("[run]\nduration_s = -4\n");
    try {
        finalize(o);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "run.duration_s");
    }
    auto q = parse_scenario_text("[run]\nparallelism = 0\n");
    EXPECT_THROW(finalize(q), ConfigError);
}

TEST(Scenario, FormatRoundTrips)
{
    auto o = parse_scenario_text("[strategy]\nname = popularity\neviction = prefetch_first\n[run]\nseed = 9\n");
    const auto text = format_scenario(o);
    EXPECT_EQ(format_scenario(parse_scenario_text(text)), text);
    for (const auto& k : scenario_keys()) EXPECT_NE(text.find(k.key + " = "), std::string::npos) << k.key;
}

TEST(Scenario, FuzzedFilesAlwaysGetAVerdict)
{
    Rng r(1234);
    const auto& keys = scenario_keys();
    const std::vector<std::string> values{"1", "0", "-3", "1e9", "abc", "", "true", "zipf", "0.5", "nan",
                                          "cooperative", "99999999999999999999", "=", "[x]", "1.5.2"};
    const std::vector<std::string> sections{"video", "topology", "workload", "strategy", "run", "extra"};
    int accepted = 0, rejected = 0;
    for (int i = 0; i < 3000; ++i) {
        std::string text;
        const auto lines = r.below(6);
        for (std::uint64_t l = 0; l < lines; ++l) {
            if (r.bernoulli(0.3)) text += "[" + sections[r.below(sections.size())] + "]\n";
            const std::string key = r.bernoulli(0.9) ? keys[r.below(keys.size())].key : "junk";
            text += key + " = " + values[r.below(values.size())] + "\n";
            if (r.bernoulli(0.05)) text += "garbage line without equals\n";
        }
        try {
            auto o = parse_scenario_text(text);
            finalize(o);
            ++accepted;
        } catch (const ConfigError&) {
            ++rejected;
        } catch (const std::exception& e) {
            FAIL() << "unstructured error `" << e.what() << "` for:\n" << text;
        }
    }
    EXPECT_GT(accepted, 0);
    EXPECT_GT(rejected, 0);
}
