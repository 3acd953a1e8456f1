#include <gtest/gtest.h>

#include "golden_scenario.hpp"
#include "vodsim/engine.hpp"
#include "vodsim/metrics.hpp"

using namespace vodsim;

namespace {

RunConfig small(StrategyKind s, std::uint64_t seed = 1)
{
    RunConfig c;
    c.strategy = s;
    c.seed = seed;
    c.workload.peer_count = 30;
    c.workload.arrival_rate = 0.2;
    c.workload.seek_rate = 1.0 / 30;
    c.duration_s = 400;
    return c;
}

std::string serialize(const MetricsReport& r)
{
    return summary_csv({r.summary}) + per_peer_csv(r.peers);
}

}  // namespace

TEST(Engine, SinglePeerNoSeeksStreamsWholeVideo)
{
    RunConfig c;
    c.strategy = StrategyKind::None;
    c.video.segment_count = 60;
    c.duration_s = 100;
    c.traces = std::vector<ViewerTrace>{{0, 0.0, {}}};
    const auto r = run_detailed(c);
    EXPECT_EQ(r.report.seeks, 0u);
    EXPECT_DOUBLE_EQ(r.report.server_bits, 60 * c.video.segment_bits());
    ASSERT_EQ(r.report.peers.size(), 1u);
    EXPECT_EQ(r.report.peers[0].rel_hits, 0u);
    EXPECT_EQ(r.report.peers[0].glob_hits, 0u);
}

TEST(Engine, SameSeedSameReport)
{
    for (StrategyKind s : all_strategies()) {
        EXPECT_EQ(serialize(run(small(s, 3))), serialize(run(small(s, 3)))) << to_string(s);
    }
    EXPECT_NE(serialize(run(small(StrategyKind::Cooperative, 3))),
              serialize(run(small(StrategyKind::Cooperative, 4))));
}

TEST(Engine, StrategiesSeeIdenticalTraces)
{
    EXPECT_EQ(workload_traces(small(StrategyKind::None, 5)), workload_traces(small(StrategyKind::Mining, 5)));
}

TEST(Engine, InvariantModeRunsClean)
{
    for (StrategyKind s : all_strategies()) {
        auto c = small(s, 2);
        c.check_invariants = true;
        c.workload.pause_rate = 1.0 / 60;
        c.workload.short_session_fraction = 0.5;
        RunResult r;
        ASSERT_NO_THROW(r = run_detailed(c)) << to_string(s);
        EXPECT_GT(r.invariant_checks, 0u);
        auto plain = c;
        plain.check_invariants = false;
        EXPECT_EQ(serialize(r.report), serialize(run(plain)));
    }
}

TEST(Engine, ConservationPerPeer)
{
    for (StrategyKind s : all_strategies()) {
        const auto r = run_detailed(small(s, 7));
        std::map<PeerId, std::array<std::uint64_t, 4>> recount;
        for (const auto& e : r.seek_log) ++recount[e.peer][static_cast<int>(e.kind)];
        for (const auto& p : r.report.peers) {
            EXPECT_EQ(p.seeks, p.rel_hits + p.glob_hits + p.shortcut + p.server);
            const auto& c = recount[p.peer];
            EXPECT_EQ(p.rel_hits, c[0]);
            EXPECT_EQ(p.glob_hits, c[1]);
            EXPECT_EQ(p.shortcut, c[2]);
            EXPECT_EQ(p.server, c[3]);
            EXPECT_LE(p.played, p.prefetched);
        }
    }
}

TEST(Engine, NoneNeverHitsLocallyAndSendsNoControl)
{
    const auto r = run_detailed(small(StrategyKind::None, 9));
    ASSERT_GT(r.report.seeks, 0u);
    EXPECT_EQ(*r.report.summary.hr_r, 0.0);
    EXPECT_EQ(r.report.summary.overhead_msgs, 0u);
    for (const auto& e : r.seek_log) {
        EXPECT_NE(e.kind, SeekKind::RelativeHit);
        EXPECT_NE(e.kind, SeekKind::ShortcutFetch);
    }
}

TEST(Engine, RelativeHitsHaveZeroLatency)
{
    const auto r = run_detailed(small(StrategyKind::Cooperative, 4));
    for (const auto& e : r.seek_log) {
        if (e.kind == SeekKind::RelativeHit) {
            ASSERT_TRUE(e.latency);
            EXPECT_EQ(*e.latency, 0.0);
        } else if (e.latency) {
            EXPECT_GE(*e.latency, 1.0);  // at least one full segment transfer
        }
    }
}

TEST(Engine, SweepMatchesSerialRuns)
{
    std::vector<RunConfig> cfgs;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto c = small(all_strategies()[seed % 5], seed);
        c.workload.peer_count = 10;
        c.duration_s = 200;
        cfgs.push_back(c);
    }
    std::vector<std::string> serial;
    for (const auto& c : cfgs) serial.push_back(serialize(run(c)));
    for (unsigned par : {1u, 5u, 8u}) {
        const auto got = sweep(cfgs, par);
        ASSERT_EQ(got.size(), cfgs.size());
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(serialize(got[i]), serial[i]) << par << " " << i;
    }
    const auto one = sweep({cfgs[0]}, 8);
    EXPECT_EQ(serialize(one[0]), serial[0]);
}

TEST(Engine, SweepReportsFailingIndex)
{
    std::vector<RunConfig> cfgs(3, small(StrategyKind::None));
    for (auto& c : cfgs) c.workload.peer_count = 3;
    cfgs[1].duration_s = -1;
    try {
        sweep(cfgs, 2);
        FAIL() << "expected SweepError";
    } catch (const SweepError& e) {
        EXPECT_EQ(e.index(), 1u);
    }
}

TEST(Engine, ConfigErrorsNameTheField)
{
    auto expect_field = [](RunConfig c, const std::string& field) {
        try {
            c.validate();
            ADD_FAILURE() << "no error for " << field;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.field(), field);
        }
    };
    RunConfig c;
    c.duration_s = 0;
    expect_field(c, "run.duration_s");
    c = RunConfig{};
    c.session_width_s = -5;
    expect_field(c, "run.session_width_s");
    c = RunConfig{};
    c.params.cache_capacity = 0;
    expect_field(c, "strategy.cache_capacity");
    c = RunConfig{};
    c.params.request_timeout_s = 0;
    expect_field(c, "strategy.request_timeout_s");
    c = RunConfig{};
    c.traces = std::vector<ViewerTrace>{{0, 5.0, {{1.0, ViewerEventKind::Seek, 3}}}};
    expect_field(c, "traces");
    EXPECT_THROW(run(c), ConfigError);
}

TEST(Engine, GoldenMicroRunTimeline)
{
    const auto r = run_detailed(golden::micro_run());
    EXPECT_EQ(format_timeline(r.timeline), read_text_file(VODSIM_TEST_DATA "/golden/micro_timeline.txt"));
    EXPECT_EQ(summary_csv({r.report.summary}), read_text_file(VODSIM_TEST_DATA "/golden/micro_summary.csv"));
    EXPECT_EQ(per_peer_csv(r.report.peers), read_text_file(VODSIM_TEST_DATA "/golden/micro_per_peer.csv"));
    EXPECT_EQ(r.report.request_msgs, 8u);
}

TEST(Engine, UnansweredShortcutRequestFallsBackToServer)
{
    // A sits alone in session 0 and jumps ahead; B opens session 1 with A as
    // its only shortcut. B's first plan (playhead 10) asks A for segment 10,
    // which A never cached, so the request times out and goes to the server.
    RunConfig c;
    c.strategy = StrategyKind::Cooperative;
    c.video.segment_count = 400;
    c.topology.as_count = 1;
    c.topology.routers_per_as = 1;
    c.topology.access_delay_min_ms = 5;
    c.topology.access_delay_max_ms = 5;
    c.params.prefetch_budget = 1;
    c.params.urgent_window = 0;
    c.params.request_timeout_s = 2;
    c.duration_s = 150;
    c.record_timeline = true;
    c.traces = std::vector<ViewerTrace>{{0, 0.0, {{0.5, ViewerEventKind::Seek, 200}}}, {1, 130.0, {}}};
    const auto r = run_detailed(c);

    bool timed_out = false, delivered = false, direct = false;
    for (const auto& e : r.timeline) {
        if (e.peer == 1 && e.kind == EventKind::RequestTimeout) {
            EXPECT_DOUBLE_EQ(e.time, 142.0);
            EXPECT_EQ(e.detail, "segment=10 scope=SHORTCUT->SERVER");
            timed_out = true;
        }
        if (e.peer == 1 && e.kind == EventKind::TransferComplete && e.detail.find("segment=10 ") == 0) {
            // timeout + server RTT + transfer
            EXPECT_NEAR(e.time, 140.0 + 2.0 + 0.02 + 1.0, 1e-9);
            EXPECT_EQ(e.detail, "segment=10 prefetch provider=server elapsed=3.020000");
            delivered = true;
        }
        if (e.peer == 0 && e.kind == EventKind::TransferComplete && e.detail.find("prefetch") != std::string::npos &&
            !direct) {
            // nobody holds it and A has no shortcuts: straight to the server
            EXPECT_NE(e.detail.find("provider=server elapsed=1.020000"), std::string::npos) << e.detail;
            direct = true;
        }
        if (e.peer == 0) EXPECT_NE(e.kind, EventKind::RequestTimeout);
    }
    EXPECT_TRUE(timed_out);
    EXPECT_TRUE(delivered);
    EXPECT_TRUE(direct);
}
