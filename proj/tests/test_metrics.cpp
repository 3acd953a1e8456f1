#include <gtest/gtest.h>

#include <filesystem>

#include "vodsim/metrics.hpp"
#include "vodsim/rng.hpp"

using namespace vodsim;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("vodsim_metrics_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST(Metrics, HitRatios)
{
    MetricsLedger m;
    EXPECT_FALSE(relative_hit_ratio(m));
    m.record_seek(0, 1, 5, SeekKind::RelativeHit);
    m.record_seek(0, 2, 6, SeekKind::GlobalHit);
    m.record_seek(1, 3, 7, SeekKind::ServerFetch);
    m.record_seek(1, 4, 8, SeekKind::ShortcutFetch);
    EXPECT_DOUBLE_EQ(*relative_hit_ratio(m), 0.25);
    EXPECT_DOUBLE_EQ(*global_hit_ratio(m), 0.25);
    for (const auto& [id, s] : m.peers()) EXPECT_EQ(s.seeks, s.outcomes());
}

TEST(Metrics, UtilizationExamples)
{
    MetricsLedger a;
    a.peer(0).prefetched_segments = 4;
    a.peer(0).prefetched_played = 2;
    a.peer(1).prefetched_segments = 4;
    a.peer(1).prefetched_played = 4;
    auto u = utilization_ratios(a);
    EXPECT_DOUBLE_EQ(*u.relative, 0.75);
    EXPECT_DOUBLE_EQ(*u.global, 0.75);

    a.peer(0).prefetched_played = 0;
    u = utilization_ratios(a);
    EXPECT_DOUBLE_EQ(*u.relative, 0.5);
    EXPECT_DOUBLE_EQ(*u.global, 0.5);

    // relative and global differ once peers prefetch unequal amounts
    MetricsLedger b;
    b.peer(0).prefetched_segments = 1;
    b.peer(0).prefetched_played = 1;
    b.peer(1).prefetched_segments = 9;
    u = utilization_ratios(b);
    EXPECT_DOUBLE_EQ(*u.relative, 0.5);
    EXPECT_DOUBLE_EQ(*u.global, 0.1);
    EXPECT_FALSE(utilization_ratios(MetricsLedger{}).relative);
}

TEST(Metrics, LatencyCompletesOnce)
{
    MetricsLedger m;
    const auto i = m.record_seek(2, 0, 1, SeekKind::ServerFetch);
    m.complete_seek(i, 1.5);
    m.complete_seek(i, 9.0);
    EXPECT_EQ(m.peer(2).seek_latencies, (std::vector<double>{1.5}));
    EXPECT_DOUBLE_EQ(*m.seek_log()[i].latency, 1.5);
}

TEST(Metrics, ReportAgreesWithRecountFromLog)
{
    Rng r(3);
    MetricsLedger m;
    for (int i = 0; i < 500; ++i) {
        const auto kind = static_cast<SeekKind>(r.below(4));
        const auto idx = m.record_seek(static_cast<PeerId>(r.below(10)), i, 0, kind);
        if (kind == SeekKind::RelativeHit) m.complete_seek(idx, 0.0);
        else if (r.bernoulli(0.9)) m.complete_seek(idx, r.uniform(0, 3));
    }
    m.peer(3).control_msgs = 17;
    const auto rep = build_report("random", 1, m);
    std::uint64_t rel = 0, glob = 0;
    std::vector<double> lat;
    for (const auto& e : m.seek_log()) {
        rel += e.kind == SeekKind::RelativeHit;
        glob += e.kind == SeekKind::GlobalHit;
        if (e.latency) lat.push_back(*e.latency);
    }
    EXPECT_NEAR(*rep.summary.hr_r, rel / 500.0, 5e-7);
    EXPECT_NEAR(*rep.summary.hr_g, glob / 500.0, 5e-7);
    double sum = 0;
    for (double x : lat) sum += x;
    EXPECT_NEAR(*rep.summary.lat_mean_s, sum / lat.size(), 5e-7);
    std::sort(lat.begin(), lat.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * lat.size()));
    EXPECT_NEAR(*rep.summary.lat_p95_s, lat[rank - 1], 5e-7);
    EXPECT_EQ(rep.summary.overhead_msgs, 17u);
    EXPECT_EQ(rep.seeks, 500u);
    std::uint64_t rows = 0;
    for (const auto& p : rep.peers) {
        EXPECT_EQ(p.seeks, p.rel_hits + p.glob_hits + p.shortcut + p.server);
        rows += p.seeks;
    }
    EXPECT_EQ(rows, 500u);
}

TEST(Metrics, MedianOfEvenCount)
{
    MetricsLedger m;
    for (double l : {1.0, 4.0, 2.0, 3.0}) m.complete_seek(m.record_seek(0, 0, 0, SeekKind::ServerFetch), l);
    const auto rep = build_report("none", 1, m);
    EXPECT_DOUBLE_EQ(*rep.lat_median_s, 2.5);
    EXPECT_DOUBLE_EQ(*rep.summary.lat_p95_s, 4.0);
    EXPECT_DOUBLE_EQ(*rep.summary.lat_mean_s, 2.5);
}

TEST(Metrics, CsvHeadersAreExact)
{
    EXPECT_EQ(summary_csv({}), std::string(kSummaryHeader) + "\n");
    EXPECT_EQ(per_peer_csv({}), std::string(kPerPeerHeader) + "\n");
    EXPECT_EQ(std::string(kPerPeerHeader), "peer,seeks,rel_hits,glob_hits,shortcut,server,prefetched,played,ctrl_msgs");
}

TEST(Metrics, CsvRoundTripWithMissingValues)
{
    SummaryRow a{"cooperative", 3, 0.5, 0.25, 1.020000, 1.5, std::nullopt, std::nullopt, 12};
    SummaryRow b{"none", 4, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt, 0};
    const auto text = summary_csv({a, b});
    EXPECT_EQ(parse_summary_csv(text), (std::vector<SummaryRow>{a, b}));
    EXPECT_NE(text.find("none,4,,,,,,,0"), std::string::npos);

    std::vector<PeerRow> rows{{0, 3, 1, 1, 0, 1, 5, 2, 9}, {7, 0, 0, 0, 0, 0, 0, 0, 0}};
    EXPECT_EQ(parse_per_peer_csv(per_peer_csv(rows)), rows);
    EXPECT_THROW(parse_per_peer_csv("peer,seeks\n1,2\n"), std::runtime_error);
}

TEST(Metrics, ExportAndReadBack)
{
    MetricsLedger m;
    m.peer(0).arrival = 0;
    m.complete_seek(m.record_seek(0, 1, 1, SeekKind::GlobalHit), 1.25);
    m.peer(1).prefetched_segments = 3;
    m.peer(1).prefetched_played = 1;
    const auto rep = build_report("mining", 7, m);
    const auto dir = scratch("export");
    export_report(rep, dir);
    EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / per_peer_filename(rep.summary)));
    EXPECT_EQ(per_peer_filename(rep.summary), "per_peer_mining_7.csv");
    const auto back = read_report(dir, "mining", 7);
    EXPECT_EQ(back.summary, rep.summary);
    EXPECT_EQ(back.peers, rep.peers);
    const auto json = read_text_file(dir / "summary_mining_7.json");
    EXPECT_NE(json.find("\"hr_r\""), std::string::npos);
}

TEST(Metrics, EmptyRunHasHeaderOnlyPerPeer)
{
    const auto rep = build_report("none", 1, MetricsLedger{});
    EXPECT_EQ(per_peer_csv(rep.peers), std::string(kPerPeerHeader) + "\n");
    EXPECT_FALSE(rep.summary.hr_r);
}
