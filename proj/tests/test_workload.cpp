#include <gtest/gtest.h>

#include <sstream>

#include "vodsim/workload.hpp"

using namespace vodsim;

namespace {

std::size_t count_kind(const std::vector<ViewerTrace>& ts, ViewerEventKind k)
{
    std::size_t n = 0;
    for (const auto& t : ts)
        for (const auto& e : t.events) n += e.kind == k;
    return n;
}

}  // namespace

TEST(Workload, ZeroSeekRateHasNoSeeks)
{
    WorkloadParams p;
    p.seek_rate = 0;
    const auto ts = generate_traces(p, Video{});
    EXPECT_EQ(ts.size(), 100u);
    EXPECT_EQ(count_kind(ts, ViewerEventKind::Seek), 0u);
}

TEST(Workload, AllShortSessionsLeaveEarly)
{
    WorkloadParams p;
    p.short_session_fraction = 1.0;
    p.horizon_s = 1e6;
    const auto ts = generate_traces(p, Video{});
    for (const auto& t : ts) {
        ASSERT_FALSE(t.events.empty());
        ASSERT_EQ(t.events.back().kind, ViewerEventKind::Leave);
        ASSERT_LT(t.events.back().time - t.arrival, 300.0);
    }
}

TEST(Workload, WellFormedAndInRange)
{
    WorkloadParams p;
    p.pause_rate = 1.0 / 200;
    p.seek_rate = 1.0 / 30;
    Video v;
    v.segment_count = 300;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        p.seed = seed;
        for (const auto& t : generate_traces(p, v)) {
            ASSERT_TRUE(t.well_formed());
            for (const auto& e : t.events) {
                ASSERT_LT(e.time, p.horizon_s);
                if (e.kind == ViewerEventKind::Seek) ASSERT_LT(e.target, v.segment_count);
            }
        }
    }
}

TEST(Workload, Deterministic)
{
    WorkloadParams p;
    p.seed = 42;
    EXPECT_EQ(generate_traces(p, Video{}), generate_traces(p, Video{}));
    WorkloadParams q = p;
    q.seed = 43;
    EXPECT_NE(generate_traces(p, Video{}), generate_traces(q, Video{}));
}

TEST(Workload, UniformTargetsChiSquare)
{
    WorkloadParams p;
    p.peer_count = 10000;
    p.seek_distribution = SeekDistribution::Uniform;
    p.seek_rate = 1.0 / 20;
    p.short_session_fraction = 0;
    p.arrival_rate = 100;
    p.horizon_s = 1e6;
    Video v;
    v.segment_count = 100;
    std::vector<double> bins(v.segment_count, 0.0);
    double n = 0;
    for (const auto& t : generate_traces(p, v))
        for (const auto& e : t.events)
            if (e.kind == ViewerEventKind::Seek) {
                ++bins[e.target];
                ++n;
            }
    ASSERT_GT(n, 20000);
    const double expect = n / v.segment_count;
    double chi = 0;
    for (double b : bins) chi += (b - expect) * (b - expect) / expect;
    EXPECT_LT(chi, 148.2);  // df 99, p = 0.001
}

TEST(Workload, ForwardFraction)
{
    WorkloadParams p;
    p.peer_count = 2000;
    p.arrival_rate = 10;
    p.seek_rate = 1.0 / 60;
    p.seek_window = 0;
    p.short_session_fraction = 0;
    Video v;
    std::size_t fwd = 0, all = 0;
    for (const auto& t : generate_traces(p, v)) {
        // reconstruct the playhead just before each seek
        double pos = 0, last = t.arrival;
        for (const auto& e : t.events) {
            if (e.kind != ViewerEventKind::Seek) continue;
            pos += e.time - last;
            last = e.time;
            const auto x = static_cast<SegmentId>(pos);
            if (x > 0 && x + 1 < v.segment_count) {
                ++all;
                fwd += e.target > x;
            }
            pos = e.target;
        }
    }
    ASSERT_GT(all, 3000u);
    EXPECT_NEAR(static_cast<double>(fwd) / all, 0.7, 0.03);
}

TEST(Workload, SeekWindowBoundsZipfJumps)
{
    WorkloadParams p;
    p.seek_window = 10;
    p.seek_rate = 1.0 / 30;
    p.short_session_fraction = 0;
    for (const auto& t : generate_traces(p, Video{})) {
        double pos = 0, last = t.arrival;
        for (const auto& e : t.events) {
            pos += e.time - last;
            last = e.time;
            if (e.kind != ViewerEventKind::Seek) continue;
            const long long x = static_cast<long long>(pos);
            ASSERT_LE(std::llabs(static_cast<long long>(e.target) - x), 10);
            pos = e.target;
        }
    }
}

TEST(Workload, TraceTextRoundTrip)
{
    WorkloadParams p;
    p.pause_rate = 1.0 / 100;
    p.seek_rate = 1.0 / 40;
    const auto ts = generate_traces(p, Video{});
    const std::string text = format_traces(ts);
    EXPECT_EQ(parse_traces(text), ts);
    EXPECT_EQ(format_traces(parse_traces(text)), text);
    std::istringstream bad("0 1.0; 2.0 JUMP 4\n");
    EXPECT_THROW(read_traces(bad), std::runtime_error);
}

TEST(Workload, PopularityRanksArePermutation)
{
    auto r = popularity_ranks(50, 3);
    std::sort(r.begin(), r.end());
    for (std::uint32_t i = 0; i < 50; ++i) EXPECT_EQ(r[i], i + 1);
}
