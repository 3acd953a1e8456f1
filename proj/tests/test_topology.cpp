#include <gtest/gtest.h>

#include <limits>

#include "vodsim/topology.hpp"

using namespace vodsim;

namespace {

TopologyParams params(std::uint32_t as, std::uint32_t routers, std::uint32_t peers, std::uint64_t seed)
{
    TopologyParams p;
    p.as_count = as;
    p.routers_per_as = routers;
    p.peer_count = peers;
    p.seed = seed;
    return p;
}

}  // namespace

TEST(Topology, SmallestStar)
{
    const auto t = generate_topology(params(1, 1, 1, 7));
    EXPECT_EQ(t.router_count(), 1u);
    EXPECT_EQ(t.peer_count(), 1u);
    EXPECT_EQ(t.access(kServerHost).router, 0u);
    EXPECT_EQ(t.access(host_of(0)).router, 0u);
    EXPECT_DOUBLE_EQ(t.path_latency_ms(kServerHost, host_of(0)),
                     t.access(kServerHost).delay_ms + t.access(host_of(0)).delay_ms);
}

TEST(Topology, Deterministic)
{
    EXPECT_EQ(generate_topology(params(2, 4, 50, 1)).dump(), generate_topology(params(2, 4, 50, 1)).dump());
    EXPECT_NE(generate_topology(params(2, 4, 50, 1)).dump(), generate_topology(params(2, 4, 50, 2)).dump());
}

TEST(Topology, AccessDelaysInRange)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto t = generate_topology(params(3, 6, 120, seed));
        for (HostId h = 0; h < t.host_count(); ++h) {
            ASSERT_GE(t.access(h).delay_ms, 5.0);
            ASSERT_LE(t.access(h).delay_ms, 10.0);
        }
    }
}

TEST(Topology, ServerAndPeerBandwidth)
{
    const auto t = generate_topology(params(2, 8, 10, 3));
    EXPECT_DOUBLE_EQ(t.access(kServerHost).up_bps, 20e6);
    EXPECT_DOUBLE_EQ(t.access(host_of(4)).up_bps, 512000.0);
    EXPECT_DOUBLE_EQ(t.access(host_of(4)).down_bps, 512000.0);
}

TEST(Topology, PathLatencyMatchesFloydWarshall)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto t = generate_topology(params(2, 5, 10, seed));
        const std::uint32_t n = t.router_count();
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
        for (std::uint32_t i = 0; i < n; ++i) d[i][i] = 0;
        for (const auto& e : t.core_edges()) {
            d[e.a][e.b] = std::min(d[e.a][e.b], e.delay_ms);
            d[e.b][e.a] = std::min(d[e.b][e.a], e.delay_ms);
        }
        for (std::uint32_t k = 0; k < n; ++k)
            for (std::uint32_t i = 0; i < n; ++i)
                for (std::uint32_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
        for (HostId a = 0; a < t.host_count(); ++a) {
            for (HostId b = 0; b < t.host_count(); ++b) {
                const double expect =
                    a == b ? 0.0 : t.access(a).delay_ms + d[t.access(a).router][t.access(b).router] + t.access(b).delay_ms;
                ASSERT_NEAR(t.path_latency_ms(a, b), expect, 1e-9);
                ASSERT_DOUBLE_EQ(t.path_latency_ms(a, b), t.path_latency_ms(b, a));
            }
        }
    }
}

TEST(Topology, CoreIsConnected)
{
    const auto t = generate_topology(params(4, 8, 5, 9));
    for (std::uint32_t a = 0; a < t.router_count(); ++a)
        for (std::uint32_t b = 0; b < t.router_count(); ++b)
            ASSERT_LT(t.core_distance_ms(a, b), std::numeric_limits<double>::infinity());
}

TEST(Topology, Errors)
{
    EXPECT_THROW(generate_topology(params(1, 1, 0, 1)), std::invalid_argument);
    EXPECT_THROW(generate_topology(params(0, 1, 1, 1)), std::invalid_argument);
    const auto t = generate_topology(params(1, 1, 1, 1));
    EXPECT_THROW(t.path_latency_ms(0, 9), std::out_of_range);
    EXPECT_DOUBLE_EQ(t.path_latency_ms(1, 1), 0.0);
}
