#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "vodsim/overlay.hpp"

using namespace vodsim;

namespace {

NetworkTopology topo(std::uint32_t peers, double up_bps = 512000.0)
{
    TopologyParams p;
    p.peer_count = peers;
    p.peer_up_bps = up_bps;
    return generate_topology(p);
}

// Walks parents from every live peer; fails on a dead parent or a cycle.
bool tree_oracle(const Overlay& o)
{
    for (PeerId p : o.live_peers()) {
        std::set<PeerId> seen{p};
        PeerId cur = o.parent(p);
        while (cur != kServerId) {
            if (!o.is_live(cur) || !seen.insert(cur).second) return false;
            cur = o.parent(cur);
        }
    }
    return true;
}

}  // namespace

TEST(Overlay, SessionWindows)
{
    const auto t = topo(3);
    Overlay o(t, 120, 512000);
    o.assign_session(0, 10);
    o.assign_session(1, 100);
    o.assign_session(2, 130);
    EXPECT_EQ(o.session_of(0), o.session_of(1));
    EXPECT_NE(o.session_of(0), o.session_of(2));
}

TEST(Overlay, PoissonArrivalsRespectWindows)
{
    const auto t = topo(200);
    Overlay o(t, 120, 512000);
    Rng r(5);
    double now = 0;
    std::map<PeerId, double> at;
    for (PeerId p = 0; p < 200; ++p) {
        now += r.exponential(0.1);
        o.assign_session(p, now);
        at[p] = now;
    }
    for (const auto& [p, a] : at) {
        const Session& s = o.session(o.session_of(p));
        ASSERT_TRUE(s.window_contains(a));
        ASSERT_TRUE(s.members.count(p));
        ASSERT_DOUBLE_EQ(s.window_start, std::floor(a / 120) * 120);
    }
    EXPECT_TRUE(o.tree_is_valid());
}

TEST(Overlay, FirstPeerHangsOffServer)
{
    const auto t = topo(2);
    Overlay o(t, 120, 512000);
    o.assign_session(0, 0);
    o.assign_session(1, 1);
    EXPECT_EQ(o.parent(0), kServerId);
    EXPECT_EQ(o.parent(1), PeerId{0});
}

TEST(Overlay, ShortcutExamples)
{
    const auto t = topo(6);
    Overlay o(t, 120, 512000);
    Rng r(1);
    o.assign_session(0, 0);
    o.assign_session(1, 5);
    EXPECT_TRUE(o.refresh_shortcuts(0, 5, r).empty());
    o.assign_session(2, 130);
    o.assign_session(3, 140);
    o.assign_session(4, 250);
    const auto sc = o.refresh_shortcuts(0, 5, r);
    EXPECT_EQ(std::set<PeerId>(sc.begin(), sc.end()), (std::set<PeerId>{2, 3, 4}));

    Rng a(9), b(9);
    EXPECT_EQ(o.refresh_shortcuts(2, 2, a), o.refresh_shortcuts(2, 2, b));
    for (PeerId p : o.stored_shortcuts(2)) EXPECT_NE(o.session_of(p), o.session_of(2));
}

TEST(Overlay, LiveShortcutsDropDeparted)
{
    const auto t = topo(4);
    Overlay o(t, 120, 512000);
    Rng r(1);
    o.assign_session(0, 0);
    o.assign_session(1, 200);
    o.assign_session(2, 210);
    o.refresh_shortcuts(0, 5, r);
    o.handle_departure(1);
    EXPECT_EQ(o.live_shortcuts(0), (std::vector<PeerId>{2}));
}

TEST(Overlay, LeafDepartureMovesNobody)
{
    const auto t = topo(3);
    Overlay o(t, 120, 512000);  // one child per peer: a chain
    o.assign_session(0, 0);
    o.assign_session(1, 1);
    o.assign_session(2, 2);
    ASSERT_EQ(o.parent(2), PeerId{1});
    EXPECT_TRUE(o.handle_departure(2).empty());
    EXPECT_TRUE(o.children(1).empty());
}

TEST(Overlay, InternalDepartureMovesChildrenToParent)
{
    const auto t = topo(12, 1024000);  // two children per peer
    Overlay o(t, 120, 512000);
    for (PeerId p = 0; p < 12; ++p) o.assign_session(p, p);
    PeerId internal = kServerId;
    for (PeerId p = 0; p < 12; ++p)
        if (o.children(p).size() == 2 && o.parent(p) != kServerId) internal = p;
    ASSERT_NE(internal, kServerId);
    const PeerId up = o.parent(internal);
    const auto kids = o.children(internal);
    const auto moved = o.handle_departure(internal);
    EXPECT_EQ(std::set<PeerId>(moved.begin(), moved.end()), std::set<PeerId>(kids.begin(), kids.end()));
    for (PeerId k : kids) EXPECT_EQ(o.parent(k), up);
    EXPECT_TRUE(o.tree_is_valid());
}

TEST(Overlay, ChurnKeepsTreeAcyclic)
{
    const auto t = topo(50, 1536000);
    Overlay o(t, 120, 512000);
    Rng r(77);
    double now = 0;
    PeerId next = 0;
    for (int step = 0; step < 400; ++step) {
        const auto live = o.live_peers();
        if (next < 50 && (live.empty() || r.bernoulli(0.6))) {
            now += r.exponential(0.2);
            o.assign_session(next++, now);
        } else if (!live.empty()) {
            o.handle_departure(live[r.below(live.size())]);
        }
        ASSERT_TRUE(tree_oracle(o));
        ASSERT_TRUE(o.tree_is_valid());
    }
}

TEST(Overlay, Errors)
{
    const auto t = topo(2);
    EXPECT_THROW(Overlay(t, 0, 512000), std::invalid_argument);
    Overlay o(t, 120, 512000);
    o.assign_session(0, 0);
    EXPECT_THROW(o.assign_session(0, 1), std::logic_error);
    EXPECT_THROW(o.session_of(1), std::out_of_range);
}
