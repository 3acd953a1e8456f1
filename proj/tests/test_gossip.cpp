#include <gtest/gtest.h>

#include "vodsim/gossip.hpp"
#include "vodsim/rng.hpp"

using namespace vodsim;

namespace {

StateTable seven_peer_table()
{
    StateTable t;
    t.set_row(1, {1, 3, 4, 5, 7, 8, 9, 12});
    t.set_row(2, {2, 3, 4, 8, 9, 11, 12, 13});
    t.set_row(3, {7, 8, 9, 12, 13, 14, 15, 16, 17});
    t.set_row(4, {1, 4, 5, 6, 7, 13, 14, 15, 20});
    t.set_row(5, {5, 6, 8, 9, 13, 14, 15, 16, 17});
    t.set_row(6, {1, 2, 3, 4, 5, 6, 7, 8, 11, 12});
    t.set_row(7, {1, 2, 4, 5, 6, 7, 11, 12, 14, 15});
    return t;
}

}  // namespace

TEST(Gossip, EmitSnapshotsCache)
{
    BufferCache c(10);
    EXPECT_TRUE(emit_gossip(0, c, 0, 0).segments.empty());
    for (SegmentId s : {1, 3, 4}) c.insert(s, Origin::LocalStream, 0, 0);
    const auto m = emit_gossip(4, c, 2, 7.5);
    EXPECT_EQ(m.segments, (SegmentSet{1, 3, 4}));
    EXPECT_EQ(m.sender, PeerId{4});
    EXPECT_EQ(m.playhead, SegmentId{2});
}

TEST(Gossip, BroadcastCostCountsOrderedPairs)
{
    for (std::uint64_t n = 0; n < 30; ++n) {
        std::uint64_t pairs = 0;
        for (std::uint64_t a = 0; a < n; ++a)
            for (std::uint64_t b = 0; b < n; ++b) pairs += a != b;
        EXPECT_EQ(full_broadcast_cost(n), pairs);
    }
}

TEST(Gossip, SevenPeerUnionAndMissing)
{
    const auto u = session_union(seven_peer_table(), {});
    EXPECT_EQ(u, (SegmentSet{1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 12, 13, 14, 15, 16, 17, 20}));
    EXPECT_EQ(missing_segments(u, 1, 20), (std::vector<SegmentId>{10, 18, 19}));
}

TEST(Gossip, UnionIdentityAndCover)
{
    EXPECT_EQ(session_union(StateTable{}, {2}), (SegmentSet{2}));
    EXPECT_TRUE(missing_segments({3, 4, 5, 6}, 4, 6).empty());
    EXPECT_THROW(missing_segments({}, 5, 4), std::invalid_argument);
}

TEST(Gossip, UnionMatchesFold)
{
    Rng r(8);
    for (int round = 0; round < 50; ++round) {
        StateTable t;
        SegmentSet fold;
        for (PeerId p = 0; p < 20; ++p) {
            SegmentSet row;
            const auto n = r.below(15);
            for (std::uint64_t i = 0; i < n; ++i) row.insert(static_cast<SegmentId>(r.below(100)));
            fold.insert(row.begin(), row.end());
            t.set_row(p, row);
        }
        SegmentSet self{static_cast<SegmentId>(r.below(100))};
        fold.insert(self.begin(), self.end());
        const auto u = session_union(t, self);
        ASSERT_EQ(u, fold);

        const SegmentId lo = static_cast<SegmentId>(r.below(50));
        const SegmentId hi = lo + static_cast<SegmentId>(r.below(50));
        std::vector<SegmentId> scan;
        for (SegmentId s = lo; s <= hi; ++s)
            if (!fold.count(s)) scan.push_back(s);
        ASSERT_EQ(missing_segments(u, lo, hi), scan);
    }
}

TEST(Gossip, ApplyReplacesRowAndHoldersFollow)
{
    StateTable t;
    t.apply({3, {1, 2}, 1, 0.0});
    t.apply({3, {5}, 5, 10.0});
    t.apply({4, {5, 6}, 6, 10.0});
    EXPECT_EQ(t.rows().at(3).segments, (SegmentSet{5}));
    EXPECT_EQ(t.holders(5), (std::vector<PeerId>{3, 4}));
    EXPECT_TRUE(t.holders(1).empty());
}

TEST(Gossip, PruneDropsStaleRows)
{
    StateTable t;
    t.set_row(1, {1}, 0, 0.0);
    t.set_row(2, {2}, 0, 25.0);
    EXPECT_EQ(t.prune(40.0, 30.0), 1u);
    EXPECT_EQ(t.size(), 1u);
    EXPECT_TRUE(t.rows().count(2));
}
