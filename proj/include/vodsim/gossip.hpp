#pragma once

#include <map>
#include <vector>

#include "vodsim/domain.hpp"

namespace vodsim {

struct BufferMapMsg {
    PeerId sender = 0;
    SegmentSet segments;
    SegmentId playhead = 0;
    SimTime issued_at = 0.0;
};

/// Snapshot of a peer's cache residents for gossiping.
BufferMapMsg emit_gossip(PeerId sender, const BufferCache& cache, SegmentId playhead, SimTime now);

/// Control messages spent when every member of an n-peer session
/// broadcasts one buffer map to all others.
constexpr std::uint64_t full_broadcast_cost(std::uint64_t n) { return n == 0 ? 0 : n * (n - 1); }

/// What one peer knows about its session-mates' buffers.
class StateTable {
public:
    struct Row {
        SegmentSet segments;
        SegmentId playhead = 0;
        SimTime updated_at = 0.0;
    };

    void apply(const BufferMapMsg& msg);
    void set_row(PeerId peer, SegmentSet segments, SegmentId playhead = 0, SimTime at = 0.0);
    void erase(PeerId peer) { rows_.erase(peer); }

    /// Drops rows last refreshed more than `max_age` ago.
    std::size_t prune(SimTime now, double max_age);

    const std::map<PeerId, Row>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    /// Peers whose advertised buffer holds `seg`.
    std::vector<PeerId> holders(SegmentId seg) const;

private:
    std::map<PeerId, Row> rows_;
};

/// Every segment advertised anywhere in the table, plus the caller's own.
SegmentSet session_union(const StateTable& table, const SegmentSet& self_cache);

/// Ascending ids in [lo, hi] absent from `available`.
std::vector<SegmentId> missing_segments(const SegmentSet& available, SegmentId lo, SegmentId hi);

}  // namespace vodsim
