#include "vodsim/gossip.hpp"

#include <stdexcept>

namespace vodsim {

BufferMapMsg emit_gossip(PeerId sender, const BufferCache& cache, SegmentId playhead, SimTime now)
{
    return BufferMapMsg{sender, cache.residents(), playhead, now};
}

void StateTable::apply(const BufferMapMsg& msg)
{
    Row& r = rows_[msg.sender];
    if (msg.issued_at < r.updated_at && !r.segments.empty()) {
        return;  // out-of-order delivery; keep the newer view
    }
    r.segments = msg.segments;
    r.playhead = msg.playhead;
    r.updated_at = msg.issued_at;
}

void StateTable::set_row(PeerId peer, SegmentSet segments, SegmentId playhead, SimTime at)
{
    rows_[peer] = Row{std::move(segments), playhead, at};
}

std::size_t StateTable::prune(SimTime now, double max_age)
{
    std::size_t dropped = 0;
    for (auto it = rows_.begin(); it != rows_.end();) {
        if (now - it->second.updated_at > max_age) {
            it = rows_.erase(it);
            ++dropped;
        } else {
            ++it;
        }
    }
    return dropped;
}

std::vector<PeerId> StateTable::holders(SegmentId seg) const
{
    std::vector<PeerId> out;
    for (const auto& [peer, row] : rows_) {
        if (row.segments.count(seg)) out.push_back(peer);
    }
    return out;
}

SegmentSet session_union(const StateTable& table, const SegmentSet& self_cache)
{
    SegmentSet u = self_cache;
    for (const auto& [peer, row] : table.rows()) {
        u.insert(row.segments.begin(), row.segments.end());
    }
    return u;
}

std::vector<SegmentId> missing_segments(const SegmentSet& available, SegmentId lo, SegmentId hi)
{
    if (lo > hi) {
        throw std::invalid_argument("missing_segments requires lo <= hi");
    }
    std::vector<SegmentId> out;
    auto it = available.lower_bound(lo);
    for (SegmentId s = lo;; ++s) {
        while (it != available.end() && *it < s) ++it;
        if (it == available.end() || *it != s) out.push_back(s);
        if (s == hi) break;
    }
    return out;
}

}  // namespace vodsim
