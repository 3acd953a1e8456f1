#include "vodsim/domain.hpp"

#include <cstdlib>
#include <stdexcept>

namespace vodsim {

void Video::validate() const
{
    if (segment_count < 1) {
        throw std::invalid_argument("video.segment_count must be >= 1");
    }
    if (!(segment_duration > 0.0)) {
        throw std::invalid_argument("video.segment_duration must be > 0");
    }
    if (!(streaming_rate > 0.0)) {
        throw std::invalid_argument("video.streaming_rate must be > 0");
    }
}

std::string_view to_string(Origin origin)
{
    switch (origin) {
    case Origin::LocalStream: return "LOCAL_STREAM";
    case Origin::PrefetchPeer: return "PREFETCH_PEER";
    case Origin::PrefetchShortcut: return "PREFETCH_SHORTCUT";
    case Origin::Server: return "SERVER";
    case Origin::OnDemand: return "ON_DEMAND";
    }
    return "?";
}

BufferCache::BufferCache(std::size_t capacity, EvictionOrder order) : capacity_(capacity), order_(order)
{
    if (capacity_ == 0) {
        throw std::invalid_argument("cache capacity must be >= 1");
    }
}

const CacheEntry* BufferCache::find(SegmentId seg) const
{
    auto it = entries_.find(seg);
    return it == entries_.end() ? nullptr : &it->second;
}

SegmentSet BufferCache::residents() const
{
    SegmentSet out;
    for (const auto& [seg, entry] : entries_) {
        out.insert(out.end(), seg);
    }
    return out;
}

std::optional<SegmentId> BufferCache::choose_victim(SegmentId playhead) const
{
    std::optional<SegmentId> oldest_prefetch;
    SimTime oldest_time = 0.0;
    std::optional<SegmentId> far_consumed;
    std::int64_t far_consumed_key = 0;
    std::optional<SegmentId> far_other;
    std::int64_t far_other_dist = -1;

    for (const auto& [seg, e] : entries_) {
        if (!e.consumed && is_prefetch(e.origin)) {
            // map order makes ties resolve to the lowest index
            if (!oldest_prefetch || e.arrival_time < oldest_time) {
                oldest_prefetch = seg;
                oldest_time = e.arrival_time;
            }
        } else if (e.consumed) {
            // Behind the playhead ranks by distance; entries at or ahead of
            // it rank after every entry behind.
            const std::int64_t key = static_cast<std::int64_t>(playhead) - static_cast<std::int64_t>(seg);
            if (!far_consumed || key > far_consumed_key) {
                far_consumed = seg;
                far_consumed_key = key;
            }
        } else {
            const std::int64_t dist =
                std::llabs(static_cast<std::int64_t>(seg) - static_cast<std::int64_t>(playhead));
            if (dist > far_other_dist) {
                far_other = seg;
                far_other_dist = dist;
            }
        }
    }
    if (order_ == EvictionOrder::ConsumedFirst) {
        if (far_consumed) return far_consumed;
        if (oldest_prefetch) return oldest_prefetch;
    } else {
        if (oldest_prefetch) return oldest_prefetch;
        if (far_consumed) return far_consumed;
    }
    return far_other;
}

std::optional<SegmentId> BufferCache::insert(SegmentId seg, Origin origin, SimTime now, SegmentId playhead)
{
    if (auto it = entries_.find(seg); it != entries_.end()) {
        it->second.arrival_time = now;
        return std::nullopt;
    }
    std::optional<SegmentId> victim;
    if (entries_.size() >= capacity_) {
        victim = choose_victim(playhead);
        entries_.erase(*victim);
    }
    entries_.emplace(seg, CacheEntry{now, origin, false});
    return victim;
}

std::vector<SegmentId> BufferCache::expire(SimTime now, double ttl)
{
    if (!(ttl > 0.0)) {
        throw std::invalid_argument("cache ttl must be > 0");
    }
    std::vector<SegmentId> evicted;
    for (auto it = entries_.begin(); it != entries_.end();) {
        const CacheEntry& e = it->second;
        if (!e.consumed && is_prefetch(e.origin) && now - e.arrival_time > ttl) {
            evicted.push_back(it->first);
            it = entries_.erase(it);
        } else {
            ++it;
        }
    }
    return evicted;
}

bool BufferCache::consume(SegmentId seg)
{
    auto it = entries_.find(seg);
    if (it == entries_.end() || it->second.consumed) {
        return false;
    }
    it->second.consumed = true;
    return is_prefetch(it->second.origin);
}

std::size_t BufferCache::unconsumed_prefetched() const
{
    std::size_t n = 0;
    for (const auto& [seg, e] : entries_) {
        n += (!e.consumed && is_prefetch(e.origin)) ? 1 : 0;
    }
    return n;
}

std::size_t count_forward_seeks(const PlaybackRecord& record, std::uint32_t min_skip)
{
    if (min_skip < 1) {
        throw std::invalid_argument("min_skip must be >= 1");
    }
    const auto& p = record.played();
    std::size_t n = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i] > p[i - 1] && p[i] - p[i - 1] - 1 >= min_skip) {
            ++n;
        }
    }
    return n;
}

std::vector<SegmentId> extract_seek_targets(const PlaybackRecord& record, std::size_t from,
                                            std::uint32_t min_skip)
{
    const auto& p = record.played();
    std::vector<SegmentId> out;
    for (std::size_t i = std::max<std::size_t>(from, 1); i < p.size(); ++i) {
        const SegmentId a = p[i - 1];
        const SegmentId b = p[i];
        if ((b > a && b - a - 1 >= min_skip) || b < a) {
            out.push_back(b);
        }
    }
    return out;
}

}  // namespace vodsim
