#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

namespace vodsim {

using SegmentId = std::uint32_t;
using PeerId = std::uint32_t;
using SegmentSet = std::set<SegmentId>;

/// Sentinel provider id for the media source.
inline constexpr PeerId kServerId = std::numeric_limits<PeerId>::max();

/// Simulated time in seconds.
using SimTime = double;

struct Video {
    std::uint32_t segment_count = 1800;
    double segment_duration = 1.0;  // seconds of playback per segment
    double streaming_rate = 512000.0;  // bits per second

    void validate() const;
    double total_duration() const { return segment_count * segment_duration; }
    /// Segment payload size: one segment duration at the streaming rate.
    double segment_bits() const { return streaming_rate * segment_duration; }
    bool contains(SegmentId seg) const { return seg < segment_count; }
};

enum class Origin {
    LocalStream,       // pushed by the session tree (playback or urgent window)
    PrefetchPeer,      // prefetched from a same-session peer
    PrefetchShortcut,  // prefetched from a shortcut neighbor
    Server,            // prefetched from the media source
    OnDemand,          // fetched to recover a seek; played immediately
};

std::string_view to_string(Origin origin);

/// Entries that count as prefetched data for expiry and utilization.
constexpr bool is_prefetch(Origin origin)
{
    return origin == Origin::PrefetchPeer || origin == Origin::PrefetchShortcut ||
           origin == Origin::Server;
}

struct CacheEntry {
    SimTime arrival_time = 0.0;
    Origin origin = Origin::LocalStream;
    bool consumed = false;
};

/// Which class of entry a full cache gives up first.
enum class EvictionOrder {
    PrefetchFirst,  // oldest unconsumed prefetch, then consumed farthest behind
    ConsumedFirst,  // consumed farthest behind, then oldest unconsumed prefetch
};

/// A peer's bounded local segment store.
///
/// When full, one victim is chosen among the unconsumed prefetched entries
/// (oldest arrival first, ties to the lowest index) and the consumed entries
/// (farthest behind the playhead first), in the configured order; failing
/// both, the unconsumed non-prefetched entry farthest from the playhead.
class BufferCache {
public:
    explicit BufferCache(std::size_t capacity = 120, EvictionOrder order = EvictionOrder::PrefetchFirst);
    EvictionOrder eviction_order() const { return order_; }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool full() const { return entries_.size() >= capacity_; }
    bool contains(SegmentId seg) const { return entries_.count(seg) != 0; }

    const CacheEntry* find(SegmentId seg) const;
    const std::map<SegmentId, CacheEntry>& entries() const { return entries_; }
    SegmentSet residents() const;

    /// Inserts `seg`, evicting at most one entry. Re-inserting a resident
    /// segment only refreshes its arrival time.
    std::optional<SegmentId> insert(SegmentId seg, Origin origin, SimTime now, SegmentId playhead);

    /// Removes unconsumed prefetched entries older than `ttl`.
    std::vector<SegmentId> expire(SimTime now, double ttl);

    /// Marks `seg` consumed; returns true if it was an unconsumed prefetch.
    bool consume(SegmentId seg);

    bool erase(SegmentId seg) { return entries_.erase(seg) != 0; }

    std::size_t unconsumed_prefetched() const;

private:
    std::optional<SegmentId> choose_victim(SegmentId playhead) const;

    std::size_t capacity_;
    EvictionOrder order_;
    std::map<SegmentId, CacheEntry> entries_;
};

/// Segments in playback order; duplicates appear after backward seeks.
class PlaybackRecord {
public:
    PlaybackRecord() = default;
    PlaybackRecord(std::initializer_list<SegmentId> played) : played_(played) {}
    explicit PlaybackRecord(std::vector<SegmentId> played) : played_(std::move(played)) {}

    void append(SegmentId seg) { played_.push_back(seg); }
    const std::vector<SegmentId>& played() const { return played_; }
    std::size_t size() const { return played_.size(); }
    bool empty() const { return played_.empty(); }

private:
    std::vector<SegmentId> played_;
};

/// Forward seeks in a record: adjacent plays (a, b) skipping at least
/// `min_skip` segments, i.e. b - a - 1 >= min_skip.
std::size_t count_forward_seeks(const PlaybackRecord& record, std::uint32_t min_skip = 2);

/// Seek destinations found in record[from..]: targets of forward jumps that
/// skip at least `min_skip` segments, and of every backward jump.
std::vector<SegmentId> extract_seek_targets(const PlaybackRecord& record, std::size_t from,
                                            std::uint32_t min_skip = 2);

}  // namespace vodsim
