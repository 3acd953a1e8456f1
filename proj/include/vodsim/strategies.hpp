#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "vodsim/domain.hpp"
#include "vodsim/gossip.hpp"
#include "vodsim/rng.hpp"

namespace vodsim {

enum class StrategyKind { None, Random, Popularity, Mining, Cooperative };

std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy(std::string_view name);
const std::vector<StrategyKind>& all_strategies();

/// Where a prefetch request should be sent first.
enum class Scope { Session, Shortcut, Server };

std::string_view to_string(Scope scope);

struct PlanTarget {
    SegmentId segment = 0;
    Scope scope = Scope::Session;

    friend bool operator==(const PlanTarget&, const PlanTarget&) = default;
};

struct PrefetchPlan {
    std::vector<PlanTarget> targets;
    std::vector<SegmentId> urgent;  // fetched ahead of every target

    std::vector<SegmentId> target_segments() const;
};

/// Read-only view of one peer used for planning. Planning never mutates it.
struct PeerView {
    SegmentId playhead = 0;  // next segment to play
    const BufferCache* cache = nullptr;
    std::uint32_t segment_count = 0;
    std::uint32_t urgent_window = 20;
    const SegmentSet* in_flight = nullptr;  // segments already requested

    bool resident(SegmentId s) const { return cache && cache->contains(s); }
    bool pending(SegmentId s) const { return in_flight && in_flight->count(s); }
    bool in_urgent(SegmentId s) const { return s >= playhead && s - playhead < urgent_window; }
    /// Eligible as a plan target: in the video, not local, not urgent, not pending.
    bool wanted(SegmentId s) const
    {
        return s < segment_count && !resident(s) && !in_urgent(s) && !pending(s);
    }
};

/// Non-resident segments in [playhead, playhead + urgent_window).
std::vector<SegmentId> urgent_segments(const PeerView& peer);

PrefetchPlan plan_none(const PeerView& peer);

/// Up to `budget` distinct wanted segments drawn uniformly from the video.
PrefetchPlan plan_random(const PeerView& peer, std::size_t budget, Rng& rng);

struct PopularityEntry {
    SegmentId segment = 0;
    std::uint64_t hits = 0;

    friend bool operator==(const PopularityEntry&, const PopularityEntry&) = default;
};

/// Hits descending, ties by ascending segment index.
struct PopularityList {
    std::vector<PopularityEntry> entries;
    SimTime epoch = 0.0;
};

/// Central accounting of reported seek destinations.
class Tracker {
public:
    void update(const std::vector<SegmentId>& seek_targets);
    PopularityList popularity_list(std::size_t length, SimTime epoch) const;
    std::uint64_t hits(SegmentId seg) const;
    std::uint64_t reports() const { return reports_; }

private:
    std::map<SegmentId, std::uint64_t> hits_;
    std::uint64_t reports_ = 0;
};

PrefetchPlan plan_popularity(const PeerView& peer, const PopularityList& list, std::size_t budget);

/// Directed co-occurrence counts: (a, b) counts how often b was played
/// within `window` plays after a in the histories seen.
struct MiningModel {
    std::map<std::pair<SegmentId, SegmentId>, std::uint32_t> co_occurrence;
    double support_threshold = 0.0;
    std::uint32_t histories_seen = 0;

    std::uint32_t count(SegmentId a, SegmentId b) const;
};

/// Mines every pair of `history` and counts it as one more history seen.
void mine_update(MiningModel& model, const PlaybackRecord& history, std::uint32_t window);

/// Mines only pairs whose consequent sits at index >= `from`; used to fold
/// in the unseen tail of a history already partly mined.
void mine_update(MiningModel& model, const PlaybackRecord& history, std::uint32_t window, std::size_t from);

/// Consequents of the segment at the playhead, strongest first.
PrefetchPlan plan_mining(const PeerView& peer, const MiningModel& model, std::size_t budget);

/// Segments absent from the whole session inside the horizon come first
/// (to be fetched through shortcut neighbors), nearest first; then segments
/// some session-mate holds but this peer lacks, nearest first.
PrefetchPlan plan_cooperative(const PeerView& peer, const StateTable& state, std::uint32_t horizon,
                              std::size_t budget);

}  // namespace vodsim
