#include "vodsim/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vodsim {

std::string_view to_string(StrategyKind kind)
{
    switch (kind) {
    case StrategyKind::None: return "none";
    case StrategyKind::Random: return "random";
    case StrategyKind::Popularity: return "popularity";
    case StrategyKind::Mining: return "mining";
    case StrategyKind::Cooperative: return "cooperative";
    }
    return "?";
}

std::optional<StrategyKind> parse_strategy(std::string_view name)
{
    for (StrategyKind k : all_strategies()) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

const std::vector<StrategyKind>& all_strategies()
{
    static const std::vector<StrategyKind> kinds = {StrategyKind::None, StrategyKind::Random,
                                                    StrategyKind::Popularity, StrategyKind::Mining,
                                                    StrategyKind::Cooperative};
    return kinds;
}

std::string_view to_string(Scope scope)
{
    switch (scope) {
    case Scope::Session: return "SESSION";
    case Scope::Shortcut: return "SHORTCUT";
    case Scope::Server: return "SERVER";
    }
    return "?";
}

std::vector<SegmentId> PrefetchPlan::target_segments() const
{
    std::vector<SegmentId> out;
    out.reserve(targets.size());
    for (const PlanTarget& t : targets) out.push_back(t.segment);
    return out;
}

std::vector<SegmentId> urgent_segments(const PeerView& peer)
{
    std::vector<SegmentId> out;
    for (std::uint32_t i = 0; i < peer.urgent_window; ++i) {
        const SegmentId s = peer.playhead + i;
        if (s >= peer.segment_count) break;
        if (!peer.resident(s)) out.push_back(s);
    }
    return out;
}

PrefetchPlan plan_none(const PeerView&)
{
    return {};
}

PrefetchPlan plan_random(const PeerView& peer, std::size_t budget, Rng& rng)
{
    PrefetchPlan plan;
    plan.urgent = urgent_segments(peer);
    if (budget == 0) return plan;
    std::vector<SegmentId> candidates;
    for (SegmentId s = 0; s < peer.segment_count; ++s) {
        if (peer.wanted(s)) candidates.push_back(s);
    }
    const std::size_t take = std::min(budget, candidates.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.below(candidates.size() - i);
        std::swap(candidates[i], candidates[j]);
        plan.targets.push_back({candidates[i], Scope::Session});
    }
    return plan;
}

void Tracker::update(const std::vector<SegmentId>& seek_targets)
{
    ++reports_;
    for (SegmentId s : seek_targets) ++hits_[s];
}

std::uint64_t Tracker::hits(SegmentId seg) const
{
    auto it = hits_.find(seg);
    return it == hits_.end() ? 0 : it->second;
}

PopularityList Tracker::popularity_list(std::size_t length, SimTime epoch) const
{
    PopularityList list;
    list.epoch = epoch;
    for (const auto& [seg, n] : hits_) list.entries.push_back({seg, n});
    std::stable_sort(list.entries.begin(), list.entries.end(),
                     [](const PopularityEntry& a, const PopularityEntry& b) { return a.hits > b.hits; });
    if (list.entries.size() > length) list.entries.resize(length);
    return list;
}

PrefetchPlan plan_popularity(const PeerView& peer, const PopularityList& list, std::size_t budget)
{
    PrefetchPlan plan;
    plan.urgent = urgent_segments(peer);
    std::vector<PopularityEntry> pick;
    for (const PopularityEntry& e : list.entries) {
        if (peer.wanted(e.segment)) pick.push_back(e);
    }
    const auto dist = [&](SegmentId s) {
        return std::llabs(static_cast<long long>(s) - static_cast<long long>(peer.playhead));
    };
    std::sort(pick.begin(), pick.end(), [&](const PopularityEntry& a, const PopularityEntry& b) {
        if (a.hits != b.hits) return a.hits > b.hits;
        if (dist(a.segment) != dist(b.segment)) return dist(a.segment) < dist(b.segment);
        return a.segment < b.segment;
    });
    for (std::size_t i = 0; i < pick.size() && i < budget; ++i) {
        plan.targets.push_back({pick[i].segment, Scope::Session});
    }
    return plan;
}

std::uint32_t MiningModel::count(SegmentId a, SegmentId b) const
{
    auto it = co_occurrence.find({a, b});
    return it == co_occurrence.end() ? 0 : it->second;
}

void mine_update(MiningModel& model, const PlaybackRecord& history, std::uint32_t window, std::size_t from)
{
    if (window < 1) {
        throw std::invalid_argument("mining window must be >= 1");
    }
    const auto& h = history.played();
    for (std::size_t j = std::max<std::size_t>(from, 1); j < h.size(); ++j) {
        const std::size_t lo = j > window ? j - window : 0;
        for (std::size_t i = lo; i < j; ++i) {
            ++model.co_occurrence[{h[i], h[j]}];
        }
    }
}

void mine_update(MiningModel& model, const PlaybackRecord& history, std::uint32_t window)
{
    mine_update(model, history, window, 0);
    ++model.histories_seen;
}

PrefetchPlan plan_mining(const PeerView& peer, const MiningModel& model, std::size_t budget)
{
    PrefetchPlan plan;
    plan.urgent = urgent_segments(peer);
    const double min_support = model.support_threshold * model.histories_seen;
    std::vector<std::pair<SegmentId, std::uint32_t>> rules;
    const SegmentId a = peer.playhead;
    for (auto it = model.co_occurrence.lower_bound({a, 0});
         it != model.co_occurrence.end() && it->first.first == a; ++it) {
        const auto [b, n] = std::pair{it->first.second, it->second};
        if (n > 0 && n >= min_support && peer.wanted(b)) rules.emplace_back(b, n);
    }
    std::sort(rules.begin(), rules.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
    for (std::size_t i = 0; i < rules.size() && i < budget; ++i) {
        plan.targets.push_back({rules[i].first, Scope::Session});
    }
    return plan;
}

PrefetchPlan plan_cooperative(const PeerView& peer, const StateTable& state, std::uint32_t horizon,
                              std::size_t budget)
{
    if (horizon < 1) {
        throw std::invalid_argument("cooperative horizon must be >= 1");
    }
    PrefetchPlan plan;
    plan.urgent = urgent_segments(peer);
    if (peer.playhead >= peer.segment_count) return plan;

    const SegmentSet own = peer.cache ? peer.cache->residents() : SegmentSet{};
    const SegmentSet u = session_union(state, own);
    const SegmentId lo = peer.playhead;
    const SegmentId hi = static_cast<SegmentId>(
        std::min<std::uint64_t>(peer.segment_count - 1, std::uint64_t{lo} + horizon));

    for (SegmentId s : missing_segments(u, lo, hi)) {
        if (plan.targets.size() >= budget) return plan;
        if (peer.wanted(s)) plan.targets.push_back({s, Scope::Shortcut});
    }
    for (SegmentId s = lo; s <= hi && plan.targets.size() < budget; ++s) {
        if (u.count(s) && peer.wanted(s)) plan.targets.push_back({s, Scope::Session});
    }
    return plan;
}

}  // namespace vodsim
