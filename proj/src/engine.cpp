#include "vodsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <queue>
#include <thread>

#include "vodsim/gossip.hpp"
#include "vodsim/overlay.hpp"
#include "vodsim/rng.hpp"
#include "vodsim/transfer.hpp"

namespace vodsim {

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::Arrival: return "ARRIVAL";
    case EventKind::PlaybackTick: return "PLAYBACK_TICK";
    case EventKind::GossipTick: return "GOSSIP_TICK";
    case EventKind::PlanTick: return "PLAN_TICK";
    case EventKind::Seek: return "SEEK";
    case EventKind::Pause: return "PAUSE";
    case EventKind::Resume: return "RESUME";
    case EventKind::RequestTimeout: return "REQUEST_TIMEOUT";
    case EventKind::FlowStart: return "FLOW_START";
    case EventKind::TransferComplete: return "TRANSFER_COMPLETE";
    case EventKind::TrackerTick: return "TRACKER_TICK";
    case EventKind::Depart: return "DEPART";
    case EventKind::End: return "END";
    }
    return "?";
}

std::string format_timeline(const std::vector<TimelineEntry>& timeline)
{
    std::string out;
    char buf[64];
    for (const TimelineEntry& e : timeline) {
        std::snprintf(buf, sizeof buf, "%.6f ", e.time);
        out += buf;
        out += to_string(e.kind);
        out += " peer=" + std::to_string(e.peer);
        if (!e.detail.empty()) out += " " + e.detail;
        out += "\n";
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view name)
{
    return Rng::named(seed, name).next_u64();
}

namespace {

void require(bool ok, const char* field, const std::string& what)
{
    if (!ok) throw ConfigError(field, what);
}

template <class F>
void wrap(const char* field, F&& f)
{
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
}

}  // namespace

void RunConfig::validate() const
{
    wrap("video", [&] { video.validate(); });
    require(duration_s > 0.0, "run.duration_s", "must be > 0");
    require(session_width_s > 0.0, "run.session_width_s", "must be > 0");
    wrap("topology", [&] {
        TopologyParams t = topology;
        t.peer_count = std::max<std::uint32_t>(1, t.peer_count);
        t.validate();
    });
    if (traces) {
        std::vector<bool> seen(traces->size(), false);
        for (const ViewerTrace& t : *traces) {
            require(t.peer < traces->size() && !seen[t.peer], "traces",
                    "peer ids must be 0..n-1 without repeats");
            seen[t.peer] = true;
            require(t.well_formed(), "traces", "trace for peer " + std::to_string(t.peer) + " is malformed");
            for (const ViewerEvent& e : t.events) {
                require(e.kind != ViewerEventKind::Seek || video.contains(e.target), "traces",
                        "seek target " + std::to_string(e.target) + " outside the video");
            }
        }
    } else {
        wrap("workload", [&] { workload.validate(); });
    }
    const StrategyParams& p = params;
    require(p.cache_capacity >= 1, "strategy.cache_capacity", "must be >= 1");
    require(p.cache_ttl_s > 0.0, "strategy.cache_ttl_s", "must be > 0");
    require(p.plan_period_s > 0.0, "strategy.plan_period_s", "must be > 0");
    require(p.gossip_period_s > 0.0, "strategy.gossip_period_s", "must be > 0");
    require(p.stale_periods > 0.0, "strategy.stale_periods", "must be > 0");
    require(p.coop_horizon >= 1, "strategy.coop_horizon", "must be >= 1");
    require(p.mining_window >= 1, "strategy.mining_window", "must be >= 1");
    require(p.mining_support >= 0.0, "strategy.mining_support", "must be >= 0");
    require(p.tracker_period_s > 0.0, "strategy.tracker_period_s", "must be > 0");
    require(p.shortcut_refresh_s > 0.0, "strategy.shortcut_refresh_s", "must be > 0");
    require(p.request_timeout_s > 0.0, "strategy.request_timeout_s", "must be > 0");
    require(p.history_window >= 1, "strategy.history_window", "must be >= 1");
    require(p.history_period_s > 0.0, "strategy.history_period_s", "must be > 0");
}

std::vector<ViewerTrace> workload_traces(const RunConfig& config)
{
    if (config.traces) return *config.traces;
    WorkloadParams w = config.workload;
    w.seed = derive_seed(config.seed, "workload");
    w.horizon_s = config.duration_s;
    return generate_traces(w, config.video);
}

namespace {

struct Event {
    SimTime time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::End;
    PeerId peer = 0;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
};

struct EventLater {
    bool operator()(const Event& x, const Event& y) const
    {
        if (x.time != y.time) return x.time > y.time;
        return x.seq > y.seq;
    }
};

struct PeerState {
    PeerId id = 0;
    HostId host = 0;
    const ViewerTrace* trace = nullptr;
    BufferCache cache;
    PlaybackRecord record;
    SegmentId playhead = 0;
    bool live = false;
    bool paused = false;
    std::optional<SegmentId> awaiting;
    std::optional<SegmentId> handoff;  // delivered straight to playback, not cached
    std::uint64_t tick_gen = 0;
    StateTable table;
    TransferHistory history;
    SegmentSet in_flight;
    PopularityList popularity;
    MiningModel mining;
    std::map<PeerId, std::size_t> mined_upto;
    std::size_t reported_upto = 0;
    SimTime last_shortcut_refresh = 0.0;

    PeerState(std::size_t capacity, EvictionOrder order, std::uint32_t history_window)
        : cache(capacity, order), history(history_window)
    {
    }
};

struct Pending {
    SegmentRequest req;
    bool seek = false;
    std::size_t seek_index = 0;
    FlowNetwork::FlowId flow = 0;
    std::uint64_t version = 0;
};

class Simulation {
public:
    explicit Simulation(const RunConfig& config)
        : cfg_(config),
          traces_(workload_traces(config)),
          topo_(make_topology(config, traces_.size())),
          overlay_(topo_, config.session_width_s, config.video.streaming_rate),
          network_(topo_),
          strategy_rng_(Rng::named(config.seed, "strategy"))
    {
        const StrategyKind s = cfg_.strategy;
        gossips_ = s == StrategyKind::Popularity || s == StrategyKind::Mining || s == StrategyKind::Cooperative;
        shortcuts_ = s == StrategyKind::Cooperative;
        retain_ = s != StrategyKind::None && cfg_.params.retain_played;
        urgent_ = s == StrategyKind::None ? 0 : cfg_.params.urgent_window;

        peers_.reserve(traces_.size());
        for (std::size_t i = 0; i < traces_.size(); ++i) {
            peers_.emplace_back(cfg_.params.cache_capacity, cfg_.params.eviction, cfg_.params.history_window);
        }
        for (const ViewerTrace& t : traces_) {
            PeerState& p = peers_[t.peer];
            p.id = t.peer;
            p.host = host_of(t.peer);
            p.trace = &t;
            p.mining.support_threshold = cfg_.params.mining_support;
        }
    }

    RunResult run()
    {
        schedule(cfg_.duration_s, EventKind::End, 0);
        for (const ViewerTrace& t : traces_) schedule(t.arrival, EventKind::Arrival, t.peer);
        if (cfg_.strategy == StrategyKind::Popularity) {
            schedule(cfg_.params.tracker_period_s, EventKind::TrackerTick, 0);
        }
        while (!queue_.empty()) {
            const Event ev = queue_.top();
            queue_.pop();
            if (ev.time < now_) throw InvariantViolation("clock moved backwards");
            now_ = ev.time;
            ++events_;
            if (ev.kind == EventKind::End) break;
            dispatch(ev);
            if (cfg_.check_invariants) check_invariants();
        }
        RunResult r;
        r.report = build_report(std::string(to_string(cfg_.strategy)), cfg_.seed, ledger_);
        r.seek_log = ledger_.seek_log();
        r.timeline = std::move(timeline_);
        r.events = events_;
        r.invariant_checks = checks_;
        return r;
    }

private:
    static NetworkTopology make_topology(const RunConfig& config, std::size_t peers)
    {
        TopologyParams t = config.topology;
        t.peer_count = static_cast<std::uint32_t>(std::max<std::size_t>(peers, 1));
        t.seed = derive_seed(config.seed, "topology");
        return generate_topology(t);
    }

    void schedule(SimTime t, EventKind kind, PeerId peer, std::uint64_t a = 0, std::uint64_t b = 0)
    {
        if (t < now_) throw InvariantViolation("event scheduled in the past");
        queue_.push({t, seq_++, kind, peer, a, b});
    }

    void dispatch(const Event& ev)
    {
        switch (ev.kind) {
        case EventKind::Arrival: on_arrival(ev.peer); break;
        case EventKind::PlaybackTick: on_tick(ev.peer, ev.a); break;
        case EventKind::GossipTick: on_gossip(ev.peer); break;
        case EventKind::PlanTick: on_plan(ev.peer); break;
        case EventKind::Seek: on_seek(ev.peer, peers_[ev.peer].trace->events.at(ev.a).target); break;
        case EventKind::Pause: on_pause(ev.peer); break;
        case EventKind::Resume: on_resume(ev.peer); break;
        case EventKind::RequestTimeout: on_timeout(ev.a); break;
        case EventKind::FlowStart: on_flow_start(ev.a); break;
        case EventKind::TransferComplete: on_complete(ev.a, ev.b); break;
        case EventKind::TrackerTick: on_tracker(); break;
        case EventKind::Depart: depart(ev.peer); break;
        case EventKind::End: break;
        }
    }

    // --- helpers -------------------------------------------------------

    void log(EventKind kind, PeerId peer, std::string detail)
    {
        if (cfg_.record_timeline) timeline_.push_back({now_, kind, peer, std::move(detail)});
    }

    static std::string who(PeerId p) { return p == kServerId ? "server" : std::to_string(p); }

    static std::string seconds(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return buf;
    }

    HostId host(PeerId p) const { return p == kServerId ? kServerHost : host_of(p); }

    double rtt(PeerId a, PeerId b) const { return 2.0 * topo_.path_latency_ms(host(a), host(b)) / 1000.0; }

    std::uint64_t period() const
    {
        return static_cast<std::uint64_t>(std::floor(now_ / cfg_.params.history_period_s));
    }

    bool live(PeerId p) const { return p != kServerId && p < peers_.size() && peers_[p].live; }

    bool holds(PeerId p, SegmentId s) const { return live(p) && peers_[p].cache.contains(s); }

    PeerView view(const PeerState& p) const
    {
        return PeerView{p.playhead, &p.cache, cfg_.video.segment_count, urgent_, &p.in_flight};
    }

    double distance(SegmentId a, SegmentId b) const
    {
        return std::fabs(static_cast<double>(a) - static_cast<double>(b));
    }

    std::optional<PeerId> best_of(const PeerState& p, const std::vector<PeerId>& who, SegmentId ref, bool scored)
    {
        std::vector<ProviderCandidate> c;
        for (PeerId q : who) {
            c.push_back({q, scored ? p.history.score(q, period()) : 0.0, distance(peers_[q].playhead, ref),
                         topo_.path_latency_ms(p.host, host(q))});
        }
        return choose_provider(c);
    }

    void stream(PeerState& p, SegmentId s, bool keep = true)
    {
        if (keep) p.cache.insert(s, Origin::LocalStream, now_, p.playhead);
        if (overlay_.parent(p.id) == kServerId) ledger_.add_server_bits(cfg_.video.segment_bits());
    }

    void schedule_tick(PeerState& p) { schedule(now_, EventKind::PlaybackTick, p.id, p.tick_gen); }

    // --- viewer lifecycle ----------------------------------------------

    void on_arrival(PeerId id)
    {
        PeerState& p = peers_[id];
        overlay_.assign_session(id, now_);
        p.live = true;
        ledger_.peer(id).arrival = now_;
        log(EventKind::Arrival, id,
            "session=" + std::to_string(overlay_.session_of(id)) + " parent=" + who(overlay_.parent(id)));
        if (shortcuts_) {
            overlay_.refresh_shortcuts(id, cfg_.params.shortcut_count, strategy_rng_);
            p.last_shortcut_refresh = now_;
        }
        const auto& events = p.trace->events;
        for (std::size_t i = 0; i < events.size(); ++i) {
            EventKind k = EventKind::Seek;
            switch (events[i].kind) {
            case ViewerEventKind::Seek: k = EventKind::Seek; break;
            case ViewerEventKind::Pause: k = EventKind::Pause; break;
            case ViewerEventKind::Resume: k = EventKind::Resume; break;
            case ViewerEventKind::Leave: k = EventKind::Depart; break;
            }
            schedule(events[i].time, k, id, i);
        }
        schedule_tick(p);
        if (gossips_) schedule(now_ + cfg_.params.gossip_period_s, EventKind::GossipTick, id);
        if (cfg_.strategy != StrategyKind::None) schedule(now_ + cfg_.params.plan_period_s, EventKind::PlanTick, id);
    }

    void depart(PeerId id)
    {
        PeerState& p = peers_[id];
        if (!p.live) return;
        p.live = false;
        ++p.tick_gen;
        log(EventKind::Depart, id, "playhead=" + std::to_string(p.playhead));
        p.in_flight.clear();
        overlay_.handle_departure(id);
    }

    void on_pause(PeerId id)
    {
        PeerState& p = peers_[id];
        if (!p.live || p.paused) return;
        p.paused = true;
        ++p.tick_gen;
        log(EventKind::Pause, id, "");
    }

    void on_resume(PeerId id)
    {
        PeerState& p = peers_[id];
        if (!p.live || !p.paused) return;
        p.paused = false;
        log(EventKind::Resume, id, "");
        if (!p.awaiting) schedule_tick(p);
    }

    void on_tick(PeerId id, std::uint64_t gen)
    {
        PeerState& p = peers_[id];
        if (gen != p.tick_gen || !p.live || p.paused || p.awaiting) return;
        if (p.playhead >= cfg_.video.segment_count) {
            depart(id);
            return;
        }
        const SegmentId s = p.playhead;
        const bool handed = p.handoff == s;
        p.handoff.reset();
        // Without retention the playout segment never occupies a cache slot.
        if (!handed && !p.cache.contains(s)) stream(p, s, retain_);
        if (p.cache.consume(s)) ++ledger_.peer(id).prefetched_played;
        p.record.append(s);
        if (!retain_) p.cache.erase(s);
        ++p.playhead;
        for (SegmentId u : urgent_segments(view(p))) stream(p, u);
        schedule(now_ + cfg_.video.segment_duration, EventKind::PlaybackTick, id, p.tick_gen);
    }

    // --- seeks ---------------------------------------------------------

    void on_seek(PeerId id, SegmentId target)
    {
        PeerState& p = peers_[id];
        if (!p.live) return;
        ++p.tick_gen;
        p.playhead = target;
        if (p.cache.contains(target)) {
            const std::size_t idx = ledger_.record_seek(id, now_, target, SeekKind::RelativeHit);
            ledger_.complete_seek(idx, 0.0);
            const CacheEntry* e = p.cache.find(target);
            ledger_.annotate_hit(idx, e->origin, e->consumed);
            log(EventKind::Seek, id, "target=" + std::to_string(target) + " outcome=RELATIVE_HIT latency=0.000000");
            p.awaiting.reset();
            if (!p.paused) schedule_tick(p);
            return;
        }
        std::vector<PeerId> in_session, via_shortcut;
        for (PeerId q : overlay_.session_peers(id)) {
            if (holds(q, target)) in_session.push_back(q);
        }
        if (shortcuts_) {
            for (PeerId q : overlay_.live_shortcuts(id)) {
                if (holds(q, target)) via_shortcut.push_back(q);
            }
        }
        const SeekKind kind = classify_seek(false, !in_session.empty(), !via_shortcut.empty());
        PeerId provider = kServerId;
        Scope scope = Scope::Server;
        if (kind == SeekKind::GlobalHit) {
            provider = *best_of(p, in_session, target, true);
            scope = Scope::Session;
        } else if (kind == SeekKind::ShortcutFetch) {
            provider = *best_of(p, via_shortcut, target, true);
            scope = Scope::Shortcut;
        }
        Pending pend;
        pend.req = {id, target, now_, scope, now_ + cfg_.params.request_timeout_s, provider, true};
        pend.seek = true;
        pend.seek_index = ledger_.record_seek(id, now_, target, kind);
        log(EventKind::Seek, id,
            "target=" + std::to_string(target) + " outcome=" + std::string(to_string(kind)) + " provider=" + who(provider));
        ledger_.peer(id).request_msgs += 2;
        p.awaiting = target;
        start_after_rtt(std::move(pend));
    }

    // --- prefetch requests ---------------------------------------------

    void on_plan(PeerId id)
    {
        PeerState& p = peers_[id];
        if (!p.live) return;
        const StrategyParams& sp = cfg_.params;
        p.table.prune(now_, sp.stale_periods * sp.gossip_period_s);
        p.cache.expire(now_, sp.cache_ttl_s);
        if (shortcuts_ && now_ - p.last_shortcut_refresh >= sp.shortcut_refresh_s) {
            overlay_.refresh_shortcuts(id, sp.shortcut_count, strategy_rng_);
            p.last_shortcut_refresh = now_;
        }

        PrefetchPlan plan;
        switch (cfg_.strategy) {
        case StrategyKind::None: break;
        case StrategyKind::Random: plan = plan_random(view(p), sp.prefetch_budget, strategy_rng_); break;
        case StrategyKind::Popularity: plan = plan_popularity(view(p), p.popularity, sp.prefetch_budget); break;
        case StrategyKind::Mining:
            exchange_histories(p);
            plan = plan_mining(view(p), p.mining, sp.prefetch_budget);
            break;
        case StrategyKind::Cooperative:
            plan = plan_cooperative(view(p), p.table, sp.coop_horizon, sp.prefetch_budget);
            break;
        }
        for (const PlanTarget& t : plan.targets) {
            if (!p.cache.contains(t.segment) && !p.in_flight.count(t.segment)) {
                issue_prefetch(p, t.segment, shortcuts_ ? t.scope : Scope::Session);
            }
        }
        schedule(now_ + sp.plan_period_s, EventKind::PlanTick, id);
    }

    void exchange_histories(PeerState& p)
    {
        const std::uint32_t w = cfg_.params.mining_window;
        auto fold = [&](const PeerState& src) {
            auto [it, fresh] = p.mined_upto.try_emplace(src.id, 0);
            if (fresh) ++p.mining.histories_seen;
            mine_update(p.mining, src.record, w, it->second);
            it->second = src.record.size();
        };
        fold(p);
        std::vector<std::pair<double, PeerId>> near;
        for (const auto& [q, row] : p.table.rows()) near.emplace_back(distance(row.playhead, p.playhead), q);
        std::sort(near.begin(), near.end());
        std::size_t used = 0;
        for (const auto& [d, q] : near) {
            if (used == cfg_.params.mining_neighbors) break;
            if (!live(q)) continue;
            ++used;
            ++ledger_.peer(p.id).control_msgs;
            fold(peers_[q]);
        }
    }

    void issue_prefetch(PeerState& p, SegmentId s, Scope scope)
    {
        Pending pend;
        pend.req = {p.id, s, now_, scope, 0.0, kServerId, false};
        p.in_flight.insert(s);
        const std::uint64_t id = next_request_++;
        pending_.emplace(id, std::move(pend));
        try_scope(id);
    }

    bool shortcuts_available(PeerId id) { return shortcuts_ && !overlay_.live_shortcuts(id).empty(); }

    void try_scope(std::uint64_t rid)
    {
        Pending& pend = pending_.at(rid);
        SegmentRequest& r = pend.req;
        PeerState& p = peers_[r.requester];
        PeerStats& stats = ledger_.peer(r.requester);
        r.deadline = now_ + cfg_.params.request_timeout_s;

        if (r.scope == Scope::Session) {
            std::optional<PeerId> chosen;
            if (cfg_.strategy == StrategyKind::Random) {
                // No buffer maps: ask the session-mate with the closest playhead.
                chosen = best_of(p, overlay_.session_peers(r.requester), p.playhead, false);
            } else {
                std::vector<PeerId> holders = p.table.holders(r.segment);
                std::vector<ProviderCandidate> c;
                for (PeerId q : holders) {
                    c.push_back({q, p.history.score(q, period()),
                                 distance(p.table.rows().at(q).playhead, p.playhead),
                                 topo_.path_latency_ms(p.host, host(q))});
                }
                chosen = choose_provider(c);
            }
            if (!chosen) {
                r.scope = escalate(r.scope, shortcuts_available(r.requester));
                try_scope(rid);
                return;
            }
            r.provider = *chosen;
            ++stats.request_msgs;
            r.answered = holds(*chosen, r.segment);
        } else if (r.scope == Scope::Shortcut) {
            const std::vector<PeerId> sc = overlay_.live_shortcuts(r.requester);
            if (sc.empty()) {
                r.scope = Scope::Server;
                try_scope(rid);
                return;
            }
            stats.request_msgs += sc.size();
            std::vector<PeerId> yes;
            for (PeerId q : sc) {
                if (holds(q, r.segment)) yes.push_back(q);
            }
            stats.request_msgs += yes.size();
            r.answered = !yes.empty();
            if (r.answered) {
                r.provider = *best_of(p, yes, p.playhead, true);
                start_after_rtt(rid);
                return;
            }
        } else {
            r.provider = kServerId;
            ++stats.request_msgs;
            r.answered = true;
        }
        if (r.answered) {
            ++stats.request_msgs;  // the response
            start_after_rtt(rid);
        } else {
            schedule(r.deadline, EventKind::RequestTimeout, r.requester, rid);
        }
    }

    void on_timeout(std::uint64_t rid)
    {
        auto it = pending_.find(rid);
        if (it == pending_.end() || it->second.req.answered) return;
        SegmentRequest& r = it->second.req;
        if (!live(r.requester)) {
            pending_.erase(it);
            return;
        }
        const Scope from = r.scope;
        r.scope = escalate(r.scope, shortcuts_available(r.requester));
        log(EventKind::RequestTimeout, r.requester,
            "segment=" + std::to_string(r.segment) + " scope=" +
                std::string(to_string(from)) + "->" + std::string(to_string(r.scope)));
        try_scope(rid);
    }

    // --- transfers -----------------------------------------------------

    void start_after_rtt(Pending&& pend)
    {
        const std::uint64_t id = next_request_++;
        pending_.emplace(id, std::move(pend));
        start_after_rtt(id);
    }

    void start_after_rtt(std::uint64_t rid)
    {
        const SegmentRequest& r = pending_.at(rid).req;
        schedule(now_ + rtt(r.requester, r.provider), EventKind::FlowStart, r.requester, rid);
    }

    void on_flow_start(std::uint64_t rid)
    {
        auto it = pending_.find(rid);
        if (it == pending_.end()) return;
        Pending& pend = it->second;
        SegmentRequest& r = pend.req;
        if (!live(r.requester)) {
            pending_.erase(it);
            return;
        }
        if (r.provider != kServerId && !live(r.provider)) {
            // Provider left between answer and transfer start.
            r.provider = kServerId;
            r.scope = Scope::Server;
            start_after_rtt(rid);
            return;
        }
        pend.flow = network_.add(host(r.provider), host(r.requester), cfg_.video.segment_bits(), pend.seek ? 0 : 1,
                                 now_);
        flow_owner_[pend.flow] = rid;
        rebalance();
    }

    void rebalance()
    {
        for (const auto& [flow, finish] : network_.reallocate(now_)) {
            const std::uint64_t rid = flow_owner_.at(flow);
            Pending& pend = pending_.at(rid);
            ++pend.version;
            if (std::isfinite(finish)) {
                schedule(std::max(finish, now_), EventKind::TransferComplete, pend.req.requester, rid,
                         pend.version);
            }
        }
    }

    void on_complete(std::uint64_t rid, std::uint64_t version)
    {
        auto it = pending_.find(rid);
        if (it == pending_.end() || it->second.version != version) return;
        const Pending pend = it->second;
        pending_.erase(it);
        network_.remove(pend.flow, now_);
        flow_owner_.erase(pend.flow);
        rebalance();

        const SegmentRequest& r = pend.req;
        if (r.provider == kServerId) {
            ledger_.add_server_bits(cfg_.video.segment_bits());
        } else {
            peers_[r.requester].history.record(r.provider, period());
        }
        PeerState& p = peers_[r.requester];
        log(EventKind::TransferComplete, r.requester,
            "segment=" + std::to_string(r.segment) + (pend.seek ? " seek" : " prefetch") + " provider=" +
                who(r.provider) + " elapsed=" + seconds(now_ - r.issued_at));
        if (pend.seek) {
            ledger_.complete_seek(pend.seek_index, now_ - r.issued_at);
            if (!p.live) return;
            const bool wanted_now = p.awaiting && *p.awaiting == r.segment;
            if (retain_) p.cache.insert(r.segment, Origin::OnDemand, now_, p.playhead);
            if (wanted_now) {
                if (!retain_) p.handoff = r.segment;
                p.awaiting.reset();
                if (!p.paused) schedule_tick(p);
            }
            return;
        }
        if (!p.live) return;
        p.in_flight.erase(r.segment);
        if (!p.cache.contains(r.segment)) {
            Origin o = Origin::PrefetchPeer;
            if (r.provider == kServerId) o = Origin::Server;
            else if (r.scope == Scope::Shortcut) o = Origin::PrefetchShortcut;
            p.cache.insert(r.segment, o, now_, p.playhead);
            ++ledger_.peer(p.id).prefetched_segments;
        }
    }

    // --- control plane -------------------------------------------------

    void on_gossip(PeerId id)
    {
        PeerState& p = peers_[id];
        if (!p.live) return;
        const BufferMapMsg msg = emit_gossip(id, p.cache, p.playhead, now_);
        const std::vector<PeerId> mates = overlay_.session_peers(id);
        for (PeerId q : mates) peers_[q].table.apply(msg);
        ledger_.peer(id).control_msgs += mates.size();
        schedule(now_ + cfg_.params.gossip_period_s, EventKind::GossipTick, id);
    }

    void on_tracker()
    {
        for (PeerState& p : peers_) {
            if (!p.live) continue;
            tracker_.update(extract_seek_targets(p.record, p.reported_upto, cfg_.params.min_skip));
            p.reported_upto = p.record.size();
            ++ledger_.peer(p.id).control_msgs;
        }
        const PopularityList list = tracker_.popularity_list(cfg_.params.popularity_length, now_);
        for (PeerState& p : peers_) {
            if (!p.live) continue;
            p.popularity = list;
            ++ledger_.peer(p.id).control_msgs;
        }
        schedule(now_ + cfg_.params.tracker_period_s, EventKind::TrackerTick, 0);
    }

    // --- invariants ----------------------------------------------------

    void check_invariants()
    {
        ++checks_;
        for (const PeerState& p : peers_) {
            if (p.cache.size() > p.cache.capacity()) throw InvariantViolation("cache over capacity");
            for (const auto& [s, e] : p.cache.entries()) {
                if (e.arrival_time > now_) throw InvariantViolation("cache entry from the future");
            }
        }
        for (const auto& [id, s] : ledger_.peers()) {
            if (s.seeks != s.outcomes()) throw InvariantViolation("seek outcomes do not add up");
            if (s.prefetched_played > s.prefetched_segments) throw InvariantViolation("played more than prefetched");
        }
        if (!overlay_.tree_is_valid()) throw InvariantViolation("session tree broken");
        for (HostId h = 0; h < topo_.host_count(); ++h) {
            const AccessLink& a = topo_.access(h);
            if (network_.upload_rate(h) > a.up_bps * (1 + 1e-9) ||
                network_.download_rate(h) > a.down_bps * (1 + 1e-9)) {
                throw InvariantViolation("access link oversubscribed");
            }
        }
    }

    const RunConfig& cfg_;
    std::vector<ViewerTrace> traces_;
    NetworkTopology topo_;
    Overlay overlay_;
    FlowNetwork network_;
    Rng strategy_rng_;
    MetricsLedger ledger_;
    Tracker tracker_;
    std::vector<PeerState> peers_;
    std::map<std::uint64_t, Pending> pending_;
    std::map<FlowNetwork::FlowId, std::uint64_t> flow_owner_;
    std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
    SimTime now_ = 0.0;
    std::uint64_t seq_ = 0;
    std::uint64_t next_request_ = 1;
    std::uint64_t events_ = 0;
    std::uint64_t checks_ = 0;
    std::vector<TimelineEntry> timeline_;
    bool gossips_ = false;
    bool shortcuts_ = false;
    bool retain_ = true;
    std::uint32_t urgent_ = 0;
};

}  // namespace

RunResult run_detailed(const RunConfig& config)
{
    config.validate();
    Simulation sim(config);
    return sim.run();
}

MetricsReport run(const RunConfig& config) { return run_detailed(config).report; }

std::vector<MetricsReport> sweep(const std::vector<RunConfig>& configs, unsigned parallelism)
{
    if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
    std::vector<std::optional<MetricsReport>> out(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                out[i] = run(configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::min<std::size_t>(parallelism, std::max<std::size_t>(configs.size(), 1));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw SweepError(i, e.what());
        }
    }
    std::vector<MetricsReport> reports;
    reports.reserve(out.size());
    for (auto& r : out) reports.push_back(std::move(*r));
    return reports;
}

}  // namespace vodsim
