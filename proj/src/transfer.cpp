#include "vodsim/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace vodsim {

TransferHistory::TransferHistory(std::uint32_t window) : window_(window)
{
    if (window_ < 1) {
        throw std::invalid_argument("transfer history window must be >= 1");
    }
}

void TransferHistory::record(PeerId provider, std::uint64_t period, std::uint32_t segments)
{
    auto& ring = counts_[provider];
    ring[period] += segments;
    while (!ring.empty() && ring.begin()->first + window_ <= ring.rbegin()->first) {
        ring.erase(ring.begin());
    }
}

double TransferHistory::score(PeerId provider, std::uint64_t current_period) const
{
    auto it = counts_.find(provider);
    if (it == counts_.end()) return 0.0;
    const std::uint64_t first = current_period + 1 >= window_ ? current_period + 1 - window_ : 0;
    std::uint64_t sum = 0;
    for (const auto& [period, n] : it->second) {
        if (period >= first && period <= current_period) sum += n;
    }
    return static_cast<double>(sum) / window_;
}

std::size_t TransferHistory::ring_length(PeerId provider) const
{
    auto it = counts_.find(provider);
    return it == counts_.end() ? 0 : it->second.size();
}

double score_provider(const TransferHistory& history, PeerId provider, std::uint64_t current_period)
{
    return history.score(provider, current_period);
}

double score_provider(const std::vector<std::uint32_t>& last_counts, std::uint32_t window)
{
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    std::uint64_t sum = 0;
    const std::size_t n = last_counts.size();
    for (std::size_t i = n > window ? n - window : 0; i < n; ++i) sum += last_counts[i];
    return static_cast<double>(sum) / window;
}

std::optional<PeerId> choose_provider(const std::vector<ProviderCandidate>& candidates)
{
    if (candidates.empty()) return std::nullopt;
    const auto better = [](const ProviderCandidate& a, const ProviderCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.playhead_distance != b.playhead_distance) return a.playhead_distance < b.playhead_distance;
        if (a.latency_ms != b.latency_ms) return a.latency_ms < b.latency_ms;
        return a.peer < b.peer;
    };
    return std::min_element(candidates.begin(), candidates.end(), better)->peer;
}

double transfer_time(double segment_bits, double provider_up_bps, double requester_down_bps,
                     std::uint32_t up_flows, std::uint32_t down_flows)
{
    if (!(segment_bits > 0.0) || !(provider_up_bps > 0.0) || !(requester_down_bps > 0.0) || up_flows == 0 ||
        down_flows == 0) {
        throw std::invalid_argument("transfer_time requires positive arguments");
    }
    const double rate = std::min(provider_up_bps / up_flows, requester_down_bps / down_flows);
    return segment_bits / rate;
}

std::vector<double> max_min_rates(const std::vector<FlowSpec>& flows,
                                  const std::function<double(HostId)>& up_capacity,
                                  const std::function<double(HostId)>& down_capacity)
{
    std::vector<double> rate(flows.size(), 0.0);
    // Resource key: 2*host for the uplink, 2*host+1 for the downlink.
    std::unordered_map<std::uint64_t, double> residual;
    auto up_key = [](HostId h) { return std::uint64_t{h} * 2; };
    auto down_key = [](HostId h) { return std::uint64_t{h} * 2 + 1; };
    for (const FlowSpec& f : flows) {
        residual.try_emplace(up_key(f.src), up_capacity(f.src));
        residual.try_emplace(down_key(f.dst), down_capacity(f.dst));
    }

    int max_priority = 0;
    for (const FlowSpec& f : flows) max_priority = std::max(max_priority, f.priority);

    for (int level = 0; level <= max_priority; ++level) {
        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < flows.size(); ++i) {
            if (flows[i].priority == level) active.push_back(i);
        }
        while (!active.empty()) {
            std::unordered_map<std::uint64_t, std::uint32_t> users;
            for (std::size_t i : active) {
                ++users[up_key(flows[i].src)];
                ++users[down_key(flows[i].dst)];
            }
            double step = std::numeric_limits<double>::infinity();
            for (const auto& [key, n] : users) {
                step = std::min(step, std::max(0.0, residual[key]) / n);
            }
            for (std::size_t i : active) rate[i] += step;
            for (const auto& [key, n] : users) residual[key] -= step * n;

            std::vector<std::size_t> still;
            for (std::size_t i : active) {
                const double ru = residual[up_key(flows[i].src)];
                const double rd = residual[down_key(flows[i].dst)];
                const double tol_u = 1e-9 * std::max(1.0, up_capacity(flows[i].src));
                const double tol_d = 1e-9 * std::max(1.0, down_capacity(flows[i].dst));
                if (ru > tol_u && rd > tol_d) still.push_back(i);
            }
            if (still.size() == active.size()) break;  // nothing saturated: only possible with no users
            active.swap(still);
        }
        for (auto& [key, r] : residual) r = std::max(0.0, r);
    }
    return rate;
}

FlowNetwork::FlowId FlowNetwork::add(HostId src, HostId dst, double bits, int priority, SimTime now)
{
    advance(now);
    const FlowId id = next_id_++;
    Flow f;
    f.spec = {src, dst, priority};
    f.remaining = bits;
    f.updated = now;
    f.finish = std::numeric_limits<double>::infinity();
    flows_.emplace(id, f);
    return id;
}

void FlowNetwork::remove(FlowId id, SimTime now)
{
    advance(now);
    flows_.erase(id);
}

void FlowNetwork::advance(SimTime now)
{
    for (auto& [id, f] : flows_) {
        if (now > f.updated) {
            f.remaining = std::max(0.0, f.remaining - f.rate * (now - f.updated));
            f.updated = now;
        }
    }
}

std::vector<std::pair<FlowNetwork::FlowId, SimTime>> FlowNetwork::reallocate(SimTime now)
{
    advance(now);
    std::vector<FlowSpec> specs;
    std::vector<FlowId> ids;
    specs.reserve(flows_.size());
    for (const auto& [id, f] : flows_) {
        specs.push_back(f.spec);
        ids.push_back(id);
    }
    const auto rates = max_min_rates(
        specs, [&](HostId h) { return topo_->access(h).up_bps; },
        [&](HostId h) { return topo_->access(h).down_bps; });

    std::vector<std::pair<FlowId, SimTime>> moved;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        Flow& f = flows_.at(ids[i]);
        f.rate = rates[i];
        const SimTime finish =
            f.rate > 0.0 ? now + f.remaining / f.rate : std::numeric_limits<double>::infinity();
        if (finish != f.finish) {
            f.finish = finish;
            moved.emplace_back(ids[i], finish);
        }
    }
    return moved;
}

double FlowNetwork::upload_rate(HostId host) const
{
    double r = 0.0;
    for (const auto& [id, f] : flows_) {
        if (f.spec.src == host) r += f.rate;
    }
    return r;
}

double FlowNetwork::download_rate(HostId host) const
{
    double r = 0.0;
    for (const auto& [id, f] : flows_) {
        if (f.spec.dst == host) r += f.rate;
    }
    return r;
}

std::uint32_t FlowNetwork::uploads(HostId host) const
{
    std::uint32_t n = 0;
    for (const auto& [id, f] : flows_) n += f.spec.src == host ? 1 : 0;
    return n;
}

std::string_view to_string(SeekKind kind)
{
    switch (kind) {
    case SeekKind::RelativeHit: return "RELATIVE_HIT";
    case SeekKind::GlobalHit: return "GLOBAL_HIT";
    case SeekKind::ShortcutFetch: return "SHORTCUT_FETCH";
    case SeekKind::ServerFetch: return "SERVER_FETCH";
    }
    return "?";
}

SeekKind classify_seek(bool resident, bool held_in_session, bool held_by_shortcut)
{
    if (resident) return SeekKind::RelativeHit;
    if (held_in_session) return SeekKind::GlobalHit;
    if (held_by_shortcut) return SeekKind::ShortcutFetch;
    return SeekKind::ServerFetch;
}

Scope escalate(Scope scope, bool shortcuts_available)
{
    switch (scope) {
    case Scope::Session: return shortcuts_available ? Scope::Shortcut : Scope::Server;
    case Scope::Shortcut: return Scope::Server;
    case Scope::Server: return Scope::Server;
    }
    return Scope::Server;
}

}  // namespace vodsim
