#include "vodsim/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vodsim {

Overlay::Overlay(const NetworkTopology& topo, double session_width, double streaming_rate)
    : topo_(&topo), width_(session_width)
{
    if (!(session_width > 0.0)) {
        throw std::invalid_argument("session width must be > 0");
    }
    // One child per full stream the access uplink can carry.
    slots_ = static_cast<std::size_t>(std::floor(topo.access(host_of(0)).up_bps / streaming_rate));
}

const Overlay::PeerInfo& Overlay::info(PeerId peer) const
{
    auto it = peers_.find(peer);
    if (it == peers_.end()) {
        throw std::out_of_range("peer " + std::to_string(peer) + " is not in the overlay");
    }
    return it->second;
}

Overlay::PeerInfo& Overlay::info(PeerId peer)
{
    return const_cast<PeerInfo&>(std::as_const(*this).info(peer));
}

bool Overlay::is_live(PeerId peer) const
{
    auto it = peers_.find(peer);
    return it != peers_.end() && it->second.live;
}

const Session& Overlay::assign_session(PeerId peer, SimTime arrival)
{
    if (peers_.count(peer) != 0) {
        throw std::logic_error("peer " + std::to_string(peer) + " already assigned");
    }
    const auto sid = static_cast<SessionId>(std::floor(arrival / width_));
    auto [sit, created] = sessions_.try_emplace(sid);
    Session& s = sit->second;
    if (created) {
        s.id = sid;
        s.window_start = sid * width_;
        s.width = width_;
    }

    PeerId best = kServerId;
    double best_latency = 0.0;
    for (PeerId m : s.members) {
        if (peers_.at(m).children.size() >= slots_) continue;
        const double lat = topo_->path_latency_ms(host_of(m), host_of(peer));
        if (best == kServerId || lat < best_latency) {
            best = m;
            best_latency = lat;
        }
    }

    PeerInfo pi;
    pi.arrival = arrival;
    pi.session = sid;
    pi.parent = best;
    peers_.emplace(peer, std::move(pi));
    if (best != kServerId) {
        peers_.at(best).children.push_back(peer);
    }
    s.members.insert(peer);
    return s;
}

std::vector<PeerId> Overlay::refresh_shortcuts(PeerId peer, std::size_t k, Rng& rng)
{
    PeerInfo& self = info(peer);
    std::vector<PeerId> eligible;
    for (const auto& [id, s] : sessions_) {
        if (id == self.session) continue;
        eligible.insert(eligible.end(), s.members.begin(), s.members.end());
    }
    std::sort(eligible.begin(), eligible.end());
    const std::size_t take = std::min(k, eligible.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.below(eligible.size() - i);
        std::swap(eligible[i], eligible[j]);
    }
    eligible.resize(take);
    self.shortcuts = eligible;
    return eligible;
}

std::vector<PeerId> Overlay::handle_departure(PeerId peer)
{
    PeerInfo& self = info(peer);
    if (!self.live) {
        return {};
    }
    self.live = false;
    sessions_.at(self.session).members.erase(peer);

    if (self.parent != kServerId) {
        auto& siblings = peers_.at(self.parent).children;
        siblings.erase(std::remove(siblings.begin(), siblings.end(), peer), siblings.end());
    }
    std::vector<PeerId> moved = self.children;
    for (PeerId c : moved) {
        peers_.at(c).parent = self.parent;
        if (self.parent != kServerId) {
            peers_.at(self.parent).children.push_back(c);
        }
    }
    self.children.clear();
    self.parent = kServerId;
    return moved;
}

std::vector<PeerId> Overlay::session_peers(PeerId peer) const
{
    const PeerInfo& self = info(peer);
    std::vector<PeerId> out;
    for (PeerId m : sessions_.at(self.session).members) {
        if (m != peer) out.push_back(m);
    }
    return out;
}

std::vector<PeerId> Overlay::live_shortcuts(PeerId peer)
{
    PeerInfo& self = info(peer);
    auto& sc = self.shortcuts;
    sc.erase(std::remove_if(sc.begin(), sc.end(), [&](PeerId p) { return !is_live(p); }), sc.end());
    return sc;
}

std::vector<PeerId> Overlay::live_peers() const
{
    std::vector<PeerId> out;
    for (const auto& [id, pi] : peers_) {
        if (pi.live) out.push_back(id);
    }
    return out;
}

bool Overlay::tree_is_valid() const
{
    for (const auto& [id, pi] : peers_) {
        if (!pi.live) continue;
        PeerId cur = id;
        std::size_t steps = 0;
        while (cur != kServerId) {
            const PeerInfo& ci = peers_.at(cur);
            if (!ci.live || ++steps > peers_.size()) {
                return false;
            }
            if (ci.parent != kServerId) {
                const auto& ch = peers_.at(ci.parent).children;
                if (std::find(ch.begin(), ch.end(), cur) == ch.end()) return false;
                if (peers_.at(ci.parent).session != ci.session) return false;
            }
            cur = ci.parent;
        }
    }
    return true;
}

}  // namespace vodsim
