#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "vodsim/domain.hpp"
#include "vodsim/rng.hpp"
#include "vodsim/topology.hpp"

namespace vodsim {

using SessionId = std::uint32_t;

/// Peers that arrived within one fixed-width window, and their push tree.
struct Session {
    SessionId id = 0;
    SimTime window_start = 0.0;
    double width = 120.0;
    std::set<PeerId> members;  // live members only

    bool window_contains(SimTime t) const { return window_start <= t && t < window_start + width; }
};

/// Session management over a shared tree-push stream: arrival-window
/// sessions, a per-session distribution tree rooted at the server, and
/// shortcut-neighbor lists pointing into other sessions.
class Overlay {
public:
    Overlay(const NetworkTopology& topo, double session_width, double streaming_rate);

    /// Places `peer` in the session covering `arrival` and attaches it to the
    /// nearest member with a free upload slot, else to the server.
    const Session& assign_session(PeerId peer, SimTime arrival);

    /// Uniform sample (without replacement) of at most `k` live peers from
    /// other sessions. Replaces the peer's stored shortcut list.
    std::vector<PeerId> refresh_shortcuts(PeerId peer, std::size_t k, Rng& rng);

    /// Removes `peer`; its tree children move to its parent. Returns them.
    std::vector<PeerId> handle_departure(PeerId peer);

    bool is_assigned(PeerId peer) const { return peers_.count(peer) != 0; }
    bool is_live(PeerId peer) const;
    SimTime arrival(PeerId peer) const { return info(peer).arrival; }
    SessionId session_of(PeerId peer) const { return info(peer).session; }
    const Session& session(SessionId id) const { return sessions_.at(id); }
    const std::map<SessionId, Session>& sessions() const { return sessions_; }
    PeerId parent(PeerId peer) const { return info(peer).parent; }
    const std::vector<PeerId>& children(PeerId peer) const { return info(peer).children; }

    /// Live members of the peer's session other than itself.
    std::vector<PeerId> session_peers(PeerId peer) const;

    /// Stored shortcut list with departed peers dropped (the purge is lazy).
    std::vector<PeerId> live_shortcuts(PeerId peer);
    const std::vector<PeerId>& stored_shortcuts(PeerId peer) const { return info(peer).shortcuts; }

    std::vector<PeerId> live_peers() const;

    /// True when every live peer reaches the server through live parents
    /// without revisiting a node.
    bool tree_is_valid() const;

private:
    struct PeerInfo {
        SimTime arrival = 0.0;
        SessionId session = 0;
        PeerId parent = kServerId;
        std::vector<PeerId> children;
        std::vector<PeerId> shortcuts;
        bool live = true;
    };

    const PeerInfo& info(PeerId peer) const;
    PeerInfo& info(PeerId peer);
    std::size_t upload_slots() const { return slots_; }

    const NetworkTopology* topo_;
    double width_;
    std::size_t slots_;
    std::map<SessionId, Session> sessions_;
    std::map<PeerId, PeerInfo> peers_;
};

}  // namespace vodsim
