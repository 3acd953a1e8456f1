#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vodsim/domain.hpp"

namespace vodsim {

/// Host index: 0 is the media source, peer p is host p + 1.
using HostId = std::uint32_t;

inline constexpr HostId kServerHost = 0;
inline constexpr HostId host_of(PeerId peer) { return peer + 1; }

struct TopologyParams {
    std::uint32_t as_count = 2;
    std::uint32_t routers_per_as = 8;
    std::uint32_t peer_count = 100;
    std::uint64_t seed = 1;
    double access_delay_min_ms = 5.0;
    double access_delay_max_ms = 10.0;
    double core_delay_min_ms = 1.0;
    double core_delay_max_ms = 5.0;
    double peer_up_bps = 512000.0;
    double peer_down_bps = 512000.0;
    double server_up_bps = 20e6;
    double server_down_bps = 20e6;

    void validate() const;
};

struct AccessLink {
    std::uint32_t router = 0;
    double delay_ms = 0.0;
    double up_bps = 0.0;
    double down_bps = 0.0;
};

struct CoreEdge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double delay_ms = 0.0;
};

/// Transit-stub physical network. Routers carry the core graph; hosts (the
/// server and the peers) hang off routers through access links.
class NetworkTopology {
public:
    std::uint32_t as_count() const { return as_count_; }
    std::uint32_t routers_per_as() const { return routers_per_as_; }
    std::uint32_t router_count() const { return static_cast<std::uint32_t>(router_transit_.size()); }
    std::uint32_t host_count() const { return static_cast<std::uint32_t>(hosts_.size()); }
    std::uint32_t peer_count() const { return host_count() - 1; }

    bool is_transit(std::uint32_t router) const { return router_transit_.at(router); }
    const AccessLink& access(HostId host) const;
    const std::vector<CoreEdge>& core_edges() const { return edges_; }

    /// One-way latency between two hosts in milliseconds.
    double path_latency_ms(HostId a, HostId b) const;
    double core_distance_ms(std::uint32_t ra, std::uint32_t rb) const;

    /// Line-oriented dump: NODE and EDGE records; routers are numbered
    /// first, then hosts.
    std::string dump() const;

private:
    friend NetworkTopology generate_topology(const TopologyParams&);
    void compute_distances();

    std::uint32_t as_count_ = 0;
    std::uint32_t routers_per_as_ = 0;
    std::vector<bool> router_transit_;
    std::vector<CoreEdge> edges_;
    std::vector<AccessLink> hosts_;
    std::vector<double> dist_;  // router_count^2, row-major
};

NetworkTopology generate_topology(const TopologyParams& params);

}  // namespace vodsim
