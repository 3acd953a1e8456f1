#include "vodsim/topology.hpp"

#include <cstdio>
#include <limits>
#include <queue>
#include <stdexcept>

#include "vodsim/rng.hpp"

namespace vodsim {

void TopologyParams::validate() const
{
    if (as_count < 1) throw std::invalid_argument("topology.as_count must be >= 1");
    if (routers_per_as < 1) throw std::invalid_argument("topology.routers_per_as must be >= 1");
    if (peer_count < 1) throw std::invalid_argument("topology.peer_count must be >= 1");
    if (!(access_delay_min_ms >= 0.0) || access_delay_max_ms < access_delay_min_ms) {
        throw std::invalid_argument("topology.access_delay range is invalid");
    }
    if (!(core_delay_min_ms >= 0.0) || core_delay_max_ms < core_delay_min_ms) {
        throw std::invalid_argument("topology.core_delay range is invalid");
    }
    if (!(peer_up_bps > 0.0) || !(peer_down_bps > 0.0) || !(server_up_bps > 0.0) ||
        !(server_down_bps > 0.0)) {
        throw std::invalid_argument("topology bandwidths must be > 0");
    }
}

const AccessLink& NetworkTopology::access(HostId host) const
{
    if (host >= hosts_.size()) {
        throw std::out_of_range("unknown host " + std::to_string(host));
    }
    return hosts_[host];
}

double NetworkTopology::core_distance_ms(std::uint32_t ra, std::uint32_t rb) const
{
    const std::uint32_t n = router_count();
    if (ra >= n || rb >= n) {
        throw std::out_of_range("unknown router");
    }
    return dist_[static_cast<std::size_t>(ra) * n + rb];
}

double NetworkTopology::path_latency_ms(HostId a, HostId b) const
{
    const AccessLink& la = access(a);
    const AccessLink& lb = access(b);
    if (a == b) {
        return 0.0;
    }
    return la.delay_ms + core_distance_ms(la.router, lb.router) + lb.delay_ms;
}

void NetworkTopology::compute_distances()
{
    const std::uint32_t n = router_count();
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
    for (const CoreEdge& e : edges_) {
        adj[e.a].emplace_back(e.b, e.delay_ms);
        adj[e.b].emplace_back(e.a, e.delay_ms);
    }
    const double inf = std::numeric_limits<double>::infinity();
    dist_.assign(static_cast<std::size_t>(n) * n, inf);
    using Item = std::pair<double, std::uint32_t>;
    for (std::uint32_t src = 0; src < n; ++src) {
        double* row = &dist_[static_cast<std::size_t>(src) * n];
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        row[src] = 0.0;
        pq.emplace(0.0, src);
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > row[u]) continue;
            for (auto [v, w] : adj[u]) {
                if (d + w < row[v]) {
                    row[v] = d + w;
                    pq.emplace(row[v], v);
                }
            }
        }
    }
}

std::string NetworkTopology::dump() const
{
    std::string out;
    char buf[160];
    const std::uint32_t r = router_count();
    for (std::uint32_t i = 0; i < r; ++i) {
        std::snprintf(buf, sizeof buf, "NODE %u %s 0.000000 0 0\n", i,
                      router_transit_[i] ? "transit" : "stub");
        out += buf;
    }
    for (std::uint32_t h = 0; h < hosts_.size(); ++h) {
        const AccessLink& l = hosts_[h];
        std::snprintf(buf, sizeof buf, "NODE %u %s %.6f %.0f %.0f\n", r + h, h == kServerHost ? "server" : "peer",
                      l.delay_ms, l.up_bps, l.down_bps);
        out += buf;
    }
    for (const CoreEdge& e : edges_) {
        std::snprintf(buf, sizeof buf, "EDGE %u %u %.6f\n", e.a, e.b, e.delay_ms);
        out += buf;
    }
    for (std::uint32_t h = 0; h < hosts_.size(); ++h) {
        std::snprintf(buf, sizeof buf, "EDGE %u %u %.6f\n", r + h, hosts_[h].router, hosts_[h].delay_ms);
        out += buf;
    }
    return out;
}

NetworkTopology generate_topology(const TopologyParams& p)
{
    p.validate();
    Rng rng(p.seed);
    NetworkTopology topo;
    topo.as_count_ = p.as_count;
    topo.routers_per_as_ = p.routers_per_as;

    // Per AS: the first quarter of the routers (at least one) are transit
    // routers joined in a ring; the rest are stub routers, each attached to
    // one transit router of its AS.
    const std::uint32_t transit_per_as = std::max<std::uint32_t>(1, p.routers_per_as / 4);
    auto core_delay = [&] { return rng.uniform(p.core_delay_min_ms, p.core_delay_max_ms); };
    std::vector<std::uint32_t> stub_routers;
    for (std::uint32_t as = 0; as < p.as_count; ++as) {
        const std::uint32_t base = as * p.routers_per_as;
        for (std::uint32_t i = 0; i < p.routers_per_as; ++i) {
            topo.router_transit_.push_back(i < transit_per_as);
        }
        if (transit_per_as == 2) {
            topo.edges_.push_back({base, base + 1, core_delay()});
        } else if (transit_per_as > 2) {
            for (std::uint32_t i = 0; i < transit_per_as; ++i) {
                topo.edges_.push_back({base + i, base + (i + 1) % transit_per_as, core_delay()});
            }
        }
        for (std::uint32_t i = transit_per_as; i < p.routers_per_as; ++i) {
            const auto up = static_cast<std::uint32_t>(rng.below(transit_per_as));
            topo.edges_.push_back({base + up, base + i, core_delay()});
            stub_routers.push_back(base + i);
        }
        if (as > 0) {
            topo.edges_.push_back({(as - 1) * p.routers_per_as, base, core_delay()});
        }
    }
    topo.compute_distances();

    auto access_delay = [&] { return rng.uniform(p.access_delay_min_ms, p.access_delay_max_ms); };
    // The source sits on the first transit router.
    topo.hosts_.push_back({0, access_delay(), p.server_up_bps, p.server_down_bps});
    const std::vector<std::uint32_t>* attach = &stub_routers;
    std::vector<std::uint32_t> all_routers;
    if (stub_routers.empty()) {
        for (std::uint32_t i = 0; i < topo.router_count(); ++i) all_routers.push_back(i);
        attach = &all_routers;
    }
    for (std::uint32_t i = 0; i < p.peer_count; ++i) {
        const std::uint32_t router = (*attach)[rng.below(attach->size())];
        topo.hosts_.push_back({router, access_delay(), p.peer_up_bps, p.peer_down_bps});
    }
    return topo;
}

}  // namespace vodsim
