#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "vodsim/domain.hpp"
#include "vodsim/strategies.hpp"
#include "vodsim/topology.hpp"

namespace vodsim {

/// Per-provider segment counts over request periods.
///
/// The rate estimate for provider k is the mean number of segments received
/// from k over the last P periods, the current one included:
///     W_k = (sum of f_k^T for T = p-P+1 .. p) / P
/// Periods with no receipts count as zero.
class TransferHistory {
public:
    explicit TransferHistory(std::uint32_t window = 5);

    std::uint32_t window() const { return window_; }
    void record(PeerId provider, std::uint64_t period, std::uint32_t segments = 1);
    double score(PeerId provider, std::uint64_t current_period) const;
    std::size_t ring_length(PeerId provider) const;

private:
    std::uint32_t window_;
    std::map<PeerId, std::map<std::uint64_t, std::uint32_t>> counts_;
};

/// Rate estimate W_k; also usable on a bare list of the last P counts.
double score_provider(const TransferHistory& history, PeerId provider, std::uint64_t current_period);
double score_provider(const std::vector<std::uint32_t>& last_counts, std::uint32_t window);

struct ProviderCandidate {
    PeerId peer = 0;
    double score = 0.0;
    double playhead_distance = 0.0;
    double latency_ms = 0.0;
};

/// Highest score; ties by smaller playhead distance, lower latency, lower id.
/// Empty input has no provider.
std::optional<PeerId> choose_provider(const std::vector<ProviderCandidate>& candidates);

/// Seconds to move `segment_bits` when the provider uplink is split across
/// `up_flows` and the requester downlink across `down_flows`.
double transfer_time(double segment_bits, double provider_up_bps, double requester_down_bps,
                     std::uint32_t up_flows = 1, std::uint32_t down_flows = 1);

struct FlowSpec {
    HostId src = 0;
    HostId dst = 0;
    int priority = 1;  // 0 is served before 1
};

/// Max-min fair rates by progressive filling, strict priority between
/// levels. Each flow consumes its source uplink and destination downlink.
std::vector<double> max_min_rates(const std::vector<FlowSpec>& flows,
                                  const std::function<double(HostId)>& up_capacity,
                                  const std::function<double(HostId)>& down_capacity);

/// Fluid model of the on-demand transfers in flight.
class FlowNetwork {
public:
    using FlowId = std::uint64_t;

    explicit FlowNetwork(const NetworkTopology& topo) : topo_(&topo) {}

    FlowId add(HostId src, HostId dst, double bits, int priority, SimTime now);
    void remove(FlowId id, SimTime now);

    /// Recomputes every rate at `now`; returns flows whose finish time moved.
    std::vector<std::pair<FlowId, SimTime>> reallocate(SimTime now);

    bool contains(FlowId id) const { return flows_.count(id) != 0; }
    double rate(FlowId id) const { return flows_.at(id).rate; }
    SimTime finish_time(FlowId id) const { return flows_.at(id).finish; }
    std::size_t size() const { return flows_.size(); }

    /// Sum of current rates leaving `host` / entering `host`.
    double upload_rate(HostId host) const;
    double download_rate(HostId host) const;
    std::uint32_t uploads(HostId host) const;

private:
    struct Flow {
        FlowSpec spec;
        double remaining = 0.0;
        double rate = 0.0;
        SimTime updated = 0.0;
        SimTime finish = 0.0;
    };
    void advance(SimTime now);

    const NetworkTopology* topo_;
    std::map<FlowId, Flow> flows_;
    FlowId next_id_ = 1;
};

struct SegmentRequest {
    PeerId requester = 0;
    SegmentId segment = 0;
    SimTime issued_at = 0.0;
    Scope scope = Scope::Session;
    SimTime deadline = 0.0;
    PeerId provider = kServerId;  // chosen provider; kServerId for the source
    bool answered = false;        // provider holds the segment
};

enum class SeekKind { RelativeHit, GlobalHit, ShortcutFetch, ServerFetch };

std::string_view to_string(SeekKind kind);

struct SeekOutcome {
    SeekKind kind = SeekKind::ServerFetch;
    std::optional<double> latency;  // known once the data is available
};

/// Local copy first, then a same-session holder, then a shortcut holder,
/// and the server otherwise.
SeekKind classify_seek(bool resident, bool held_in_session, bool held_by_shortcut);

/// Escalation order for unanswered requests; Server is terminal.
Scope escalate(Scope scope, bool shortcuts_available);

}  // namespace vodsim
