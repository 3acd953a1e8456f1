#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vodsim/domain.hpp"
#include "vodsim/metrics.hpp"
#include "vodsim/strategies.hpp"
#include "vodsim/topology.hpp"
#include "vodsim/workload.hpp"

namespace vodsim {

enum class EventKind {
    Arrival,
    PlaybackTick,
    GossipTick,
    PlanTick,
    Seek,
    Pause,
    Resume,
    RequestTimeout,
    FlowStart,
    TransferComplete,
    TrackerTick,
    Depart,
    End,
};

std::string_view to_string(EventKind kind);

/// Knobs shared by the prefetching strategies.
struct StrategyParams {
    std::size_t cache_capacity = 120;
    double cache_ttl_s = 60.0;
    EvictionOrder eviction = EvictionOrder::ConsumedFirst;
    /// Keep played segments cached (ignored by `none`, which never does).
    bool retain_played = true;
    std::uint32_t urgent_window = 20;  // segments; `none` uses 0
    std::size_t prefetch_budget = 4;
    double plan_period_s = 10.0;
    double gossip_period_s = 10.0;
    /// State-table rows older than this many gossip periods are dropped.
    double stale_periods = 3.0;
    std::uint32_t coop_horizon = 60;
    std::uint32_t mining_window = 5;
    double mining_support = 0.0;
    std::size_t mining_neighbors = 3;
    double tracker_period_s = 60.0;
    std::size_t popularity_length = 20;
    std::size_t shortcut_count = 5;
    double shortcut_refresh_s = 60.0;
    double request_timeout_s = 2.0;
    std::uint32_t history_window = 5;
    double history_period_s = 10.0;
    std::uint32_t min_skip = 2;
};

struct RunConfig {
    StrategyKind strategy = StrategyKind::Cooperative;
    std::uint64_t seed = 1;
    Video video;
    TopologyParams topology;  // peer_count and seed are taken from the run
    WorkloadParams workload;  // seed is taken from the run
    StrategyParams params;
    double session_width_s = 120.0;
    double duration_s = 1800.0;
    /// Scripted viewers; replaces the generated workload when set.
    std::optional<std::vector<ViewerTrace>> traces;
    /// Re-check the run invariants after every event.
    bool check_invariants = false;
    /// Keep a log of arrivals, VCR events, timeouts, deliveries and departures.
    bool record_timeline = false;

    /// Throws ConfigError naming the first offending field.
    void validate() const;
};

class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Traces the run would use: the scripted ones, else generated from the
/// workload sub-seed.
std::vector<ViewerTrace> workload_traces(const RunConfig& config);

/// Seed of a named sub-stream of the run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name);

struct TimelineEntry {
    SimTime time = 0.0;
    EventKind kind = EventKind::End;
    PeerId peer = 0;
    std::string detail;
};

/// One line per entry: `<time %.6f> <KIND> peer=<id> <detail>`.
std::string format_timeline(const std::vector<TimelineEntry>& timeline);

struct RunResult {
    MetricsReport report;
    std::vector<SeekLogEntry> seek_log;
    std::vector<TimelineEntry> timeline;
    std::uint64_t events = 0;
    std::uint64_t invariant_checks = 0;
};

RunResult run_detailed(const RunConfig& config);
MetricsReport run(const RunConfig& config);

class SweepError : public std::runtime_error {
public:
    SweepError(std::size_t index, const std::string& what)
        : std::runtime_error("run " + std::to_string(index) + ": " + what), index_(index)
    {
    }
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Runs every config on up to `parallelism` threads; reports keep input
/// order. The first failing run (lowest index) is rethrown as SweepError.
std::vector<MetricsReport> sweep(const std::vector<RunConfig>& configs, unsigned parallelism);

}  // namespace vodsim
