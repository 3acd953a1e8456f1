#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vodsim/domain.hpp"
#include "vodsim/transfer.hpp"

namespace vodsim {

struct PeerStats {
    SimTime arrival = 0.0;
    std::uint64_t seeks = 0;
    std::uint64_t relative_hits = 0;
    std::uint64_t global_hits = 0;
    std::uint64_t shortcut_fetches = 0;
    std::uint64_t server_fetches = 0;
    std::vector<double> seek_latencies;
    std::uint64_t prefetched_segments = 0;
    std::uint64_t prefetched_played = 0;
    std::uint64_t control_msgs = 0;  // gossip, reports, pushes, history exchanges
    std::uint64_t request_msgs = 0;  // data requests and their responses
    double stall_time = 0.0;

    std::uint64_t outcomes() const { return relative_hits + global_hits + shortcut_fetches + server_fetches; }
};

struct SeekLogEntry {
    PeerId peer = 0;
    SimTime time = 0.0;
    SegmentId target = 0;
    SeekKind kind = SeekKind::ServerFetch;
    std::optional<double> latency;
    std::optional<Origin> hit_origin;        // cache entry that answered a local hit
    std::optional<bool> hit_consumed;
};

/// Counters for one run.
class MetricsLedger {
public:
    PeerStats& peer(PeerId id) { return peers_[id]; }
    const std::map<PeerId, PeerStats>& peers() const { return peers_; }

    /// Books the outcome now; latency follows via `complete_seek`.
    std::size_t record_seek(PeerId peer, SimTime time, SegmentId target, SeekKind kind);
    void complete_seek(std::size_t index, double latency);
    void annotate_hit(std::size_t index, Origin origin, bool consumed)
    {
        log_.at(index).hit_origin = origin;
        log_.at(index).hit_consumed = consumed;
    }
    const std::vector<SeekLogEntry>& seek_log() const { return log_; }

    void add_server_bits(double bits) { server_bits_ += bits; }
    double server_bits() const { return server_bits_; }

    std::uint64_t total_seeks() const;
    std::uint64_t total_control() const;
    std::uint64_t total_requests() const;

private:
    std::map<PeerId, PeerStats> peers_;
    std::vector<SeekLogEntry> log_;
    double server_bits_ = 0.0;
};

/// Seeks answered from the local cache / seeks. Absent with no seeks.
std::optional<double> relative_hit_ratio(const MetricsLedger& ledger);
/// Seeks answered by a same-session peer / seeks. Absent with no seeks.
std::optional<double> global_hit_ratio(const MetricsLedger& ledger);

struct UtilizationRatios {
    std::optional<double> relative;  // mean of per-peer played/prefetched
    std::optional<double> global;    // run-wide played/prefetched
};

UtilizationRatios utilization_ratios(const MetricsLedger& ledger);

/// Fields carried by one row of the summary CSV.
struct SummaryRow {
    std::string strategy;
    std::uint64_t seed = 0;
    std::optional<double> hr_r;
    std::optional<double> hr_g;
    std::optional<double> lat_mean_s;
    std::optional<double> lat_p95_s;
    std::optional<double> util_rel;
    std::optional<double> util_glob;
    std::uint64_t overhead_msgs = 0;

    friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

/// One row of the per-peer CSV.
struct PeerRow {
    PeerId peer = 0;
    std::uint64_t seeks = 0;
    std::uint64_t rel_hits = 0;
    std::uint64_t glob_hits = 0;
    std::uint64_t shortcut = 0;
    std::uint64_t server = 0;
    std::uint64_t prefetched = 0;
    std::uint64_t played = 0;
    std::uint64_t ctrl_msgs = 0;

    friend bool operator==(const PeerRow&, const PeerRow&) = default;
};

struct PeerTiming {
    PeerId peer = 0;
    SimTime arrival = 0.0;
    double latency_sum = 0.0;
    std::uint64_t latency_count = 0;
};

struct MetricsReport {
    SummaryRow summary;
    std::vector<PeerRow> peers;

    // Not part of the CSV files.
    std::optional<double> lat_median_s;
    std::uint64_t seeks = 0;
    std::uint64_t request_msgs = 0;
    double server_bits = 0.0;
    double stall_time = 0.0;
    std::vector<PeerTiming> timings;

    std::optional<double> hr_combined() const;
};

/// Ratios are rounded to the 6-digit grid used by the CSV files.
MetricsReport build_report(std::string strategy, std::uint64_t seed, const MetricsLedger& ledger);

inline constexpr const char* kSummaryHeader =
    "strategy,seed,hr_r,hr_g,lat_mean_s,lat_p95_s,util_rel,util_glob,overhead_msgs";
inline constexpr const char* kPerPeerHeader = "peer,seeks,rel_hits,glob_hits,shortcut,server,prefetched,played,ctrl_msgs";

std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string per_peer_csv(const std::vector<PeerRow>& rows);
std::string summary_json(const MetricsReport& report);

std::vector<SummaryRow> parse_summary_csv(const std::string& text);
std::vector<PeerRow> parse_per_peer_csv(const std::string& text);

std::string per_peer_filename(const SummaryRow& row);

/// Writes summary.csv, per_peer_<strategy>_<seed>.csv and
/// summary_<strategy>_<seed>.json into `dir`.
void export_report(const MetricsReport& report, const std::filesystem::path& dir);

/// Reads back what `export_report` wrote for `strategy`/`seed` (summary row
/// and per-peer rows only).
MetricsReport read_report(const std::filesystem::path& dir, const std::string& strategy, std::uint64_t seed);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace vodsim
