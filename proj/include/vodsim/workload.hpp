#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vodsim/domain.hpp"

namespace vodsim {

enum class ViewerEventKind { Seek, Pause, Resume, Leave };

std::string_view to_string(ViewerEventKind kind);

struct ViewerEvent {
    SimTime time = 0.0;
    ViewerEventKind kind = ViewerEventKind::Seek;
    SegmentId target = 0;  // Seek only

    friend bool operator==(const ViewerEvent&, const ViewerEvent&) = default;
};

struct ViewerTrace {
    PeerId peer = 0;
    SimTime arrival = 0.0;
    std::vector<ViewerEvent> events;

    /// Strictly increasing times, all after arrival; Leave only last.
    bool well_formed() const;
    friend bool operator==(const ViewerTrace&, const ViewerTrace&) = default;
};

enum class SeekDistribution { Uniform, Zipf };

struct WorkloadParams {
    std::uint32_t peer_count = 100;
    double arrival_rate = 0.1;  // peers per second, Poisson
    double seek_rate = 1.0 / 120.0;  // per viewer, exponential gaps
    SeekDistribution seek_distribution = SeekDistribution::Zipf;
    double zipf_alpha = 0.8;
    /// Zipf seeks land within this many segments of the current one
    /// (0 = anywhere in the chosen direction).
    std::uint32_t seek_window = 40;
    double forward_fraction = 0.7;
    double short_session_fraction = 0.30;
    double short_session_min_s = 30.0;
    double short_session_max_s = 300.0;
    double pause_rate = 0.0;  // per viewer
    double pause_min_s = 5.0;
    double pause_max_s = 30.0;
    /// No events are generated later than this many seconds after time 0.
    double horizon_s = 1800.0;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Popularity rank (1 = most popular) of every segment; a seeded
/// permutation shared by all viewers of one workload.
std::vector<std::uint32_t> popularity_ranks(std::uint32_t segment_count, std::uint64_t seed);

/// Reproducible arrivals and VCR behaviour for every viewer.
///
/// Seek targets are derived from the viewer's uninterrupted playhead:
/// Uniform picks any segment other than the current one; Zipf first picks a
/// direction (forward with `forward_fraction`) and then a segment in that
/// direction weighted by rank^-alpha. Short sessions (Bernoulli with
/// `short_session_fraction`) leave after Uniform(min, max) seconds; other
/// viewers watch to the end of the video.
std::vector<ViewerTrace> generate_traces(const WorkloadParams& params, const Video& video);

/// One line per trace: `peer arrival; t KIND [target]; ...`.
void write_traces(std::ostream& out, const std::vector<ViewerTrace>& traces);
std::string format_traces(const std::vector<ViewerTrace>& traces);
std::vector<ViewerTrace> read_traces(std::istream& in);
std::vector<ViewerTrace> parse_traces(const std::string& text);

}  // namespace vodsim
