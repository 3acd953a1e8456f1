#include "vodsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "vodsim/rng.hpp"

namespace vodsim {

std::string_view to_string(ViewerEventKind kind)
{
    switch (kind) {
    case ViewerEventKind::Seek: return "SEEK";
    case ViewerEventKind::Pause: return "PAUSE";
    case ViewerEventKind::Resume: return "RESUME";
    case ViewerEventKind::Leave: return "LEAVE";
    }
    return "?";
}

bool ViewerTrace::well_formed() const
{
    SimTime last = arrival;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const ViewerEvent& e = events[i];
        if (!(e.time > last) && !(i == 0 && e.time >= arrival)) return false;
        if (e.kind == ViewerEventKind::Leave && i + 1 != events.size()) return false;
        last = e.time;
    }
    return true;
}

void WorkloadParams::validate() const
{
    if (peer_count == 0) throw std::invalid_argument("workload.peer_count must be >= 1");
    if (!(arrival_rate > 0.0)) throw std::invalid_argument("workload.arrival_rate must be > 0");
    if (!(seek_rate >= 0.0)) throw std::invalid_argument("workload.seek_rate must be >= 0");
    if (!(zipf_alpha >= 0.0)) throw std::invalid_argument("workload.zipf_alpha must be >= 0");
    if (!(forward_fraction >= 0.0 && forward_fraction <= 1.0)) {
        throw std::invalid_argument("workload.forward_fraction must be in [0,1]");
    }
    if (!(short_session_fraction >= 0.0 && short_session_fraction <= 1.0)) {
        throw std::invalid_argument("workload.short_session_fraction must be in [0,1]");
    }
    if (!(short_session_min_s > 0.0) || short_session_max_s < short_session_min_s) {
        throw std::invalid_argument("workload.short_session range is invalid");
    }
    if (!(pause_rate >= 0.0)) throw std::invalid_argument("workload.pause_rate must be >= 0");
    if (!(pause_min_s > 0.0) || pause_max_s < pause_min_s) {
        throw std::invalid_argument("workload.pause range is invalid");
    }
    if (!(horizon_s > 0.0)) throw std::invalid_argument("workload.horizon_s must be > 0");
}

std::vector<std::uint32_t> popularity_ranks(std::uint32_t segment_count, std::uint64_t seed)
{
    std::vector<std::uint32_t> order(segment_count);
    std::iota(order.begin(), order.end(), 0u);
    Rng rng = Rng::named(seed, "popularity");
    rng.shuffle(order);
    std::vector<std::uint32_t> rank(segment_count);
    for (std::uint32_t r = 0; r < segment_count; ++r) {
        rank[order[r]] = r + 1;
    }
    return rank;
}

namespace {

// Trace files carry microsecond times; generating on that grid keeps
// export/import exact.
SimTime quantize(SimTime t) { return std::round(t * 1e6) / 1e6; }

class TargetPicker {
public:
    TargetPicker(const WorkloadParams& p, const Video& v)
        : p_(p), n_(v.segment_count)
    {
        if (p.seek_distribution == SeekDistribution::Zipf) {
            const auto ranks = popularity_ranks(n_, p.seed);
            weight_.resize(n_);
            for (std::uint32_t s = 0; s < n_; ++s) {
                weight_[s] = std::pow(static_cast<double>(ranks[s]), -p.zipf_alpha);
            }
        }
    }

    /// Returns false when no segment other than `x` exists.
    bool pick(SegmentId x, Rng& rng, SegmentId& out) const
    {
        if (n_ < 2) return false;
        if (p_.seek_distribution == SeekDistribution::Uniform) {
            const auto r = static_cast<SegmentId>(rng.below(n_ - 1));
            out = r >= x ? r + 1 : r;
            return true;
        }
        const std::uint32_t w = p_.seek_window == 0 ? n_ : p_.seek_window;
        const bool can_fwd = x + 1 < n_;
        const bool can_back = x > 0;
        bool forward = can_fwd && (!can_back || rng.bernoulli(p_.forward_fraction));
        SegmentId lo, hi;
        if (forward) {
            lo = x + 1;
            hi = static_cast<SegmentId>(std::min<std::uint64_t>(n_ - 1, std::uint64_t{x} + w));
        } else {
            lo = x > w ? x - w : 0;
            hi = x - 1;
        }
        std::vector<double> ws(weight_.begin() + lo, weight_.begin() + hi + 1);
        out = lo + static_cast<SegmentId>(rng.weighted_index(ws));
        return true;
    }

private:
    const WorkloadParams& p_;
    std::uint32_t n_;
    std::vector<double> weight_;
};

ViewerTrace make_trace(PeerId peer, SimTime arrival, const WorkloadParams& p, const Video& v,
                       const TargetPicker& picker)
{
    Rng rng = Rng::named(p.seed, "viewer/" + std::to_string(peer));
    ViewerTrace tr{peer, arrival, {}};
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double video_len = v.total_duration();

    const bool short_session = rng.bernoulli(p.short_session_fraction);
    const double leave_at =
        short_session ? arrival + rng.uniform(p.short_session_min_s, p.short_session_max_s) : inf;
    auto next_gap = [&](double rate) { return rate > 0.0 ? rng.exponential(rate) : inf; };

    SimTime t = arrival;
    double pos = 0.0;  // seconds into the video
    SimTime next_seek = t + next_gap(p.seek_rate);
    SimTime next_pause = t + next_gap(p.pause_rate);

    while (true) {
        const SimTime finish = t + (video_len - pos);
        const SimTime e = std::min({next_seek, next_pause, leave_at, finish});
        if (e >= p.horizon_s || e == finish) {
            break;
        }
        pos += e - t;
        t = e;
        if (e == leave_at) {
            tr.events.push_back({quantize(t), ViewerEventKind::Leave, 0});
            break;
        }
        if (e == next_seek) {
            const auto x = static_cast<SegmentId>(std::min<double>(std::floor(pos / v.segment_duration),
                                                                   v.segment_count - 1));
            SegmentId target;
            if (picker.pick(x, rng, target)) {
                tr.events.push_back({quantize(t), ViewerEventKind::Seek, target});
                pos = target * v.segment_duration;
            }
            next_seek = t + next_gap(p.seek_rate);
            continue;
        }
        // pause
        tr.events.push_back({quantize(t), ViewerEventKind::Pause, 0});
        const SimTime resume = t + rng.uniform(p.pause_min_s, p.pause_max_s);
        if (leave_at <= resume) {
            if (leave_at < p.horizon_s) tr.events.push_back({quantize(leave_at), ViewerEventKind::Leave, 0});
            break;
        }
        if (resume >= p.horizon_s) {
            break;
        }
        tr.events.push_back({quantize(resume), ViewerEventKind::Resume, 0});
        t = resume;
        next_seek = t + next_gap(p.seek_rate);
        next_pause = t + next_gap(p.pause_rate);
    }
    return tr;
}

}  // namespace

std::vector<ViewerTrace> generate_traces(const WorkloadParams& params, const Video& video)
{
    params.validate();
    video.validate();
    const TargetPicker picker(params, video);
    Rng arrivals = Rng::named(params.seed, "arrivals");
    std::vector<ViewerTrace> out;
    out.reserve(params.peer_count);
    SimTime t = 0.0;
    for (PeerId i = 0; i < params.peer_count; ++i) {
        t += arrivals.exponential(params.arrival_rate);
        out.push_back(make_trace(i, quantize(t), params, video, picker));
    }
    return out;
}

void write_traces(std::ostream& out, const std::vector<ViewerTrace>& traces)
{
    char buf[96];
    for (const ViewerTrace& tr : traces) {
        std::snprintf(buf, sizeof buf, "%u %.6f", tr.peer, tr.arrival);
        out << buf;
        for (const ViewerEvent& e : tr.events) {
            std::snprintf(buf, sizeof buf, "; %.6f %s", e.time, std::string(to_string(e.kind)).c_str());
            out << buf;
            if (e.kind == ViewerEventKind::Seek) out << ' ' << e.target;
        }
        out << '\n';
    }
}

std::string format_traces(const std::vector<ViewerTrace>& traces)
{
    std::ostringstream os;
    write_traces(os, traces);
    return os.str();
}

std::vector<ViewerTrace> read_traces(std::istream& in)
{
    std::vector<ViewerTrace> out;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& why) {
        throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            const std::size_t semi = line.find(';', start);
            parts.push_back(line.substr(start, semi - start));
            if (semi == std::string::npos) break;
            start = semi + 1;
        }
        ViewerTrace tr;
        {
            std::istringstream hs(parts[0]);
            if (!(hs >> tr.peer >> tr.arrival)) fail("expected `peer arrival`");
        }
        for (std::size_t i = 1; i < parts.size(); ++i) {
            std::istringstream es(parts[i]);
            ViewerEvent e;
            std::string kind;
            if (!(es >> e.time >> kind)) fail("expected `t KIND`");
            if (kind == "SEEK") {
                e.kind = ViewerEventKind::Seek;
                if (!(es >> e.target)) fail("SEEK needs a target");
            } else if (kind == "PAUSE") {
                e.kind = ViewerEventKind::Pause;
            } else if (kind == "RESUME") {
                e.kind = ViewerEventKind::Resume;
            } else if (kind == "LEAVE") {
                e.kind = ViewerEventKind::Leave;
            } else {
                fail("unknown event kind `" + kind + "`");
            }
            tr.events.push_back(e);
        }
        if (!tr.well_formed()) fail("events are not strictly increasing or LEAVE is not last");
        out.push_back(std::move(tr));
    }
    return out;
}

std::vector<ViewerTrace> parse_traces(const std::string& text)
{
    std::istringstream is(text);
    return read_traces(is);
}

}  // namespace vodsim
