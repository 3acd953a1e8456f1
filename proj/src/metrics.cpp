#include "vodsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vodsim {

std::size_t MetricsLedger::record_seek(PeerId peer, SimTime time, SegmentId target, SeekKind kind)
{
    PeerStats& s = peers_[peer];
    ++s.seeks;
    switch (kind) {
    case SeekKind::RelativeHit: ++s.relative_hits; break;
    case SeekKind::GlobalHit: ++s.global_hits; break;
    case SeekKind::ShortcutFetch: ++s.shortcut_fetches; break;
    case SeekKind::ServerFetch: ++s.server_fetches; break;
    }
    log_.push_back({peer, time, target, kind, std::nullopt});
    return log_.size() - 1;
}

void MetricsLedger::complete_seek(std::size_t index, double latency)
{
    SeekLogEntry& e = log_.at(index);
    if (e.latency) return;
    e.latency = latency;
    PeerStats& s = peers_[e.peer];
    s.seek_latencies.push_back(latency);
    s.stall_time += latency;
}

std::uint64_t MetricsLedger::total_seeks() const
{
    std::uint64_t n = 0;
    for (const auto& [id, s] : peers_) n += s.seeks;
    return n;
}

std::uint64_t MetricsLedger::total_control() const
{
    std::uint64_t n = 0;
    for (const auto& [id, s] : peers_) n += s.control_msgs;
    return n;
}

std::uint64_t MetricsLedger::total_requests() const
{
    std::uint64_t n = 0;
    for (const auto& [id, s] : peers_) n += s.request_msgs;
    return n;
}

std::optional<double> relative_hit_ratio(const MetricsLedger& ledger)
{
    std::uint64_t seeks = 0, hits = 0;
    for (const auto& [id, s] : ledger.peers()) {
        seeks += s.seeks;
        hits += s.relative_hits;
    }
    if (seeks == 0) return std::nullopt;
    return static_cast<double>(hits) / seeks;
}

std::optional<double> global_hit_ratio(const MetricsLedger& ledger)
{
    std::uint64_t seeks = 0, hits = 0;
    for (const auto& [id, s] : ledger.peers()) {
        seeks += s.seeks;
        hits += s.global_hits;
    }
    if (seeks == 0) return std::nullopt;
    return static_cast<double>(hits) / seeks;
}

UtilizationRatios utilization_ratios(const MetricsLedger& ledger)
{
    UtilizationRatios out;
    double sum = 0.0;
    std::size_t peers = 0;
    std::uint64_t played = 0, fetched = 0;
    for (const auto& [id, s] : ledger.peers()) {
        if (s.prefetched_segments == 0) continue;
        sum += static_cast<double>(s.prefetched_played) / s.prefetched_segments;
        ++peers;
        played += s.prefetched_played;
        fetched += s.prefetched_segments;
    }
    if (peers > 0) {
        out.relative = sum / peers;
        out.global = static_cast<double>(played) / fetched;
    }
    return out;
}

namespace {

double round6(double x) { return std::round(x * 1e6) / 1e6; }

std::optional<double> round6(std::optional<double> x)
{
    if (!x) return x;
    return round6(*x);
}

std::string fmt6(std::optional<double> x)
{
    if (!x) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *x);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_opt(const std::string& s)
{
    if (s.empty()) return std::nullopt;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::runtime_error("bad number `" + s + "`");
    return v;
}

std::uint64_t parse_u64(const std::string& s)
{
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size() || s.empty()) throw std::runtime_error("bad count `" + s + "`");
    return v;
}

std::vector<std::string> data_lines(const std::string& text, const char* header)
{
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != header) {
        throw std::runtime_error(std::string("expected CSV header `") + header + "`");
    }
    std::vector<std::string> out;
    while (std::getline(is, line)) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

}  // namespace

std::optional<double> MetricsReport::hr_combined() const
{
    if (!summary.hr_r || !summary.hr_g) return std::nullopt;
    return round6(*summary.hr_r + *summary.hr_g);
}

MetricsReport build_report(std::string strategy, std::uint64_t seed, const MetricsLedger& ledger)
{
    MetricsReport r;
    r.summary.strategy = std::move(strategy);
    r.summary.seed = seed;
    r.summary.hr_r = round6(relative_hit_ratio(ledger));
    r.summary.hr_g = round6(global_hit_ratio(ledger));

    std::vector<double> lat;
    for (const SeekLogEntry& e : ledger.seek_log()) {
        if (e.latency) lat.push_back(*e.latency);
    }
    if (!lat.empty()) {
        std::sort(lat.begin(), lat.end());
        const double mean = std::accumulate(lat.begin(), lat.end(), 0.0) / lat.size();
        const std::size_t n = lat.size();
        const double median = n % 2 ? lat[n / 2] : 0.5 * (lat[n / 2 - 1] + lat[n / 2]);
        const auto rank = static_cast<std::size_t>(std::ceil(0.95 * n));
        r.summary.lat_mean_s = round6(mean);
        r.summary.lat_p95_s = round6(lat[std::max<std::size_t>(rank, 1) - 1]);
        r.lat_median_s = round6(median);
    }
    const UtilizationRatios u = utilization_ratios(ledger);
    r.summary.util_rel = round6(u.relative);
    r.summary.util_glob = round6(u.global);
    r.summary.overhead_msgs = ledger.total_control();

    for (const auto& [id, s] : ledger.peers()) {
        r.peers.push_back({id, s.seeks, s.relative_hits, s.global_hits, s.shortcut_fetches, s.server_fetches,
                           s.prefetched_segments, s.prefetched_played, s.control_msgs});
        PeerTiming t{id, s.arrival, 0.0, s.seek_latencies.size()};
        for (double l : s.seek_latencies) t.latency_sum += l;
        r.timings.push_back(t);
        r.stall_time += s.stall_time;
    }
    r.seeks = ledger.total_seeks();
    r.request_msgs = ledger.total_requests();
    r.server_bits = ledger.server_bits();
    return r;
}

std::string summary_csv(const std::vector<SummaryRow>& rows)
{
    std::string out = std::string(kSummaryHeader) + "\n";
    for (const SummaryRow& r : rows) {
        out += r.strategy + "," + std::to_string(r.seed) + "," + fmt6(r.hr_r) + "," + fmt6(r.hr_g) + "," +
               fmt6(r.lat_mean_s) + "," + fmt6(r.lat_p95_s) + "," + fmt6(r.util_rel) + "," + fmt6(r.util_glob) +
               "," + std::to_string(r.overhead_msgs) + "\n";
    }
    return out;
}

std::string per_peer_csv(const std::vector<PeerRow>& rows)
{
    std::string out = std::string(kPerPeerHeader) + "\n";
    for (const PeerRow& p : rows) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%u,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu\n", p.peer,
                      static_cast<unsigned long long>(p.seeks), static_cast<unsigned long long>(p.rel_hits),
                      static_cast<unsigned long long>(p.glob_hits), static_cast<unsigned long long>(p.shortcut),
                      static_cast<unsigned long long>(p.server), static_cast<unsigned long long>(p.prefetched),
                      static_cast<unsigned long long>(p.played), static_cast<unsigned long long>(p.ctrl_msgs));
        out += buf;
    }
    return out;
}

std::string summary_json(const MetricsReport& report)
{
    const SummaryRow& s = report.summary;
    auto opt = [](std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::ordered_json j;
    j["strategy"] = s.strategy;
    j["seed"] = s.seed;
    j["hr_r"] = opt(s.hr_r);
    j["hr_g"] = opt(s.hr_g);
    j["hr_r_plus_g"] = opt(report.hr_combined());
    j["lat_mean_s"] = opt(s.lat_mean_s);
    j["lat_median_s"] = opt(report.lat_median_s);
    j["lat_p95_s"] = opt(s.lat_p95_s);
    j["util_rel"] = opt(s.util_rel);
    j["util_glob"] = opt(s.util_glob);
    j["overhead_msgs"] = s.overhead_msgs;
    j["request_msgs"] = report.request_msgs;
    j["seeks"] = report.seeks;
    j["server_bits"] = report.server_bits;
    return j.dump(2) + "\n";
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text)
{
    std::vector<SummaryRow> out;
    for (const std::string& line : data_lines(text, kSummaryHeader)) {
        const auto f = split_csv(line);
        if (f.size() != 9) throw std::runtime_error("summary row needs 9 fields: " + line);
        SummaryRow r;
        r.strategy = f[0];
        r.seed = parse_u64(f[1]);
        r.hr_r = parse_opt(f[2]);
        r.hr_g = parse_opt(f[3]);
        r.lat_mean_s = parse_opt(f[4]);
        r.lat_p95_s = parse_opt(f[5]);
        r.util_rel = parse_opt(f[6]);
        r.util_glob = parse_opt(f[7]);
        r.overhead_msgs = parse_u64(f[8]);
        out.push_back(r);
    }
    return out;
}

std::vector<PeerRow> parse_per_peer_csv(const std::string& text)
{
    std::vector<PeerRow> out;
    for (const std::string& line : data_lines(text, kPerPeerHeader)) {
        const auto f = split_csv(line);
        if (f.size() != 9) throw std::runtime_error("per-peer row needs 9 fields: " + line);
        PeerRow p;
        p.peer = static_cast<PeerId>(parse_u64(f[0]));
        p.seeks = parse_u64(f[1]);
        p.rel_hits = parse_u64(f[2]);
        p.glob_hits = parse_u64(f[3]);
        p.shortcut = parse_u64(f[4]);
        p.server = parse_u64(f[5]);
        p.prefetched = parse_u64(f[6]);
        p.played = parse_u64(f[7]);
        p.ctrl_msgs = parse_u64(f[8]);
        out.push_back(p);
    }
    return out;
}

std::string per_peer_filename(const SummaryRow& row)
{
    return "per_peer_" + row.strategy + "_" + std::to_string(row.seed) + ".csv";
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void export_report(const MetricsReport& report, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    }
    write_text_file(dir / "summary.csv", summary_csv({report.summary}));
    write_text_file(dir / per_peer_filename(report.summary), per_peer_csv(report.peers));
    write_text_file(dir / ("summary_" + report.summary.strategy + "_" + std::to_string(report.summary.seed) + ".json"),
                    summary_json(report));
}

MetricsReport read_report(const std::filesystem::path& dir, const std::string& strategy, std::uint64_t seed)
{
    MetricsReport r;
    const auto rows = parse_summary_csv(read_text_file(dir / "summary.csv"));
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const SummaryRow& row) { return row.strategy == strategy && row.seed == seed; });
    if (it == rows.end()) {
        throw std::runtime_error("no summary row for " + strategy + "/" + std::to_string(seed) + " in " +
                                 (dir / "summary.csv").string());
    }
    r.summary = *it;
    r.peers = parse_per_peer_csv(read_text_file(dir / per_peer_filename(r.summary)));
    return r;
}

}  // namespace vodsim
