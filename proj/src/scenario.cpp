#include "vodsim/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace vodsim {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& name, const std::string& raw)
{
    const std::string v = trim(raw);
    T out{};
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size()) {
        throw ConfigError(name, "cannot parse `" + raw + "` as a number");
    }
    return out;
}

bool parse_bool(const std::string& name, const std::string& raw)
{
    const std::string v = trim(raw);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(name, "expected true or false, got `" + raw + "`");
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Setter = std::function<void(RunOptions&, const std::string& name, const std::string& value)>;
using Getter = std::function<std::string(const RunOptions&)>;

struct Field {
    ScenarioKey key;
    Setter set;
    Getter get;
};

template <class T, class Access>
Field number(std::string section, std::string key, std::string help, Access access)
{
    return {{section, key, help},
            [access](RunOptions& o, const std::string& n, const std::string& v) {
                access(o) = parse_number<T>(n, v);
            },
            [access](const RunOptions& o) {
                const T v = access(const_cast<RunOptions&>(o));
                if constexpr (std::is_floating_point_v<T>) return fmt(v);
                else return std::to_string(v);
            }};
}

template <class Access>
Field flag(std::string section, std::string key, std::string help, Access access)
{
    return {{section, key, help},
            [access](RunOptions& o, const std::string& n, const std::string& v) { access(o) = parse_bool(n, v); },
            [access](const RunOptions& o) {
                return std::string(access(const_cast<RunOptions&>(o)) ? "true" : "false");
            }};
}

#define FIELD(expr) [](RunOptions& o) -> auto& { return expr; }

const std::vector<Field>& fields()
{
    static const std::vector<Field> all = [] {
        std::vector<Field> f;
        f.push_back(number<std::uint32_t>("video", "segment_count", "segments in the video", FIELD(o.config.video.segment_count)));
        f.push_back(number<double>("video", "segment_duration_s", "playback seconds per segment", FIELD(o.config.video.segment_duration)));
        f.push_back(number<double>("video", "rate", "streaming rate, bits/s", FIELD(o.config.video.streaming_rate)));

        f.push_back(number<std::uint32_t>("topology", "as_count", "autonomous systems", FIELD(o.config.topology.as_count)));
        f.push_back(number<std::uint32_t>("topology", "routers_per_as", "routers per AS", FIELD(o.config.topology.routers_per_as)));
        f.push_back(number<double>("topology", "access_delay_min_ms", "access link delay, lower bound", FIELD(o.config.topology.access_delay_min_ms)));
        f.push_back(number<double>("topology", "access_delay_max_ms", "access link delay, upper bound", FIELD(o.config.topology.access_delay_max_ms)));
        f.push_back(number<double>("topology", "core_delay_min_ms", "router link delay, lower bound", FIELD(o.config.topology.core_delay_min_ms)));
        f.push_back(number<double>("topology", "core_delay_max_ms", "router link delay, upper bound", FIELD(o.config.topology.core_delay_max_ms)));
        f.push_back(number<double>("topology", "peer_up", "peer uplink, bits/s", FIELD(o.config.topology.peer_up_bps)));
        f.push_back(number<double>("topology", "peer_down", "peer downlink, bits/s", FIELD(o.config.topology.peer_down_bps)));
        f.push_back(number<double>("topology", "server_up", "server uplink, bits/s", FIELD(o.config.topology.server_up_bps)));
        f.push_back(number<double>("topology", "server_down", "server downlink, bits/s", FIELD(o.config.topology.server_down_bps)));

        f.push_back(number<std::uint32_t>("workload", "peers", "number of viewers", FIELD(o.config.workload.peer_count)));
        f.push_back(number<double>("workload", "arrival_rate", "Poisson arrivals per second", FIELD(o.config.workload.arrival_rate)));
        f.push_back(number<double>("workload", "seek_rate", "seeks per viewer-second", FIELD(o.config.workload.seek_rate)));
        f.push_back({{"workload", "seek_distribution", "uniform or zipf"},
                     [](RunOptions& o, const std::string& n, const std::string& raw) {
                         const std::string v = trim(raw);
                         if (v == "uniform") o.config.workload.seek_distribution = SeekDistribution::Uniform;
                         else if (v == "zipf") o.config.workload.seek_distribution = SeekDistribution::Zipf;
                         else throw ConfigError(n, "expected uniform or zipf, got `" + raw + "`");
                     },
                     [](const RunOptions& o) {
                         return std::string(o.config.workload.seek_distribution == SeekDistribution::Uniform ? "uniform"
                                                                                                              : "zipf");
                     }});
        f.push_back(number<double>("workload", "zipf_alpha", "Zipf exponent over segment ranks", FIELD(o.config.workload.zipf_alpha)));
        f.push_back(number<std::uint32_t>("workload", "seek_window", "max seek distance in segments, 0 = unbounded", FIELD(o.config.workload.seek_window)));
        f.push_back(number<double>("workload", "forward_fraction", "share of forward seeks", FIELD(o.config.workload.forward_fraction)));
        f.push_back(number<double>("workload", "short_session_fraction", "viewers that leave early", FIELD(o.config.workload.short_session_fraction)));
        f.push_back(number<double>("workload", "short_session_min_s", "early leave, lower bound", FIELD(o.config.workload.short_session_min_s)));
        f.push_back(number<double>("workload", "short_session_max_s", "early leave, upper bound", FIELD(o.config.workload.short_session_max_s)));
        f.push_back(number<double>("workload", "pause_rate", "pauses per viewer-second", FIELD(o.config.workload.pause_rate)));
        f.push_back(number<double>("workload", "pause_min_s", "pause length, lower bound", FIELD(o.config.workload.pause_min_s)));
        f.push_back(number<double>("workload", "pause_max_s", "pause length, upper bound", FIELD(o.config.workload.pause_max_s)));
        f.push_back({{"workload", "traces", "scripted trace file; replaces generation"},
                     [](RunOptions& o, const std::string&, const std::string& v) { o.traces_path = trim(v); },
                     [](const RunOptions& o) { return o.traces_path; }});

        f.push_back({{"strategy", "name", "none | random | popularity | mining | cooperative"},
                     [](RunOptions& o, const std::string& n, const std::string& raw) {
                         const auto k = parse_strategy(trim(raw));
                         if (!k) throw ConfigError(n, "unknown strategy `" + raw + "`");
                         o.config.strategy = *k;
                     },
                     [](const RunOptions& o) { return std::string(to_string(o.config.strategy)); }});
        f.push_back(number<std::size_t>("strategy", "cache_capacity", "segments per peer cache", FIELD(o.config.params.cache_capacity)));
        f.push_back(number<double>("strategy", "cache_ttl_s", "unplayed prefetch lifetime", FIELD(o.config.params.cache_ttl_s)));
        f.push_back({{"strategy", "eviction", "consumed_first or prefetch_first"},
                     [](RunOptions& o, const std::string& n, const std::string& raw) {
                         const std::string v = trim(raw);
                         if (v == "consumed_first") o.config.params.eviction = EvictionOrder::ConsumedFirst;
                         else if (v == "prefetch_first") o.config.params.eviction = EvictionOrder::PrefetchFirst;
                         else throw ConfigError(n, "expected consumed_first or prefetch_first, got `" + raw + "`");
                     },
                     [](const RunOptions& o) {
                         return std::string(o.config.params.eviction == EvictionOrder::ConsumedFirst ? "consumed_first"
                                                                                                     : "prefetch_first");
                     }});
        f.push_back(flag("strategy", "retain_played", "keep played segments cached", FIELD(o.config.params.retain_played)));
        f.push_back(number<std::uint32_t>("strategy", "urgent_window_s", "segments streamed ahead of the playhead", FIELD(o.config.params.urgent_window)));
        f.push_back(number<std::size_t>("strategy", "prefetch_budget", "prefetch requests per planning round", FIELD(o.config.params.prefetch_budget)));
        f.push_back(number<double>("strategy", "plan_period_s", "seconds between planning rounds", FIELD(o.config.params.plan_period_s)));
        f.push_back(number<double>("strategy", "gossip_period_s", "seconds between buffer-map broadcasts", FIELD(o.config.params.gossip_period_s)));
        f.push_back(number<double>("strategy", "stale_periods", "gossip periods before a state row is dropped", FIELD(o.config.params.stale_periods)));
        f.push_back(number<std::uint32_t>("strategy", "coop_horizon", "segments ahead scanned by cooperative planning", FIELD(o.config.params.coop_horizon)));
        f.push_back(number<std::uint32_t>("strategy", "mining_window", "co-occurrence window in plays", FIELD(o.config.params.mining_window)));
        f.push_back(number<double>("strategy", "mining_support", "minimum rule support per history seen", FIELD(o.config.params.mining_support)));
        f.push_back(number<std::size_t>("strategy", "mining_neighbors", "history exchanges per planning round", FIELD(o.config.params.mining_neighbors)));
        f.push_back(number<double>("strategy", "tracker_period_s", "seconds between popularity reports", FIELD(o.config.params.tracker_period_s)));
        f.push_back(number<std::size_t>("strategy", "popularity_length", "entries in the pushed popularity list", FIELD(o.config.params.popularity_length)));
        f.push_back(number<std::size_t>("strategy", "shortcut_count", "shortcut neighbors per peer", FIELD(o.config.params.shortcut_count)));
        f.push_back(number<double>("strategy", "shortcut_refresh_s", "seconds between shortcut refreshes", FIELD(o.config.params.shortcut_refresh_s)));
        f.push_back(number<double>("strategy", "request_timeout_s", "unanswered request timeout", FIELD(o.config.params.request_timeout_s)));
        f.push_back(number<std::uint32_t>("strategy", "history_window", "periods averaged for provider scores", FIELD(o.config.params.history_window)));
        f.push_back(number<double>("strategy", "history_period_s", "length of one scoring period", FIELD(o.config.params.history_period_s)));
        f.push_back(number<std::uint32_t>("strategy", "min_skip", "skipped segments that make a jump a seek", FIELD(o.config.params.min_skip)));

        f.push_back(number<std::uint64_t>("run", "seed", "root seed", FIELD(o.config.seed)));
        f.push_back(number<double>("run", "duration_s", "simulated seconds", FIELD(o.config.duration_s)));
        f.push_back(number<double>("run", "session_width_s", "arrival window per session", FIELD(o.config.session_width_s)));
        f.push_back(flag("run", "check_invariants", "verify invariants after every event", FIELD(o.config.check_invariants)));
        f.push_back(number<unsigned>("run", "repeats", "seeds per strategy in compare/sweep", FIELD(o.repeats)));
        f.push_back(number<unsigned>("run", "parallelism", "worker threads", FIELD(o.parallelism)));
        f.push_back({{"run", "out_dir", "output directory"},
                     [](RunOptions& o, const std::string&, const std::string& v) { o.out_dir = trim(v); },
                     [](const RunOptions& o) { return o.out_dir; }});
        return f;
    }();
    return all;
}

#undef FIELD

}  // namespace

const std::vector<ScenarioKey>& scenario_keys()
{
    static const std::vector<ScenarioKey> keys = [] {
        std::vector<ScenarioKey> k;
        for (const Field& f : fields()) k.push_back(f.key);
        return k;
    }();
    return keys;
}

void apply_setting(RunOptions& options, const std::string& section, const std::string& key, const std::string& value)
{
    const std::string name = section + "." + key;
    for (const Field& f : fields()) {
        if (f.key.section == section && f.key.key == key) {
            f.set(options, name, value);
            return;
        }
    }
    throw ConfigError(name, "unknown key");
}

void apply_scenario_text(RunOptions& options, const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("scenario", "line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ConfigError(section, "key outside of any section");
        if (section != "video" && section != "topology" && section != "workload" && section != "strategy" &&
            section != "run") {
            throw ConfigError(section, "unknown section");
        }
        for (const auto& [key, value] : body) {
            apply_setting(options, section, key, value.data());
        }
    }
}

RunOptions parse_scenario_text(const std::string& text)
{
    RunOptions o;
    apply_scenario_text(o, text);
    return o;
}

RunOptions parse_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

std::string format_scenario(const RunOptions& options)
{
    std::string out;
    std::string section;
    for (const Field& f : fields()) {
        if (f.key.section != section) {
            if (!section.empty()) out += "\n";
            section = f.key.section;
            out += "[" + section + "]\n";
        }
        out += "; " + f.key.help + "\n";
        out += f.key.key + " = " + f.get(options) + "\n";
    }
    return out;
}

void finalize(RunOptions& options)
{
    if (!options.traces_path.empty()) {
        std::ifstream in(options.traces_path);
        if (!in) throw ConfigError("workload.traces", "cannot read " + options.traces_path);
        try {
            options.config.traces = read_traces(in);
        } catch (const std::exception& e) {
            throw ConfigError("workload.traces", e.what());
        }
    }
    if (options.repeats < 1) throw ConfigError("run.repeats", "must be >= 1");
    if (options.parallelism < 1) throw ConfigError("run.parallelism", "must be >= 1");
    options.config.validate();
}

}  // namespace vodsim
