#include "vodsim/compare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace vodsim {

const MetricsReport* Comparison::find(StrategyKind s, std::size_t seed_index) const
{
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        if (strategies[i] == s) return &reports.at(i * seeds.size() + seed_index);
    }
    return nullptr;
}

bool Comparison::all_pass() const
{
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

MetricStat summarize(const std::vector<double>& values)
{
    MetricStat m;
    m.n = values.size();
    if (values.empty()) return m;
    for (double v : values) m.mean += v;
    m.mean /= values.size();
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.sd = std::sqrt(ss / (values.size() - 1));
    }
    return m;
}

std::optional<double> early_decile_latency(const MetricsReport& report)
{
    std::vector<PeerTiming> t = report.timings;
    if (t.empty()) return std::nullopt;
    std::sort(t.begin(), t.end(), [](const PeerTiming& a, const PeerTiming& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        return a.peer < b.peer;
    });
    const std::size_t k = std::max<std::size_t>(1, (t.size() + 9) / 10);
    double sum = 0.0;
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < k; ++i) {
        sum += t[i].latency_sum;
        n += t[i].latency_count;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

std::optional<double> pooled_latency(const MetricsReport& report)
{
    double sum = 0.0;
    std::uint64_t n = 0;
    for (const PeerTiming& t : report.timings) {
        sum += t.latency_sum;
        n += t.latency_count;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

namespace {

using Pick = std::function<std::optional<double>(const MetricsReport&)>;

std::string num(std::optional<double> v)
{
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

std::optional<double> mean_over_seeds(const Comparison& c, StrategyKind s, const Pick& pick)
{
    std::vector<double> v;
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
        if (auto x = pick(*c.find(s, i))) v.push_back(*x);
    }
    if (v.empty()) return std::nullopt;
    return summarize(v).mean;
}

bool present(const Comparison& c, StrategyKind s)
{
    return std::find(c.strategies.begin(), c.strategies.end(), s) != c.strategies.end();
}

std::size_t seeds_needed(std::size_t seeds) { return (4 * seeds + 4) / 5; }

}  // namespace

std::vector<Verdict> evaluate_verdicts(const Comparison& c)
{
    using K = StrategyKind;
    std::vector<Verdict> out;
    const Pick hr_r = [](const MetricsReport& r) { return r.summary.hr_r; };
    const Pick hr_g = [](const MetricsReport& r) { return r.summary.hr_g; };
    const Pick lat = [](const MetricsReport& r) { return r.summary.lat_mean_s; };
    const Pick ug = [](const MetricsReport& r) { return r.summary.util_glob; };
    const Pick ur = [](const MetricsReport& r) { return r.summary.util_rel; };
    const std::size_t nseeds = c.seeds.size();

    // Relative hit ratio chain: cooperative >= mining >= popularity > random > none = 0.
    {
        const std::vector<std::pair<K, bool>> chain = {
            {K::Cooperative, false}, {K::Mining, false}, {K::Popularity, false}, {K::Random, true}, {K::None, true}};
        std::vector<std::pair<K, bool>> here;  // strategy, strict relation to the previous present one
        bool strict = false;
        for (const auto& [k, s] : chain) {
            strict = strict || s;
            if (present(c, k)) {
                here.emplace_back(k, strict);
                strict = false;
            }
        }
        if (here.size() >= 2 || (here.size() == 1 && here[0].first == K::None)) {
            std::size_t ok = 0;
            std::string detail;
            for (std::size_t i = 0; i < nseeds; ++i) {
                bool good = true;
                for (std::size_t j = 0; j < here.size(); ++j) {
                    const auto v = hr_r(*c.find(here[j].first, i));
                    if (!v) good = false;
                    if (here[j].first == K::None && v && *v != 0.0) good = false;
                    if (j == 0 || !v) continue;
                    const auto prev = hr_r(*c.find(here[j - 1].first, i));
                    if (!prev) continue;
                    if (here[j].second ? !(*prev > *v) : !(*prev >= *v)) good = false;
                }
                ok += good;
            }
            std::string name = "hr_r ordering";
            for (std::size_t j = 0; j < here.size(); ++j) {
                name += (j == 0 ? " " : (here[j].second ? " > " : " >= ")) + std::string(to_string(here[j].first));
            }
            if (present(c, K::None)) name += " = 0";
            for (const auto& [k, s] : here) {
                detail += std::string(to_string(k)) + "=" + num(mean_over_seeds(c, k, hr_r)) + " ";
            }
            detail += "(held on " + std::to_string(ok) + "/" + std::to_string(nseeds) + " seeds, need " +
                      std::to_string(seeds_needed(nseeds)) + ")";
            out.push_back({name, ok >= seeds_needed(nseeds), detail});
        }
    }

    if (present(c, K::Cooperative) && c.strategies.size() >= 2) {
        // Global hit ratio: cooperative strictly greatest.
        std::size_t ok = 0;
        for (std::size_t i = 0; i < nseeds; ++i) {
            const auto coop = hr_g(*c.find(K::Cooperative, i));
            bool good = coop.has_value();
            for (K k : c.strategies) {
                if (k == K::Cooperative || !good) continue;
                const auto v = hr_g(*c.find(k, i));
                if (v && !(*coop > *v)) good = false;
            }
            ok += good;
        }
        std::string detail;
        for (K k : c.strategies) detail += std::string(to_string(k)) + "=" + num(mean_over_seeds(c, k, hr_g)) + " ";
        detail += "(held on " + std::to_string(ok) + "/" + std::to_string(nseeds) + " seeds, need " +
                  std::to_string(seeds_needed(nseeds)) + ")";
        out.push_back({"hr_g (exclusive) cooperative strictly greatest, reported only", true,
                       detail + (ok >= seeds_needed(nseeds) ? " holds" : " does not hold")});

        // Overall hit ratio of the session, hr_r + hr_g: cooperative strictly greatest.
        const Pick both = [](const MetricsReport& r) { return r.hr_combined(); };
        std::size_t okc = 0;
        for (std::size_t i = 0; i < nseeds; ++i) {
            const auto coop = both(*c.find(K::Cooperative, i));
            bool good = coop.has_value();
            for (K k : c.strategies) {
                if (k == K::Cooperative || !good) continue;
                const auto v = both(*c.find(k, i));
                if (v && !(*coop > *v)) good = false;
            }
            okc += good;
        }
        std::string cdetail;
        for (K k : c.strategies) cdetail += std::string(to_string(k)) + "=" + num(mean_over_seeds(c, k, both)) + " ";
        cdetail += "(held on " + std::to_string(okc) + "/" + std::to_string(nseeds) + " seeds, need " +
                   std::to_string(seeds_needed(nseeds)) + ")";
        out.push_back({"hr_r+hr_g cooperative strictly greatest", okc >= seeds_needed(nseeds), cdetail});

        // Seek latency: cooperative mean strictly lowest.
        const auto coop_lat = mean_over_seeds(c, K::Cooperative, lat);
        bool good = coop_lat.has_value();
        std::string ldetail;
        for (K k : c.strategies) {
            const auto v = mean_over_seeds(c, k, lat);
            ldetail += std::string(to_string(k)) + "=" + num(v) + " ";
            if (k != K::Cooperative && v && good && !(*coop_lat < *v)) good = false;
        }
        out.push_back({"latency cooperative strictly lowest", good, ldetail});

        // Global utilization: cooperative maximum.
        const auto coop_ug = mean_over_seeds(c, K::Cooperative, ug);
        bool ugood = coop_ug.has_value();
        std::string udetail;
        for (K k : c.strategies) {
            const auto v = mean_over_seeds(c, k, ug);
            udetail += std::string(to_string(k)) + "=" + num(v) + " ";
            if (k != K::Cooperative && v && ugood && *v > *coop_ug) ugood = false;
        }
        out.push_back({"util_glob cooperative maximum", ugood, udetail});
    }

    if (present(c, K::Cooperative)) {
        std::vector<double> early, all;
        for (std::size_t i = 0; i < nseeds; ++i) {
            const MetricsReport& r = *c.find(K::Cooperative, i);
            if (auto e = early_decile_latency(r)) early.push_back(*e);
            if (auto a = pooled_latency(r)) all.push_back(*a);
        }
        const bool good = !early.empty() && !all.empty() && summarize(early).mean > summarize(all).mean;
        out.push_back({"latency cooperative early decile above cooperative mean", good,
                       "early=" + num(early.empty() ? std::nullopt : std::optional(summarize(early).mean)) +
                           " overall=" + num(all.empty() ? std::nullopt : std::optional(summarize(all).mean))});
    }

    if (present(c, K::Cooperative) && present(c, K::Mining)) {
        const auto a = mean_over_seeds(c, K::Cooperative, ur);
        const auto b = mean_over_seeds(c, K::Mining, ur);
        const char* rel = (a && b) ? (*a <= *b ? "<=" : ">") : "?";
        out.push_back({"util_rel cooperative vs mining (either order accepted)", true,
                       "cooperative=" + num(a) + " " + rel + " mining=" + num(b)});
    }

    for (K k : {K::None, K::Random}) {
        if (!present(c, k)) continue;
        bool good = true;
        for (std::size_t i = 0; i < nseeds; ++i) good = good && c.find(k, i)->summary.overhead_msgs == 0;
        out.push_back({"overhead " + std::string(to_string(k)) + " = 0", good,
                       "mean=" + num(mean_over_seeds(c, k, [](const MetricsReport& r) {
                           return std::optional<double>(r.summary.overhead_msgs);
                       }))});
    }

    if (present(c, K::Cooperative)) {
        for (K k : {K::Popularity, K::Mining}) {
            if (!present(c, k)) continue;
            std::size_t ok = 0;
            for (std::size_t i = 0; i < nseeds; ++i) {
                ok += c.find(K::Cooperative, i)->summary.overhead_msgs < c.find(k, i)->summary.overhead_msgs;
            }
            const Pick oh = [](const MetricsReport& r) { return std::optional<double>(r.summary.overhead_msgs); };
            out.push_back({"overhead cooperative < " + std::string(to_string(k)) + " every seed", ok == nseeds,
                           "cooperative=" + num(mean_over_seeds(c, K::Cooperative, oh)) + " " +
                               std::string(to_string(k)) + "=" + num(mean_over_seeds(c, k, oh)) + " (" +
                               std::to_string(ok) + "/" + std::to_string(nseeds) + " seeds)"});
        }
    }
    return out;
}

Comparison compare_strategies(const RunConfig& base, const std::vector<StrategyKind>& strategies, unsigned repeats,
                              unsigned parallelism)
{
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    if (strategies.empty()) throw std::invalid_argument("no strategies to compare");
    Comparison c;
    c.strategies = strategies;
    for (unsigned r = 0; r < repeats; ++r) c.seeds.push_back(base.seed + r);

    std::vector<RunConfig> configs;
    for (StrategyKind s : strategies) {
        for (std::uint64_t seed : c.seeds) {
            RunConfig cfg = base;
            cfg.strategy = s;
            cfg.seed = seed;
            configs.push_back(std::move(cfg));
        }
    }
    c.reports = sweep(configs, parallelism);

    for (std::size_t si = 0; si < strategies.size(); ++si) {
        StrategyRow row;
        row.strategy = std::string(to_string(strategies[si]));
        row.runs = c.seeds.size();
        std::map<std::string, std::vector<double>> v;
        for (std::size_t i = 0; i < c.seeds.size(); ++i) {
            const MetricsReport& r = c.reports[si * c.seeds.size() + i];
            auto put = [&](const char* k, std::optional<double> x) {
                if (x) v[k].push_back(*x);
            };
            put("hr_r", r.summary.hr_r);
            put("hr_g", r.summary.hr_g);
            put("hr_c", r.hr_combined());
            put("lat", r.summary.lat_mean_s);
            put("p95", r.summary.lat_p95_s);
            put("ur", r.summary.util_rel);
            put("ug", r.summary.util_glob);
            put("oh", static_cast<double>(r.summary.overhead_msgs));
        }
        row.hr_r = summarize(v["hr_r"]);
        row.hr_g = summarize(v["hr_g"]);
        row.hr_combined = summarize(v["hr_c"]);
        row.lat_mean = summarize(v["lat"]);
        row.lat_p95 = summarize(v["p95"]);
        row.util_rel = summarize(v["ur"]);
        row.util_glob = summarize(v["ug"]);
        row.overhead = summarize(v["oh"]);
        c.rows.push_back(row);
    }
    c.verdicts = evaluate_verdicts(c);
    return c;
}

namespace {

std::string stat_fields(const MetricStat& m)
{
    if (m.n == 0) return ",";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", m.mean, m.sd);
    return buf;
}

std::string stat_cell(const MetricStat& m)
{
    if (m.n == 0) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f±%.4f", m.mean, m.sd);
    return buf;
}

}  // namespace

std::string comparison_csv(const Comparison& c)
{
    std::string out =
        "strategy,runs,hr_r_mean,hr_r_sd,hr_g_mean,hr_g_sd,hr_r_plus_g_mean,hr_r_plus_g_sd,lat_mean_s_mean,"
        "lat_mean_s_sd,lat_p95_s_mean,lat_p95_s_sd,util_rel_mean,util_rel_sd,util_glob_mean,util_glob_sd,"
        "overhead_msgs_mean,overhead_msgs_sd\n";
    for (const StrategyRow& r : c.rows) {
        out += r.strategy + "," + std::to_string(r.runs) + "," + stat_fields(r.hr_r) + "," + stat_fields(r.hr_g) +
               "," + stat_fields(r.hr_combined) + "," + stat_fields(r.lat_mean) + "," + stat_fields(r.lat_p95) +
               "," + stat_fields(r.util_rel) + "," + stat_fields(r.util_glob) + "," + stat_fields(r.overhead) +
               "\n";
    }
    return out;
}

std::string comparison_table(const Comparison& c)
{
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-12s %-16s %-16s %-16s %-16s %-16s %-16s %-20s\n", "strategy", "hr_r", "hr_g",
                  "hr_r+hr_g", "lat_mean_s", "util_rel", "util_glob", "overhead_msgs");
    out += buf;
    for (const StrategyRow& r : c.rows) {
        std::snprintf(buf, sizeof buf, "%-12s %-16s %-16s %-16s %-16s %-16s %-16s %-20s\n", r.strategy.c_str(),
                      stat_cell(r.hr_r).c_str(), stat_cell(r.hr_g).c_str(), stat_cell(r.hr_combined).c_str(),
                      stat_cell(r.lat_mean).c_str(), stat_cell(r.util_rel).c_str(), stat_cell(r.util_glob).c_str(),
                      stat_cell(r.overhead).c_str());
        out += buf;
    }
    return out;
}

std::string verdicts_text(const std::vector<Verdict>& verdicts)
{
    std::string out;
    for (const Verdict& v : verdicts) {
        out += std::string(v.pass ? "PASS" : "FAIL") + "  " + v.name + "  [" + v.detail + "]\n";
    }
    return out;
}

}  // namespace vodsim
