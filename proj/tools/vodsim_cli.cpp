// Command-line front end: run, sweep, compare, analytics, trace-gen.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vodsim/analytics.hpp"
#include "vodsim/compare.hpp"
#include "vodsim/engine.hpp"
#include "vodsim/metrics.hpp"
#include "vodsim/scenario.hpp"
#include "vodsim/workload.hpp"

namespace fs = std::filesystem;
using namespace vodsim;

namespace {

enum Exit { kOk = 0, kValidation = 1, kRunFailure = 2, kVerdictFailure = 3 };

struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    std::string config;
    std::vector<std::string> strategies;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> peers;
    std::optional<double> duration;
    std::optional<std::string> out_dir;
    std::optional<unsigned> repeats;
    std::optional<unsigned> parallelism;
    std::vector<std::string> settings;

    void attach(CLI::App* app, bool many_strategies)
    {
        app->add_option("--config", config, "scenario file ([video] [topology] [workload] [strategy] [run])");
        if (many_strategies) {
            app->add_option("--strategy", strategies, "strategies to compare (repeatable or comma separated)")
                ->delimiter(',');
        } else {
            app->add_option("--strategy", strategies, "none | random | popularity | mining | cooperative")
                ->expected(1);
        }
        app->add_option("--seed", seed, "root seed");
        app->add_option("--peers", peers, "number of viewers");
        app->add_option("--duration", duration, "simulated seconds");
        app->add_option("--out-dir", out_dir, "output directory");
        app->add_option("--repeats", repeats, "seeds per strategy");
        app->add_option("--parallelism", parallelism, "worker threads");
        app->add_option("--set", settings, "override any scenario key: section.key=value");
    }

    RunOptions resolve(bool finalize_options = true) const
    {
        RunOptions o;
        if (!config.empty()) o = parse_scenario_file(config);
        for (const std::string& s : settings) {
            const auto dot = s.find('.');
            const auto eq = s.find('=');
            if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
                throw ConfigError("--set", "expected section.key=value, got `" + s + "`");
            }
            apply_setting(o, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
        }
        if (strategies.size() == 1) apply_setting(o, "strategy", "name", strategies[0]);
        if (seed) o.config.seed = *seed;
        if (peers) o.config.workload.peer_count = *peers;
        if (duration) o.config.duration_s = *duration;
        if (out_dir) o.out_dir = *out_dir;
        if (repeats) o.repeats = *repeats;
        if (parallelism) o.parallelism = *parallelism;
        if (finalize_options) finalize(o);
        return o;
    }

    std::vector<StrategyKind> strategy_list() const
    {
        if (strategies.empty()) return all_strategies();
        std::vector<StrategyKind> out;
        for (const std::string& s : strategies) {
            const auto k = parse_strategy(s);
            if (!k) throw ConfigError("--strategy", "unknown strategy `" + s + "`");
            out.push_back(*k);
        }
        return out;
    }
};

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

void write_traces_for(const RunConfig& cfg, const fs::path& file)
{
    write_text_file(file, format_traces(workload_traces(cfg)));
}

void print_report(const MetricsReport& r)
{
    std::cout << summary_csv({r.summary});
    std::printf("seeks=%llu request_msgs=%llu server_mbit=%.3f\n", static_cast<unsigned long long>(r.seeks),
                static_cast<unsigned long long>(r.request_msgs), r.server_bits / 1e6);
}

int cmd_run(const CommonFlags& f)
{
    const RunOptions o = f.resolve();
    const MetricsReport r = run(o.config);
    const fs::path dir = o.out_dir;
    export_report(r, dir);
    write_traces_for(o.config, dir / "traces.txt");
    print_report(r);
    return kOk;
}

int cmd_sweep(const CommonFlags& f)
{
    const RunOptions o = f.resolve();
    std::vector<RunConfig> configs;
    for (unsigned i = 0; i < o.repeats; ++i) {
        RunConfig c = o.config;
        c.seed = o.config.seed + i;
        configs.push_back(std::move(c));
    }
    const auto reports = sweep(configs, o.parallelism);
    const fs::path dir = o.out_dir;
    ensure_dir(dir);
    std::vector<SummaryRow> rows;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        rows.push_back(reports[i].summary);
        write_text_file(dir / per_peer_filename(reports[i].summary), per_peer_csv(reports[i].peers));
        write_traces_for(configs[i], dir / (i == 0 ? std::string("traces.txt")
                                                   : "traces_" + std::to_string(configs[i].seed) + ".txt"));
    }
    write_text_file(dir / "summary.csv", summary_csv(rows));
    std::cout << summary_csv(rows);
    return kOk;
}

int cmd_compare(const CommonFlags& f)
{
    const RunOptions o = f.resolve(false);
    RunOptions checked = o;
    finalize(checked);
    const auto strategies = f.strategy_list();
    const Comparison c = compare_strategies(checked.config, strategies, checked.repeats, checked.parallelism);

    const fs::path dir = o.out_dir;
    ensure_dir(dir);
    std::vector<SummaryRow> rows;
    for (const MetricsReport& r : c.reports) {
        rows.push_back(r.summary);
        write_text_file(dir / per_peer_filename(r.summary), per_peer_csv(r.peers));
    }
    write_text_file(dir / "summary.csv", summary_csv(rows));
    write_text_file(dir / "comparison.csv", comparison_csv(c));
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
        RunConfig cfg = checked.config;
        cfg.seed = c.seeds[i];
        write_traces_for(cfg, dir / (i == 0 ? std::string("traces.txt") : "traces_" + std::to_string(cfg.seed) + ".txt"));
    }
    const std::string verdicts = verdicts_text(c.verdicts);
    write_text_file(dir / "verdicts.txt", verdicts);
    std::cout << comparison_table(c) << "\n" << verdicts;
    return c.all_pass() ? kOk : kVerdictFailure;
}

struct AnalyticFlags {
    std::string s = "5", S = "10", V = "20", Vi = "10", Pi = "1";
    bool validate = false;
    double tolerance = 0.03;
};

int cmd_analytics(const CommonFlags& f, const AnalyticFlags& a)
{
    AnalyticParams p;
    try {
        auto whole = [](const std::string& name, const std::string& v) {
            const Rational r = parse_rational(v);
            if (r.denominator() != 1) throw ConfigError(name, "must be a whole number");
            return r.numerator();
        };
        p.s = whole("--s", a.s);
        p.S = whole("--S", a.S);
        p.V = whole("--V", a.V);
        p.V_i = whole("--Vi", a.Vi);
        p.P_i = parse_rational(a.Pi);
        p.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("analytics", e.what());
    }
    std::printf("%-12s %-12s %-12s %s\n", "formula", "hr_r", "hr_r+hr_g", "clamped");
    auto row = [](const char* name, const HitRatios& h) {
        std::printf("%-12s %-12s %-12s %s\n", name, to_decimal(h.hr_r).c_str(), to_decimal(h.hr_r_plus_g).c_str(),
                    h.clamped ? "yes" : "no");
    };
    row("none", hr_none());
    if (p.V > 0) {
        row("random", hr_random(p));
        row("popularity", hr_popularity(p));
    }
    if (p.V_i > 0) row("mining", hr_mining(p));
    if (!a.validate) return kOk;

    const RunOptions o = f.resolve();
    const MetricsReport r = run(o.config);
    const ValidationVerdict v = validate_against_sim(p, r, a.tolerance);
    std::cout << "\nsimulated " << r.summary.strategy << " seed " << r.summary.seed << " (" << r.seeks
              << " seeks)\n"
              << v.render();
    return v.pass ? kOk : kVerdictFailure;
}

int cmd_trace_gen(const CommonFlags& f, const std::string& output)
{
    const RunOptions o = f.resolve();
    fs::path file = output.empty() ? fs::path(o.out_dir) / "traces.txt" : fs::path(output);
    if (file.has_parent_path()) ensure_dir(file.parent_path());
    const auto traces = workload_traces(o.config);
    write_text_file(file, format_traces(traces));
    std::size_t events = 0;
    for (const auto& t : traces) events += t.events.size();
    std::printf("%zu viewers, %zu events -> %s\n", traces.size(), events, file.string().c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Peer-to-peer video-on-demand prefetching simulator"};
    app.require_subcommand(1);

    CommonFlags run_f, sweep_f, cmp_f, ana_f, gen_f;
    auto* run_cmd = app.add_subcommand("run", "one run; writes summary.csv, per-peer CSV, JSON and traces.txt");
    run_f.attach(run_cmd, false);
    auto* sweep_cmd = app.add_subcommand("sweep", "one strategy over --repeats consecutive seeds");
    sweep_f.attach(sweep_cmd, false);
    auto* cmp_cmd = app.add_subcommand("compare", "strategies on paired workloads with ordering verdicts");
    cmp_f.attach(cmp_cmd, true);
    auto* ana_cmd = app.add_subcommand("analytics", "closed-form hit ratios; --validate checks a simulated run");
    ana_f.attach(ana_cmd, false);
    AnalyticFlags af;
    ana_cmd->add_option("--s", af.s, "per-peer prefetch capacity");
    ana_cmd->add_option("--S", af.S, "session-wide prefetchable segments");
    ana_cmd->add_option("--V", af.V, "VCR-reachable segments");
    ana_cmd->add_option("--Vi", af.Vi, "mined prefetch set size");
    ana_cmd->add_option("--Pi", af.Pi, "probability the request falls in the prefetch set");
    ana_cmd->add_flag("--validate", af.validate, "run the configured scenario and compare hr_r");
    ana_cmd->add_option("--tolerance", af.tolerance, "allowed |analytic - simulated|");
    auto* gen_cmd = app.add_subcommand("trace-gen", "write the workload traces only");
    gen_f.attach(gen_cmd, false);
    std::string gen_output;
    gen_cmd->add_option("--output", gen_output, "trace file (default <out-dir>/traces.txt)");
    auto* keys_cmd = app.add_subcommand("print-config", "every scenario key with its resolved value");
    CommonFlags keys_f;
    keys_f.attach(keys_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (*run_cmd) return cmd_run(run_f);
        if (*sweep_cmd) return cmd_sweep(sweep_f);
        if (*cmp_cmd) return cmd_compare(cmp_f);
        if (*ana_cmd) return cmd_analytics(ana_f, af);
        if (*gen_cmd) return cmd_trace_gen(gen_f, gen_output);
        if (*keys_cmd) {
            std::cout << format_scenario(keys_f.resolve(false));
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return kRunFailure;
    }
    return kOk;
}
