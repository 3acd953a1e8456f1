#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vodsim/engine.hpp"
#include "vodsim/metrics.hpp"

namespace vodsim {

struct MetricStat {
    double mean = 0.0;
    double sd = 0.0;   // sample standard deviation; 0 with one value
    std::size_t n = 0;  // runs where the metric was defined
};

struct StrategyRow {
    std::string strategy;
    std::size_t runs = 0;
    MetricStat hr_r, hr_g, hr_combined, lat_mean, lat_p95, util_rel, util_glob, overhead;
};

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Comparison {
    std::vector<StrategyKind> strategies;
    std::vector<std::uint64_t> seeds;
    std::vector<MetricsReport> reports;  // strategy-major, then seed
    std::vector<StrategyRow> rows;
    std::vector<Verdict> verdicts;

    const MetricsReport* find(StrategyKind s, std::size_t seed_index) const;
    bool all_pass() const;
};

MetricStat summarize(const std::vector<double>& values);

/// Mean seek latency of the earliest-arriving tenth of the peers (at least
/// one peer), pooled over their seeks. Absent when they made no seeks.
std::optional<double> early_decile_latency(const MetricsReport& report);
/// Mean over every delivered seek of the run.
std::optional<double> pooled_latency(const MetricsReport& report);

/// Runs each strategy on seeds base.seed .. base.seed + repeats - 1. Every
/// strategy sees the same traces for a given seed. Verdicts are evaluated
/// for the orderings whose strategies are all present.
Comparison compare_strategies(const RunConfig& base, const std::vector<StrategyKind>& strategies, unsigned repeats,
                              unsigned parallelism);

std::vector<Verdict> evaluate_verdicts(const Comparison& c);

std::string comparison_csv(const Comparison& c);
std::string comparison_table(const Comparison& c);
std::string verdicts_text(const std::vector<Verdict>& verdicts);

}  // namespace vodsim
