#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "vodsim/metrics.hpp"
#include "vodsim/strategies.hpp"

namespace vodsim {

using Rational = boost::rational<std::int64_t>;

/// Exact value of a decimal literal such as "0.8" or "3".
Rational parse_rational(const std::string& text);
double to_double(const Rational& r);
std::string to_decimal(const Rational& r, int digits = 6);

struct AnalyticParams {
    std::int64_t s = 0;      // per-peer prefetch capacity (segments)
    std::int64_t S = 0;      // distinct segments the session can prefetch
    std::int64_t V = 0;      // size of the VCR-reachable segment set
    std::int64_t V_i = 0;    // size of peer i's mined prefetch set
    Rational P_i{1};         // chance the request falls in V_i

    /// Throws std::domain_error on a negative size or P_i outside [0, 1].
    void validate() const;
};

struct HitRatios {
    Rational hr_r;
    Rational hr_r_plus_g;
    bool clamped = false;  // a raw value fell outside [0, 1]
};

HitRatios hr_mining(const AnalyticParams& p);      // P_i s / V_i,  P_i S / V_i
HitRatios hr_none();                               // 0, 0
HitRatios hr_random(const AnalyticParams& p);      // s / V,  S / V
HitRatios hr_popularity(const AnalyticParams& p);  // P_i s / V,  P_i S / V

/// Closed form used for `strategy`; cooperative has none.
HitRatios analytic_ratios(StrategyKind strategy, const AnalyticParams& p);

struct ValidationRow {
    std::string quantity;
    double analytic = 0.0;
    double simulated = 0.0;
    double difference = 0.0;
    bool pass = false;
};

struct ValidationVerdict {
    std::vector<ValidationRow> rows;
    bool pass = false;
    std::string render() const;
};

/// Compares the closed form for the report's strategy with the simulated
/// hit ratio. Throws std::invalid_argument when the report cannot be
/// matched to a formula (unknown strategy, cooperative, no seeks).
ValidationVerdict validate_against_sim(const AnalyticParams& params, const MetricsReport& report, double tolerance);

}  // namespace vodsim
