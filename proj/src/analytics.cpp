#include "vodsim/analytics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vodsim {

Rational parse_rational(const std::string& text)
{
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) neg = text[i++] == '-';
    std::int64_t num = 0, den = 1;
    bool digits = false, dot = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.' && !dot) {
            dot = true;
            continue;
        }
        if (c < '0' || c > '9') throw std::invalid_argument("not a decimal number: `" + text + "`");
        if (num > (INT64_MAX - 9) / 10 || (dot && den > INT64_MAX / 10)) {
            throw std::invalid_argument("too many digits: `" + text + "`");
        }
        num = num * 10 + (c - '0');
        if (dot) den *= 10;
        digits = true;
    }
    if (!digits) throw std::invalid_argument("not a decimal number: `" + text + "`");
    return Rational(neg ? -num : num, den);
}

double to_double(const Rational& r) { return static_cast<double>(r.numerator()) / r.denominator(); }

std::string to_decimal(const Rational& r, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, to_double(r));
    return buf;
}

void AnalyticParams::validate() const
{
    if (s < 0 || S < 0 || V < 0 || V_i < 0) throw std::domain_error("sizes must be >= 0");
    if (P_i < Rational(0) || P_i > Rational(1)) throw std::domain_error("P_i must lie in [0, 1]");
}

namespace {

HitRatios finish(Rational r, Rational g)
{
    HitRatios out;
    const Rational zero(0), one(1);
    auto clamp = [&](Rational& x) {
        if (x < zero) {
            x = zero;
            out.clamped = true;
        } else if (x > one) {
            x = one;
            out.clamped = true;
        }
    };
    clamp(r);
    clamp(g);
    out.hr_r = r;
    out.hr_r_plus_g = g;
    return out;
}

}  // namespace

HitRatios hr_mining(const AnalyticParams& p)
{
    p.validate();
    if (p.V_i == 0) throw std::domain_error("V_i must be > 0");
    return finish(p.P_i * Rational(p.s, p.V_i), p.P_i * Rational(p.S, p.V_i));
}

HitRatios hr_none() { return finish(Rational(0), Rational(0)); }

HitRatios hr_random(const AnalyticParams& p)
{
    p.validate();
    if (p.V == 0) throw std::domain_error("V must be > 0");
    return finish(Rational(p.s, p.V), Rational(p.S, p.V));
}

HitRatios hr_popularity(const AnalyticParams& p)
{
    p.validate();
    if (p.V == 0) throw std::domain_error("V must be > 0");
    return finish(p.P_i * Rational(p.s, p.V), p.P_i * Rational(p.S, p.V));
}

HitRatios analytic_ratios(StrategyKind strategy, const AnalyticParams& p)
{
    switch (strategy) {
    case StrategyKind::None: return hr_none();
    case StrategyKind::Random: return hr_random(p);
    case StrategyKind::Popularity: return hr_popularity(p);
    case StrategyKind::Mining: return hr_mining(p);
    case StrategyKind::Cooperative: break;
    }
    throw std::invalid_argument("no closed form for the cooperative strategy");
}

ValidationVerdict validate_against_sim(const AnalyticParams& params, const MetricsReport& report, double tolerance)
{
    const auto kind = parse_strategy(report.summary.strategy);
    if (!kind) throw std::invalid_argument("unknown strategy `" + report.summary.strategy + "` in report");
    if (!report.summary.hr_r) throw std::invalid_argument("report has no seeks, so no hit ratio to compare");
    const HitRatios a = analytic_ratios(*kind, params);

    ValidationVerdict v;
    auto add = [&](std::string name, const Rational& analytic, double simulated) {
        ValidationRow row{std::move(name), to_double(analytic), simulated, 0.0, false};
        row.difference = std::fabs(row.analytic - row.simulated);
        row.pass = row.difference <= tolerance;
        v.rows.push_back(row);
    };
    add("hr_r", a.hr_r, *report.summary.hr_r);
    v.pass = true;
    for (const auto& r : v.rows) v.pass = v.pass && r.pass;
    return v;
}

std::string ValidationVerdict::render() const
{
    std::string out;
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-10s analytic=%.6f simulated=%.6f diff=%.6f %s\n", r.quantity.c_str(),
                      r.analytic, r.simulated, r.difference, r.pass ? "PASS" : "FAIL");
        out += buf;
    }
    out += pass ? "verdict: PASS\n" : "verdict: FAIL\n";
    return out;
}

}  // namespace vodsim
