#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace vodsim {

/// Seeded random stream with portable draw helpers.
///
/// The standard distributions are implementation-defined, so every draw is
/// derived here from the raw 64-bit engine output. Streams are forked by name
/// so that topology, workload and strategy draws never perturb each other.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    /// Independent child stream keyed by `name`.
    Rng fork(std::string_view name) const;

    static Rng named(std::uint64_t seed, std::string_view name) { return Rng(seed).fork(name); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). Requires n > 0.
    std::uint64_t below(std::uint64_t n);

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Exponential variate with the given rate (events per unit time).
    double exponential(double rate);

    /// Index drawn proportionally to `weights` (non-negative, positive sum).
    std::size_t weighted_index(const std::vector<double>& weights);

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    static std::uint64_t mix(std::uint64_t x);

private:
    std::mt19937_64 engine_;
};

}  // namespace vodsim
