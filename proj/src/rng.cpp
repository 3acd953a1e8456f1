#include "vodsim/rng.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vodsim {

std::uint64_t Rng::mix(std::uint64_t x)
{
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::fork(std::string_view name) const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    // Copy the engine so forking is const and does not advance the parent.
    std::mt19937_64 probe = engine_;
    return Rng(probe() ^ mix(h));
}

std::uint64_t Rng::below(std::uint64_t n)
{
    if (n == 0) {
        throw std::invalid_argument("Rng::below requires n > 0");
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::exponential(double rate)
{
    if (!(rate > 0.0)) {
        throw std::invalid_argument("Rng::exponential requires rate > 0");
    }
    return -std::log1p(-uniform01()) / rate;
}

std::size_t Rng::weighted_index(const std::vector<double>& weights)
{
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) {
        throw std::invalid_argument("Rng::weighted_index requires a positive weight sum");
    }
    double r = uniform01() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (r < weights[i]) {
            return i;
        }
        r -= weights[i];
    }
    // Rounding can leave r marginally above the last bucket.
    for (std::size_t i = weights.size(); i > 0; --i) {
        if (weights[i - 1] > 0.0) {
            return i - 1;
        }
    }
    return 0;
}

}  // namespace vodsim
