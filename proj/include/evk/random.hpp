#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace evk {

/// Role tags keep independent random streams apart for the same seed.
enum class RngRole : std::uint64_t {
    Thresholds = 1,
    Scene = 2,
    GaussianNoise = 3,
    HotPixels = 4,
    Pause = 5,
    Assets = 6,
};

[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: the n-th output is a pure function of (key, n), so any
/// value can be recomputed without replaying the stream. Keys are derived from a seed
/// and a path of stream identifiers (sequence index, role, grid index, ...).
///
/// Normal deviates use Box-Muller on this generator's own uniforms so results do not
/// depend on the standard library's distribution implementations.
class CounterRng {
public:
    using result_type = std::uint64_t;
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit CounterRng(std::uint64_t seed) : key_(mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}
    CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) : CounterRng(seed) {
        for (auto id : path) key_ = derive(key_, id);
    }
    CounterRng(std::uint64_t seed, RngRole role, std::initializer_list<std::uint64_t> path = {})
        : CounterRng(seed) {
        key_ = derive(key_, static_cast<std::uint64_t>(role));
        for (auto id : path) key_ = derive(key_, id);
    }

    [[nodiscard]] CounterRng split(std::uint64_t id) const {
        CounterRng child = *this;
        child.key_ = derive(key_, id);
        child.counter_ = 0;
        return child;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    [[nodiscard]] std::uint64_t at(std::uint64_t counter) const { return mix64(key_ + (counter + 1) * kGamma); }
    std::uint64_t operator()() { return at(counter_++); }

    /// Uniform on [0, 1) with 53 random bits.
    [[nodiscard]] double uniform_at(std::uint64_t counter) const {
        return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
    }
    double uniform() { return uniform_at(counter_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal from counters 2n and 2n+1.
    [[nodiscard]] double normal_at(std::uint64_t n) const {
        const double u1 = 1.0 - uniform_at(2 * n); // (0, 1]
        const double u2 = uniform_at(2 * n + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Uniform integer in [0, bound) by rejection, bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = max() - max() % bound;
        std::uint64_t r;
        do {
            r = (*this)();
        } while (r >= limit);
        return r % bound;
    }
    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    [[nodiscard]] std::uint64_t key() const { return key_; }

private:
    static std::uint64_t derive(std::uint64_t key, std::uint64_t id) { return mix64(key ^ mix64(id + kGamma)); }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace evk
