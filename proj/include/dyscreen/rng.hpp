#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dyscreen/errors.hpp"

namespace dyscreen {

// Deterministic random stream built on splitmix64. Every distribution is
// spelled out here instead of delegating to <random>, so that a (seed, data,
// params) triple produces the same bytes on every platform and standard
// library. Sub-streams are derived from (seed, index), which keeps parallel
// consumers order-independent.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    static RngStream derive(std::uint64_t seed, std::uint64_t index) {
        return RngStream(scramble(seed + kGolden * (index + 1)));
    }

    // Convenience for modules that re-derive their own streams.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
        return scramble(seed + kGolden * (index + 1));
    }

    std::uint64_t next_u64() {
        state_ += kGolden;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Multiply-shift; the O(n / 2^64) bias is far
    // below anything observable here.
    std::uint64_t uniform_int(std::uint64_t n) {
        using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * n) >> 64);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    bool bernoulli(double p) { return next_double() < p; }

    // Box-Muller, one value per call (two uniforms consumed).
    double normal(double mean, double sd) {
        double u1 = next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return mean + sd * r * std::cos(2.0 * kPi * u2);
    }

    // Normal truncated at zero by rejection.
    double truncated_normal(double mean, double sd) {
        if (sd <= 0.0) return mean < 0.0 ? 0.0 : mean;
        for (;;) {
            double x = normal(mean, sd);
            if (x >= 0.0) return x;
        }
    }

    // Knuth's method; fine for the small rates used here.
    long poisson(double lambda) {
        if (lambda < 0.0 || lambda > 500.0)
            throw DataError("poisson rate out of range: " + std::to_string(lambda));
        if (lambda == 0.0) return 0;
        const double limit = std::exp(-lambda);
        long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= next_double();
        } while (p > limit);
        return k - 1;
    }

    long binomial(long n, double p) {
        long hits = 0;
        for (long i = 0; i < n; ++i)
            if (bernoulli(p)) ++hits;
        return hits;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    static constexpr double kPi = 3.14159265358979323846;

    // murmur3 finalizer; decorrelates consecutive seeds.
    static std::uint64_t scramble(std::uint64_t x) {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        x *= 0xc4ceb9fe1a85ec53ULL;
        x ^= x >> 33;
        return x;
    }

    std::uint64_t state_;
};

}  // namespace dyscreen
