#pragma once

#include <cmath>
#include <cstdint>

namespace hawkesnet {

// Seeded counter-style stream: splitmix64 seeding feeding xoshiro256++.
// Distribution transforms are hand-rolled (inverse CDF / Box-Muller) so that
// a given (seed, stream) pair yields the same draws on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
        for (auto& si : s_) si = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0,1); never returns 0 or 1.
    double uniform() {
        const std::uint64_t u = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    double normal(double mean = 0.0, double sd = 1.0) {
        if (have_cached_) {
            have_cached_ = false;
            return mean + sd * cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * M_PI * u2);
        have_cached_ = true;
        return mean + sd * r * std::cos(2.0 * M_PI * u2);
    }

    // Poisson via inversion for small means, PTRS-style fallback not needed here;
    // means used in this codebase are modest (field strips, network degrees).
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) {
            const double L = std::exp(-mean);
            std::uint64_t k = 0;
            double p = uniform();
            while (p > L) {
                ++k;
                p *= uniform();
            }
            return k;
        }
        // Split recursively; keeps inversion exact-in-distribution.
        const std::uint64_t a = poisson(mean / 2.0);
        const std::uint64_t b = poisson(mean - mean / 2.0);
        return a + b;
    }

    // Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection to avoid modulo bias.
        const std::uint64_t limit = ~0ULL - ~0ULL % n;
        std::uint64_t u;
        do {
            u = next_u64();
        } while (u >= limit);
        return u % n;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace hawkesnet
