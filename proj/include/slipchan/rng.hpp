#pragma once

/// @file rng.hpp
/// @brief Seeded, platform-stable random number generation.
///
/// std::random distributions are implementation-defined, which breaks the
/// "identical config + seed => identical outputs" contract. Everything here
/// is spelled out explicitly (splitmix64 + xoshiro256**, Box-Muller).

#include <cmath>
#include <cstdint>

namespace slipchan {

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 expansion of the seed into the xoshiro state
        std::uint64_t x = seed;
        for (auto& w : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    /// Log-uniform magnitude in [10^lo, 10^hi].
    double log_uniform(double lo_exp, double hi_exp) {
        return std::pow(10.0, uniform(lo_exp, hi_exp));
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace slipchan
