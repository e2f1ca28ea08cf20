#pragma once

#include <cmath>
#include <cstdint>

#include "fgs/core.hpp"

namespace fgs {

/// splitmix64 step; also used as the seed/index mixing function.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

/// Counter-based per-sample stream: keyed by (seed, sample index), so batches
/// are bit-identical regardless of generation order or thread count.
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::uint64_t index)
        : state_(hash_combine(seed, index)) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        // 53-bit mantissa; +0.5 keeps the value strictly inside (0,1).
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes two uniforms per pair.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * pi * u2;
        cached_ = r * std::sin(th);
        have_cached_ = true;
        return r * std::cos(th);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace fgs
