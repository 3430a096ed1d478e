#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace topoalign {

// Deterministic random source. The engine is std::mt19937_64, whose output
// stream is fixed by the C++ standard, and the real-valued draws below are
// spelled out here so another implementation can reproduce them exactly:
//   uniform01: (engine() >> 11) * 2^-53            in [0, 1)
//   normal:    Box-Muller on two uniform draws, cosine value first
// (std::uniform_real_distribution / std::normal_distribution are avoided
// because their algorithms differ between standard libraries.)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite
        const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace topoalign
