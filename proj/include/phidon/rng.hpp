#pragma once

#include <cstdint>
#include <random>

namespace phidon {

/// Mixes a master seed with a stream index into an independent sub-seed.
/// splitmix64 finalizer; good avalanche, cheap, and stable across platforms.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random source. std::mt19937_64 output is fully specified
/// by the standard, and uniform/normal draws below avoid the
/// implementation-defined std::*_distribution adapters, so sequences are
/// identical across compilers and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // modulo bias is < 2^-40 for the n used here (n << 2^64)
        return gen_() % n;
    }

    /// Standard normal via Box-Muller; caches the second value of each pair.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace phidon
