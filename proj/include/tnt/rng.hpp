#pragma once

#include <cmath>
#include <cstdint>

namespace tnt {

/// Splittable counter-based generator (SplitMix64 core). Every randomized
/// operation in the library takes an explicit seed and derives its own
/// stream, so results are reproducible and independent of call order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

    /// Derive an independent stream for a tagged sub-computation.
    Rng split(std::uint64_t tag) const { return Rng(mix(state_ ^ mix(tag + 0x6a09e667f3bcc909ull))); }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Rademacher +-1.
    double rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace tnt
