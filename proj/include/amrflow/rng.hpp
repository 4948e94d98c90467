#pragma once

#include <cstdint>
#include <random>

#include "vec.hpp"

namespace amrflow {

/// Deterministic random source. Wraps mt19937_64 (whose output sequence is
/// fixed by the standard) and derives doubles/indices without the
/// implementation-defined std distributions, so identical seeds give
/// identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t nextU64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n) { return gen_() % n; }

    Vec3 inBox(const BoxD& b) {
        return {uniform(b.lo.x, b.hi.x), uniform(b.lo.y, b.hi.y), uniform(b.lo.z, b.hi.z)};
    }

private:
    std::mt19937_64 gen_;
};

} // namespace amrflow
