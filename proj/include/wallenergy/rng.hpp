#pragma once

#include <cstdint>
#include <random>

namespace wallenergy {

// Seeded generator with a fixed uniform-double mapping. std::mt19937_64 is
// bit-reproducible across platforms but the standard distributions are not,
// so the mapping lives here instead of <random>'s distribution classes.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 gen_;
};

} // namespace wallenergy
