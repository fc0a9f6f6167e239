#pragma once

// Seeded random stream with derivable substreams. Substream derivation is a
// pure function of (seed, index), so work items can be distributed across
// threads while keeping every draw sequence reproducible. uniform01 is built
// from raw engine words rather than std::uniform_real_distribution, whose
// output is not pinned down by the standard.

#include <cstdint>
#include <random>
#include <stdexcept>

namespace qnl {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Independent stream identified by (seed, index); does not disturb this
    // stream's state.
    RandomStream substream(std::uint64_t index) const {
        return RandomStream(detail::splitmix64(seed_ ^ detail::splitmix64(index + 1)));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) {
        if (!(lo < hi)) throw std::invalid_argument("uniform: empty interval");
        return lo + (hi - lo) * uniform01();
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace qnl
