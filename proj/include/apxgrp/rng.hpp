#pragma once

#include <cstdint>

namespace apxgrp {

// Counter-based pseudo-random stream.  Stateless: the value at a position is
// a pure function of (seed, stream, counter), so parallel consumers drawing
// from disjoint streams are schedule-independent and runs are reproducible
// from the seed alone.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : base_(mix(seed ^ 0x9e3779b97f4a7c15ull) ^ mix(stream * 0xbf58476d1ce4e5b9ull + 1)) {}

    std::uint64_t at(std::uint64_t counter) const { return mix(base_ + counter * 0x94d049bb133111ebull); }

    // Uniform value in [0, n) via 128-bit multiply-shift.
    std::uint64_t below(std::uint64_t n, std::uint64_t counter) const {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(at(counter)) * static_cast<unsigned __int128>(n)) >> 64);
    }

    // Signed uniform value in [-r, r].
    std::int64_t window(std::int64_t r, std::uint64_t counter) const {
        return static_cast<std::int64_t>(below(static_cast<std::uint64_t>(2 * r + 1), counter)) - r;
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t base_;
};

}  // namespace apxgrp
