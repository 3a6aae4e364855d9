#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apxgrp/rng.hpp"
#include "apxgrp/setalg.hpp"

namespace apxgrp {

enum class FamilyKind {
    IntervalBox,        // [-n,n]^d in Z^d
    Beatty,             // { trunc(m*alpha) : |m| <= n } in Z
    HeisenbergBox,      // |x|,|y| <= r, |z| <= r^2
    CayleyBall,         // products of <= radius symmetrized generators
    RandomSymmetric,    // seeded sample, symmetrized
    SubgroupPlusNoise,  // coordinate span + noise points / coset shifts
    ExponentGrid,       // grid progression {sum c_i e_i : |c_i| <= r} in (Z/q)^d
};

struct FamilySpec {
    FamilyKind kind = FamilyKind::IntervalBox;
    CtxPtr ctx;  // defaulted per kind when null (Z^d, Z, Heisenberg)

    int d = 1;               // lattice dimension
    std::int64_t n = 0;      // interval radius / beatty index bound / random window
    std::string alpha;       // beatty: "4pi", "10+sqrt2", "e4", or a decimal literal
    std::int64_t r = 0;      // heisenberg box / exponent grid radius
    std::size_t radius = 0;  // cayley ball radius; 0 = grow until closed
    std::vector<std::string> gens;  // cayley ball generator literals
    std::size_t size = 0;    // random set size (lower bound after symmetrization)
    std::uint64_t seed = 0;
    int basis = 0;           // subgroup-plus-noise: span of the first `basis` coordinates
    int noise = 0;           // extra sampled points
    int shifts = 0;          // extra sampled coset shifts
    bool symmetrized = false;  // post-process with symmetrize()

    std::string label() const;
};

// Deterministic generation; throws ConfigError for invalid parameters and
// BudgetError when a family would exceed the engine size guard.
FinSet generate(const FamilySpec& spec);

// Registered corpora: paper-examples | growth-grid | tower-grid | sl2-grid.
std::vector<FamilySpec> corpus(std::string_view name);
std::vector<std::string> corpus_names();

// Seeded random element with coordinates bounded by `window` where the
// backend is unbounded.  Pure in (ctx, rng, counter).
Elem random_elem(const GroupCtx& ctx, const CounterRng& rng, std::uint64_t counter, std::int64_t window);

// trunc(m*alpha) computed exactly from a 64.64 fixed-point value of alpha.
// Rejects alpha <= 10 and values indistinguishable from a rational at the
// working precision over |m| <= n.
std::int64_t beatty_floor(unsigned __int128 alpha_scaled, std::int64_t m);
unsigned __int128 parse_alpha(const std::string& text);

}  // namespace apxgrp
