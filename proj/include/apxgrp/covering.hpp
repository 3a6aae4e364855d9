#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "apxgrp/setalg.hpp"

namespace apxgrp {

enum class Side { Right, Left };

// Certificate that `target` is covered by `count` translates of `tile`.  The
// covering union is verified on construction; `certified_bound` is the Ruzsa
// bound |Z.W|/|Z| dominating the count.
struct CoverResult {
    std::vector<Elem> translates;
    FinSet tile;
    std::string tile_desc;
    std::string target_desc;
    std::size_t count = 0;
    Side side = Side::Right;
    Ratio certified_bound;
    bool verified = false;
};

// Maximal greedy family a_1,...,a_r in W (canonical element order) with the
// translates Z.a_i pairwise disjoint; r <= |Z.W|/|Z|.
std::vector<Elem> disjoint_translates(const FinSet& Z, const FinSet& W);

// Ruzsa covering of W by translates of Z^-1 Z anchored at the maximal
// disjoint family.
CoverResult ruzsa_cover(const FinSet& W, const FinSet& Z, Side side = Side::Right);

// Greedy number of `side` translates of tile needed to cover target, or
// nullopt once the count would exceed budget.  Deterministic: uncovered
// elements are processed in canonical order and each is covered by the
// translate anchored at the canonical-least element of tile.
std::optional<std::size_t> greedy_cover_count(const FinSet& target, const FinSet& tile, Side side = Side::Right,
                                              std::size_t budget = SIZE_MAX);

// Greedy bounds on mutual right-translate covering numbers; nullopt = budget
// exhausted (the pair is reported as infinity).
struct Commensurability {
    std::optional<std::size_t> e_ab;  // translates of B covering A
    std::optional<std::size_t> e_ba;  // translates of A covering B
};
Commensurability commensurability(const FinSet& A, const FinSet& B, std::size_t budget);

// Bracketing pair for the approximate-group constant of a symmetric X with
// identity: |XX|/|X| <= k_min <= greedy upper bound.
struct ApproxConstant {
    Ratio k_lower;
    std::size_t k_upper = 0;
    std::size_t card_xx = 0;
};
ApproxConstant approx_constant(const FinSet& X);

// Exact minimal cover count by exhaustive branch and bound; only offered for
// |tile| <= 64 and small targets (oracle-scale instances).
std::optional<std::size_t> exact_cover_count(const FinSet& target, const FinSet& tile, Side side = Side::Right,
                                             std::size_t node_budget = 2'000'000);

}  // namespace apxgrp
