#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "apxgrp/covering.hpp"
#include "apxgrp/setalg.hpp"

namespace apxgrp {

// One row of the tower property matrix.  n, m, k are 1-based level indices;
// unused indices are 0.  A failing row carries a witness pair.
struct TowerCheck {
    int property = 0;  // 1..7
    int n = 0, m = 0, k = 0;
    bool pass = false;
    std::optional<std::size_t> value;  // measured constant (property 3: cover count)
    std::vector<std::string> witness;  // element literals, empty when passing

    std::string key() const;
};

constexpr std::uint32_t kAllTowerProperties = 0b11111110;  // bits 1..7

struct TowerReport {
    std::size_t depth = 0;  // N, number of recorded levels
    bool nested_ok = true;
    std::size_t truncated_at = 0;  // first violating level when !nested_ok
    std::size_t c = 0;             // max greedy covering constant across adjacent pairs
    std::optional<std::size_t> e;  // commensurability of X^-1 X with X_1 (when X known)
    std::optional<bool> seed_in_derived_square;  // X_1 subset of (X^-1 X)^2 (when X known)
    std::uint32_t properties_checked = kAllTowerProperties;
    std::vector<TowerCheck> checks;
    std::vector<std::size_t> level_sizes;

    bool all_pass() const;
    bool property_passes(int property) const;
};

struct TowerOptions {
    bool check7_all_m = false;          // property (7) on every level m >= 2, not just m = 2
    const FinSet* ambient = nullptr;    // the near-subgroup X, enables e and the seed flag
    std::size_t cover_budget = 100000;  // greedy cover safety budget for c
    std::uint32_t property_mask = kAllTowerProperties;  // bit p = run property p
};

// Levels X_1 (= seed) through X_N with X_{n+1} = {x in X_1 : x^4 in X_n}.
// Construction stops after the first level that degenerates to {identity}.
std::vector<FinSet> build_tower(const FinSet& X1, std::size_t N);

TowerReport verify_tower(std::span<const FinSet> levels, const TowerOptions& opts = {});

enum class SeedFamily { DerivedSquare, Dilates, CayleyBalls, UserList };

struct SeedCandidateOutcome {
    std::string desc;
    std::size_t verified_depth = 0;
    std::size_t c = 0;
    std::size_t e = 0;
    bool skipped = false;  // candidate construction exceeded the work cap
};

struct SeedSearchResult {
    FinSet seed;
    TowerReport report;
    std::string chosen;
    std::vector<SeedCandidateOutcome> candidates;
};

struct SeedSearchOptions {
    std::vector<FinSet> user_list;
    std::size_t work_cap_pairs = 200'000'000;  // skip candidates whose construction costs more pairs
};

// Heuristic search for a tower seed: evaluates the derived square (X^-1 X)^2,
// its shrunk subsets, and backend-appropriate dilate/ball families, then
// returns the candidate maximizing verified depth (ties: smaller c, then
// smaller e).
SeedSearchResult seed_search(const FinSet& X, SeedFamily family, std::size_t budget,
                             const SeedSearchOptions& opts = {});

}  // namespace apxgrp
