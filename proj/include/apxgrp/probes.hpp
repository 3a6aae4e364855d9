#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "apxgrp/covering.hpp"
#include "apxgrp/setalg.hpp"

namespace apxgrp {

struct ProbeReport {
    std::string kind;
    std::string verdict;
    nlohmann::ordered_json payload;
    std::vector<std::string> witnesses;
};

struct ClosureResult {
    FinSet closure;      // meaningful only when !exceeded
    std::size_t steps = 0;
    bool exceeded = false;
    std::size_t last_size = 0;
};

// Fixed point of Y -> symmetrize(Y) u Y.Y starting from X; gives the subgroup
// generated by X or reports "exceeded" once the iterate passes max_size.
ClosureResult group_closure(const FinSet& X, std::size_t max_size);

// Tests whether S = (X^-1 X)^2 is already a subgroup (the stabilizer
// candidate).  Verdict "subgroup" carries the right-coset count K of X over S
// and the normalizer flag; "not-closed" carries a witness pair and the defect
// |S.S \ S|.
ProbeReport near_subgroup_probe(const FinSet& X);

struct PerfStat {
    double p_hat = 0;
    double radius = 0;  // binomial 95% confidence radius (0 in exhaustive mode)
    std::size_t samples = 0;
    std::size_t hits = 0;
    bool exhaustive = false;
    std::uint64_t seed = 0;
};

// Fraction of l-tuples (a_1..a_l) from X^l with |a_1^X ... a_l^X| >= |X|/m.
// Exhaustive when |X|^l <= 10^6, otherwise seeded sampling keyed by
// (seed, tuple-index).
PerfStat perfectness_stat(const FinSet& X, std::size_t l, std::size_t m, std::size_t samples, std::uint64_t seed);

struct WordDepthOptions {
    bool use_inverses = false;       // grow words from a^X u (a^-1)^X instead of a^X
    std::size_t cap = 10'000'000;    // intermediate word-set size cap
};

struct WordDepthResult {
    std::optional<std::size_t> d;    // nullopt = no n <= n_max works (infinity)
    std::vector<Elem> b_chosen;      // greedy b-elements backing the found depth
};

// Smallest n <= n_max with X inside the length-<=n words over the conjugacy
// sets A_i = a_i^X together with greedily chosen b-elements from X.
WordDepthResult word_depth(const FinSet& X, std::span<const Elem> a_list, std::size_t n_max,
                           const WordDepthOptions& opts = {});

// Bounded-exponent variant: closes (X^-1 X)^2 within e_budget * |X| elements
// and reports the commensurability constant e of the resulting subgroup.
ProbeReport freiman_exponent_probe(const FinSet& X, std::size_t e_budget = 64);

}  // namespace apxgrp
