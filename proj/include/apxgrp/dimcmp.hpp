#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apxgrp/probes.hpp"
#include "apxgrp/setalg.hpp"

namespace apxgrp {

// Ambient algebraic-group dimensions.  Only SL2 has a backend; the SL3 entry
// is reserved for the experimental flag and is rejected at runtime.
constexpr int kDimSL2 = 3;
constexpr int kDimSL3 = 8;

// Built-in subvariety of SL_2(F_p): name, declared Zariski dimension and
// irreducible-component count, plus the trace parameter for trace-level sets.
struct VarietySpec {
    std::string name;
    int dim = 0;
    int components = 1;
    std::int64_t trace = 0;

    std::string display() const;
};

// The six built-ins: diagonal torus, upper unipotent, Borel, torus
// normalizer, trace-level at t=0, center.
std::vector<VarietySpec> builtin_varieties();

// Lookup by config name: "torus" | "unipotent" | "borel" |
// "torus-normalizer" | "trace" | "trace=<t>" | "center".
VarietySpec variety_by_name(std::string_view name);

bool variety_contains(const VarietySpec& z, std::uint64_t p, const std::uint64_t m[4]);

// |{g in Gamma : Z(g)}| by exact filtration; Gamma must live in SL2/GL2.
std::size_t variety_count(const FinSet& Gamma, const VarietySpec& z);

struct DimRow {
    std::string name;
    std::size_t count = 0;
    int dim = 0;
    int components = 1;
    double ratio = 0;      // log|Z n Gamma| / log|Gamma|
    double ratio_adj = 0;  // log(|Z n Gamma| / components) / log|Gamma|
    double bound = 0;      // dim(Z)/dim(G)
    double slack = 0;      // bound + epsilon - ratio_adj
    bool pass = false;
    bool unbalanced = false;
};

struct DimReport {
    std::uint64_t p = 0;
    std::size_t gamma_card = 0;
    int dim_g = kDimSL2;
    double gamma0 = 0;  // log|Gamma| / dim(G)
    double epsilon = 0;
    std::vector<DimRow> rows;

    bool all_pass() const;
};

// Exponent-ratio comparison against the dim(Z)/dim(G) law.  The pass rule
// discounts the bounded component count (the law holds up to bounded
// constants, which the epsilon slack is not meant to absorb); the raw ratio
// is reported alongside.
DimReport lp_report(const FinSet& Gamma, const std::vector<VarietySpec>& varieties, double epsilon);

// Classification of <X> against the rank-1 dichotomy: a named proper
// algebraic subgroup (line or line-pair stabilizer), saturation
// (X X^-1)^2 = <X>, or an honest "intermediate".
ProbeReport linear_dichotomy_probe(const FinSet& X, std::uint64_t exhaustive_p_bound = 13);

}  // namespace apxgrp
