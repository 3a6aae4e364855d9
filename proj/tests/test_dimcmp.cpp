#include <doctest.h>

#include <json.hpp>

#include "apxgrp/dimcmp.hpp"
#include "apxgrp/families.hpp"

using namespace apxgrp;

namespace {

FinSet full_sl2_by_closure(std::uint64_t p) {
    FamilySpec s;
    s.kind = FamilyKind::CayleyBall;
    s.ctx = GroupCtx::sl2(p);
    s.gens = {"[[1,1],[0,1]]", "[[1,0],[1,1]]"};
    s.radius = 0;  // grow until the generated subgroup closes
    return generate(s);
}

FinSet sl2_ball(std::uint64_t p, std::size_t radius) {
    FamilySpec s;
    s.kind = FamilyKind::CayleyBall;
    s.ctx = GroupCtx::sl2(p);
    s.gens = {"[[1,1],[0,1]]", "[[1,0],[1,1]]"};
    s.radius = radius;
    return generate(s);
}

}  // namespace

TEST_CASE("counting laws of SL2(F_p) subvarieties at small primes") {
    for (std::uint64_t p : {5ull, 7ull, 11ull, 13ull}) {
        FinSet G = full_sl2_by_closure(p);
        CAPTURE(p);
        CHECK(G.size() == p * (p - 1) * (p + 1));
        CHECK(variety_count(G, variety_by_name("torus")) == p - 1);
        CHECK(variety_count(G, variety_by_name("unipotent")) == p);
        CHECK(variety_count(G, variety_by_name("borel")) == p * (p - 1));
        CHECK(variety_count(G, variety_by_name("torus-normalizer")) == 2 * (p - 1));
        CHECK(variety_count(G, variety_by_name("center")) == 2);
        // trace-level sets have p(p-1) or p(p+1) points away from +-2
        std::size_t t0 = variety_count(G, variety_by_name("trace=0"));
        CHECK(t0 % p == 0);
        bool split = t0 / p == p - 1 || t0 / p == p + 1;
        CHECK(split);
    }
}

TEST_CASE("variety_count degenerate inputs and backend guards") {
    auto sl2 = GroupCtx::sl2(5);
    FinSet id = FinSet::of_literals(sl2, {"[[1,0],[0,1]]"});
    CHECK(variety_count(id, variety_by_name("torus")) == 1);
    CHECK(variety_count(id, variety_by_name("unipotent")) == 1);
    FinSet latt = FinSet::of_literals(GroupCtx::integer_lattice(1), {"(0)"});
    CHECK_THROWS_AS(variety_count(latt, variety_by_name("torus")), ConfigError);
    CHECK_THROWS_AS(variety_by_name("quadric"), ConfigError);
}

TEST_CASE("lp_report at p=13 passes every built-in variety at epsilon 0.02") {
    FinSet G = full_sl2_by_closure(13);
    DimReport rep = lp_report(G, builtin_varieties(), 0.02);
    CHECK(rep.p == 13);
    CHECK(rep.dim_g == 3);
    CHECK(rep.gamma_card == 2184);
    for (const auto& row : rep.rows) {
        CAPTURE(row.name);
        CHECK(row.pass);
        CHECK_FALSE(row.unbalanced);
        CHECK(row.ratio_adj <= row.ratio + 1e-12);
    }
    CHECK(rep.all_pass());

    CHECK_THROWS_AS(lp_report(FinSet::of_literals(GroupCtx::sl2(5), {"[[1,0],[0,1]]"}), builtin_varieties(), 0.02),
                    ConfigError);  // |Gamma| = 1
    CHECK_THROWS_AS(lp_report(G, builtin_varieties(), -1.0), ConfigError);
}

TEST_CASE("an artificially dense subvariety is flagged unbalanced") {
    // restrict Gamma to the Borel itself: the torus row then carries exponent
    // ~ 1/2 of log|Gamma|, far above dim/dim(G) = 1/3
    FinSet G = full_sl2_by_closure(11);
    SetBuilder b(G.ctx_ptr());
    for (std::size_t i = 0; i < G.size(); ++i) {
        // keep upper-triangular elements only
        VarietySpec borel = variety_by_name("borel");
        std::uint64_t m[4];
        const std::uint8_t* raw = G.block(i);
        for (int j = 0; j < 4; ++j) m[j] = raw[j];
        if (variety_contains(borel, 11, m)) b.add_raw(raw);
    }
    FinSet res = b.take();
    REQUIRE(res.size() == 110);
    DimReport rep = lp_report(res, {variety_by_name("torus")}, 0.02);
    CHECK_FALSE(rep.rows[0].pass);
    CHECK(rep.rows[0].unbalanced);
}

TEST_CASE("dichotomy: line stabilizers are classified by name") {
    auto sl2 = GroupCtx::sl2(5);
    // unipotent-containing Borel line fixer
    FinSet bor = FinSet::of_literals(sl2, {"[[1,0],[0,1]]", "[[4,0],[0,4]]", "[[1,1],[0,1]]", "[[4,4],[0,4]]"});
    ProbeReport br = linear_dichotomy_probe(bor);
    CHECK(br.verdict == "proper algebraic subgroup");
    CHECK(br.payload["subgroup"] == "borel");
    CHECK(br.payload["coset_count"] == 1);

    // split torus fixes two lines
    FinSet tor = symmetrize(FinSet::of_literals(sl2, {"[[2,0],[0,3]]"}));
    ProbeReport tr = linear_dichotomy_probe(tor);
    CHECK(tr.verdict == "proper algebraic subgroup");
    CHECK(tr.payload["subgroup"] == "torus");
    CHECK(tr.payload["card_subgroup"] == 4);

    // adding the Weyl flip upgrades the verdict to the normalizer
    FinSet nrm = symmetrize(FinSet::of_literals(sl2, {"[[2,0],[0,3]]", "[[0,1],[4,0]]"}));
    ProbeReport nr = linear_dichotomy_probe(nrm);
    CHECK(nr.verdict == "proper algebraic subgroup");
    CHECK(nr.payload["subgroup"] == "torus-normalizer");

    // the identity degenerates to the center
    FinSet id = FinSet::of_literals(sl2, {"[[1,0],[0,1]]"});
    ProbeReport ir = linear_dichotomy_probe(id);
    CHECK(ir.verdict == "proper algebraic subgroup");
    CHECK(ir.payload["subgroup"] == "center");
    CHECK(ir.payload["coset_count"] == 1);
}

TEST_CASE("dichotomy: large generating balls saturate (X X^-1)^2 = <X>") {
    // frozen saturating radii per prime; coarser balls are genuinely not
    // saturating at these sizes
    const std::vector<std::pair<std::uint64_t, std::size_t>> corpus = {{5, 2}, {7, 2}, {11, 3}, {13, 3}};
    for (const auto& [p, radius] : corpus) {
        CAPTURE(p);
        ProbeReport r = linear_dichotomy_probe(sl2_ball(p, radius));
        CHECK(r.verdict == "saturates");
        CHECK(r.payload["card_closure"] == p * (p - 1) * (p + 1));
        CHECK(r.payload["saturation_ratio"] == 1.0);
    }
}

TEST_CASE("dichotomy: small generating sets are honestly intermediate") {
    // the bare symmetrized standard generators at p=5 reach only 91 of the
    // 120 elements within (X X^-1)^2
    ProbeReport r = linear_dichotomy_probe(sl2_ball(5, 1));
    CHECK(r.verdict == "intermediate");
    CHECK(r.payload["card_dsq"] == 91);
    CHECK(r.payload["card_closure"] == 120);

    // a nonsplit torus generator fixes no rational line and does not saturate
    auto sl2 = GroupCtx::sl2(13);
    FinSet non = symmetrize(FinSet::of_literals(sl2, {"[[0,1],[12,3]]"}));
    ProbeReport nr = linear_dichotomy_probe(non);
    CHECK(nr.verdict == "intermediate");
    CHECK(nr.payload["card_closure"] == 14);
    CHECK(nr.payload["card_dsq"] == 9);
}

TEST_CASE("dichotomy respects the exhaustive prime bound") {
    auto big = GroupCtx::sl2(17);
    FinSet X = FinSet::of_literals(big, {"[[1,1],[0,1]]"});
    CHECK_THROWS_AS(linear_dichotomy_probe(X, 13), BudgetError);
    CHECK_NOTHROW(linear_dichotomy_probe(X, 17));
}
