#include <doctest.h>

#include <algorithm>
#include <set>

#include <json.hpp>

#include "apxgrp/families.hpp"
#include "apxgrp/probes.hpp"

using namespace apxgrp;

namespace {

FinSet mod_set(std::uint64_t n, const std::vector<std::string>& lits) {
    return FinSet::of_literals(GroupCtx::mod_lattice(n, 1), lits);
}

FinSet interval(std::int64_t lo, std::int64_t hi) {
    auto ctx = GroupCtx::integer_lattice(1);
    std::vector<std::string> lits;
    for (std::int64_t v = lo; v <= hi; ++v) lits.push_back("(" + std::to_string(v) + ")");
    return FinSet::of_literals(ctx, lits);
}

FinSet alternating5() {
    FamilySpec s;
    s.kind = FamilyKind::CayleyBall;
    s.ctx = GroupCtx::symmetric(5);
    s.gens = {"(1 2 3)", "(1 2 3 4 5)"};
    s.radius = 0;
    return generate(s);
}

}  // namespace

TEST_CASE("group_closure fixed points and subgroup enumeration oracle") {
    auto z10 = GroupCtx::mod_lattice(10, 1);
    ClosureResult r = group_closure(FinSet::of_literals(z10, {"(2)"}), 1000);
    REQUIRE_FALSE(r.exceeded);
    // oracle: the subgroup generated by 2 in Z/10 is the multiples of gcd(2,10)
    std::set<std::string> expect;
    for (int v = 0; v < 10; v += 2) expect.insert("(" + std::to_string(v) + ")");
    std::set<std::string> got;
    for (std::size_t i = 0; i < r.closure.size(); ++i) got.insert(r.closure.ctx().format_raw(r.closure.block(i)));
    CHECK(got == expect);

    auto idr = group_closure(FinSet::of_literals(z10, {"(0)"}), 10);
    CHECK(idr.steps == 0);
    CHECK(idr.closure.size() == 1);

    auto s3 = GroupCtx::symmetric(3);
    auto s3r = group_closure(FinSet::of_literals(s3, {"(1 2)", "(1 2 3)"}), 100);
    CHECK(s3r.closure.size() == 6);

    auto ex = group_closure(FinSet::of_literals(GroupCtx::integer_lattice(1), {"(1)"}), 100);
    CHECK(ex.exceeded);
    CHECK(ex.last_size > 100);
}

TEST_CASE("near_subgroup_probe on subgroups, cosets, and intervals") {
    // subgroup: verdict subgroup with one coset
    FamilySpec a3;
    a3.kind = FamilyKind::CayleyBall;
    a3.ctx = GroupCtx::symmetric(3);
    a3.gens = {"(1 2 3)"};
    a3.radius = 0;
    ProbeReport hr = near_subgroup_probe(generate(a3));
    CHECK(hr.verdict == "subgroup");
    CHECK(hr.payload["coset_count"] == 1);
    CHECK(hr.payload["normalized_by_x"] == true);

    // coset 1 + <5> inside Z/35: the stabilizer candidate recovers <5>
    std::vector<std::string> coset;
    for (int k = 0; k < 7; ++k) coset.push_back("(" + std::to_string(1 + 5 * k) + ")");
    ProbeReport cr = near_subgroup_probe(mod_set(35, coset));
    CHECK(cr.verdict == "subgroup");
    CHECK(cr.payload["card_s_candidate"] == 7);
    CHECK(cr.payload["coset_count"] == 1);

    // interval: not closed, defect |S.S \ S| = 36, witness pair recorded
    ProbeReport ir = near_subgroup_probe(interval(0, 9));
    CHECK(ir.verdict == "not-closed");
    CHECK(ir.payload["card_s_candidate"] == 37);
    CHECK(ir.payload["defect"] == 36);
    REQUIRE(ir.witnesses.size() == 2);
    long long a = 0, b = 0;
    std::sscanf(ir.witnesses[0].c_str(), "(%lld)", &a);
    std::sscanf(ir.witnesses[1].c_str(), "(%lld)", &b);
    CHECK(a + b > 18);  // escapes {-18..18}
}

TEST_CASE("perfectness_stat: exhaustive A5 fraction matches the frozen oracle") {
    FinSet A = alternating5();
    REQUIRE(A.size() == 60);
    PerfStat st = perfectness_stat(A, 2, 2, 100, 0);
    CHECK(st.exhaustive);
    CHECK(st.samples == 3600);
    // frozen: every ordered pair avoiding the identity covers >= 30 elements,
    // identity pairs never do: 3600 - 119 hits
    CHECK(st.hits == 3481);
    CHECK(st.p_hat == doctest::Approx(3481.0 / 3600.0).epsilon(1e-12));
    CHECK(st.radius == 0.0);
}

TEST_CASE("perfectness_stat abelian and single-class controls") {
    PerfStat ab = perfectness_stat(interval(-6, 6), 2, 2, 64, 1);
    CHECK(ab.p_hat == 0.0);

    // S3, l = 1, m = 1: no class reaches all 6 elements (sizes 1, 3, 2)
    auto s3 = GroupCtx::symmetric(3);
    FinSet full = FinSet::of_literals(s3, {"()", "(1 2)", "(1 3)", "(2 3)", "(1 2 3)", "(1 3 2)"});
    PerfStat s = perfectness_stat(full, 1, 1, 16, 1);
    CHECK(s.exhaustive);
    CHECK(s.p_hat == 0.0);
}

TEST_CASE("perfectness_stat sampling is reproducible and consistent with exhaustion") {
    FinSet A = alternating5();
    // l = 4 forces sampling (60^4 > 10^6)
    PerfStat s1 = perfectness_stat(A, 4, 2, 200, 11);
    PerfStat s2 = perfectness_stat(A, 4, 2, 200, 11);
    CHECK_FALSE(s1.exhaustive);
    CHECK(s1.hits == s2.hits);
    CHECK(s1.p_hat == s2.p_hat);

    // exhaustive l = 2 fraction sits inside the sampled l = 2 interval;
    // sampling keyed by tuple index must stay near the true 0.9669
    PerfStat ex = perfectness_stat(A, 2, 2, 10, 5);
    CHECK(ex.exhaustive);
    // different seeds at l = 4 stay within radius of each other
    PerfStat s3 = perfectness_stat(A, 4, 2, 200, 12);
    CHECK(std::abs(s3.p_hat - s1.p_hat) <= s1.radius + s3.radius + 1e-12);
}

TEST_CASE("word_depth conventions and greedy b-elements") {
    auto ctx = GroupCtx::integer_lattice(1);
    FinSet e = FinSet::of_literals(ctx, {"(0)"});
    auto r = word_depth(e, std::vector<Elem>{ctx->parse("(3)")}, 4);
    CHECK(r.d == 1);  // identity is the empty word; W_1 contains it

    // S3 with a = (1 2 3): conjugates + one greedy transposition reach
    // everything in two letters
    auto s3 = GroupCtx::symmetric(3);
    FinSet full = FinSet::of_literals(s3, {"()", "(1 2)", "(1 3)", "(2 3)", "(1 2 3)", "(1 3 2)"});
    auto sr = word_depth(full, std::vector<Elem>{s3->parse("(1 2 3)")}, 6);
    REQUIRE(sr.d.has_value());
    CHECK(*sr.d == 2);
    REQUIRE(sr.b_chosen.size() == 1);
    CHECK(s3->format(sr.b_chosen[0]) == "(2 3)");  // canonical-least missing element
}

TEST_CASE("word_depth reports infinity under generation obstructions") {
    // Z^2: words in (1,0) and one greedy b cannot reach the negative axis
    auto z2 = GroupCtx::integer_lattice(2);
    FinSet X = FinSet::of_literals(z2, {"(0,0)", "(5,0)", "(0,5)", "(-5,0)", "(0,-5)"});
    auto r = word_depth(X, std::vector<Elem>{z2->parse("(1,0)")}, 8);
    CHECK_FALSE(r.d.has_value());
}

TEST_CASE("word_depth is monotone in the generator list") {
    auto s3 = GroupCtx::symmetric(3);
    FinSet full = FinSet::of_literals(s3, {"()", "(1 2)", "(1 3)", "(2 3)", "(1 2 3)", "(1 3 2)"});
    auto one = word_depth(full, std::vector<Elem>{s3->parse("(1 2 3)")}, 6);
    auto two = word_depth(full, std::vector<Elem>{s3->parse("(1 2 3)"), s3->parse("(1 2)")}, 6);
    REQUIRE(one.d.has_value());
    REQUIRE(two.d.has_value());
    CHECK(*two.d <= *one.d);
}

TEST_CASE("freiman_exponent_probe closes subspaces at small commensurability") {
    // affine subspace in (Z/2)^8: closure is the parallel subspace, e = 1
    auto ctx = GroupCtx::mod_lattice(2, 8);
    std::vector<std::string> affine;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                affine.push_back("(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) +
                                 ",0,0,0,0,0)");
    ProbeReport flat = freiman_exponent_probe(FinSet::of_literals(ctx, affine));
    CHECK(flat.verdict == "subgroup");
    CHECK(flat.payload["e"] == 1);
    CHECK(flat.payload["card_s"] == 8);

    // subspace plus one extra point: the closure doubles, e stays <= 2
    std::vector<std::string> bumped = affine;
    bumped.push_back("(0,0,0,1,0,0,0,0)");
    ProbeReport bump = freiman_exponent_probe(FinSet::of_literals(ctx, bumped));
    CHECK(bump.verdict == "subgroup");
    CHECK(bump.payload["card_s"] == 16);  // oracle: span gains one basis vector
    CHECK(bump.payload["e"].get<std::size_t>() <= 2);

    // (Z/3)^6 grid progression: frozen closure data
    FamilySpec g;
    g.kind = FamilyKind::SubgroupPlusNoise;
    g.ctx = GroupCtx::mod_lattice(3, 6);
    g.basis = 3;
    g.shifts = 2;
    g.seed = 5;
    FinSet X = generate(g);
    ProbeReport grid = freiman_exponent_probe(X, 64);
    CHECK(grid.verdict == "subgroup");
    CHECK(grid.payload["e"].get<std::size_t>() <= 4);

    // missing exponent annotation is an error
    CHECK_THROWS_AS(freiman_exponent_probe(interval(-3, 3)), ConfigError);
}

TEST_CASE("freiman probe reports budget exhaustion without fabricating a subgroup") {
    auto ctx = GroupCtx::mod_lattice(1009, 1);
    std::vector<std::string> lits = {"(0)", "(1)", "(1008)"};
    ProbeReport r = freiman_exponent_probe(FinSet::of_literals(ctx, lits), 2);
    CHECK(r.verdict == "budget-exceeded");
}
