#include <doctest.h>

#include <cmath>
#include <set>

#include "apxgrp/families.hpp"
#include "apxgrp/setalg.hpp"

using namespace apxgrp;

namespace {

FamilySpec beatty_spec(std::int64_t n, const std::string& alpha) {
    FamilySpec s;
    s.kind = FamilyKind::Beatty;
    s.n = n;
    s.alpha = alpha;
    return s;
}

}  // namespace

TEST_CASE("beatty floors match a long-double oracle away from near-integers") {
    unsigned __int128 a = parse_alpha("4pi");
    const long double alpha = 12.5663706143591729538505735331180115L;
    for (std::int64_t m = -1000; m <= 1000; ++m) {
        long double v = alpha * static_cast<long double>(m);
        auto expect = static_cast<std::int64_t>(std::floor(v));
        CHECK(beatty_floor(a, m) == expect);
    }
}

TEST_CASE("beatty sets: cardinality, symmetry, and parameter validation") {
    for (std::int64_t n : {10, 100}) {
        for (const char* alpha : {"4pi", "10+sqrt2", "e4"}) {
            FinSet X = generate(beatty_spec(n, alpha));
            CAPTURE(alpha);
            CHECK(X.size() == static_cast<std::size_t>(2 * n + 1));
            CHECK(contains_identity(X));
            // symmetric up to the floor skew: -x lands one past a member
            FinSet skew = symmetrize(X);
            CHECK(skew.size() <= 2 * X.size());
        }
    }
    CHECK_THROWS_AS(generate(beatty_spec(10, "9.5")), ConfigError);   // alpha <= 10
    CHECK_THROWS_AS(generate(beatty_spec(10, "10.5")), ConfigError);  // rational: 2*10.5 integral
    CHECK_THROWS_AS(generate(beatty_spec(10, "pi")), ConfigError);    // unknown constant
}

TEST_CASE("beatty doubling stays within the factor-4 bound") {
    for (std::int64_t n : {10, 100}) {
        for (const char* alpha : {"4pi", "10+sqrt2", "e4"}) {
            FinSet X = generate(beatty_spec(n, alpha));
            FinSet XX = product(X, X);
            CAPTURE(alpha);
            CAPTURE(n);
            CHECK(XX.size() <= 4 * X.size());
        }
    }
}

TEST_CASE("interval boxes have the exact closed-form cardinalities") {
    for (int d = 1; d <= 3; ++d) {
        for (std::int64_t n : {0, 1, 3}) {
            FamilySpec s;
            s.kind = FamilyKind::IntervalBox;
            s.ctx = GroupCtx::integer_lattice(d);
            s.d = d;
            s.n = n;
            FinSet X = generate(s);
            std::size_t expect = 1;
            for (int i = 0; i < d; ++i) expect *= static_cast<std::size_t>(2 * n + 1);
            CHECK(X.size() == expect);
        }
    }
    FamilySpec z;
    z.kind = FamilyKind::IntervalBox;
    z.d = 1;
    z.n = 0;
    FinSet single = generate(z);
    CHECK(single.size() == 1);
    CHECK(contains_identity(single));
}

TEST_CASE("heisenberg box cardinality (2r+1)^2 (2r^2+1)") {
    FamilySpec s;
    s.kind = FamilyKind::HeisenbergBox;
    s.r = 2;
    CHECK(generate(s).size() == 225);
    s.r = 3;
    CHECK(generate(s).size() == 49 * 19);
    s.symmetrized = true;
    FinSet sym = generate(s);
    CHECK(is_symmetric(sym));
    CHECK(contains_identity(sym));
}

TEST_CASE("free-group balls grow like 1 + 2(3^r - 1)") {
    FamilySpec s;
    s.kind = FamilyKind::CayleyBall;
    s.ctx = GroupCtx::cayley({"ab", {}, 24});
    s.gens = {"a", "b"};
    for (std::size_t r = 1; r <= 6; ++r) {
        s.radius = r;
        std::size_t expect = 1 + 2 * (static_cast<std::size_t>(std::llround(std::pow(3.0, double(r)))) - 1);
        CHECK(generate(s).size() == expect);
    }
}

TEST_CASE("heisenberg balls keep bounded tripling; free balls do not") {
    FamilySpec s;
    s.kind = FamilyKind::CayleyBall;
    s.ctx = GroupCtx::heisenberg();
    s.gens = {"(1,0,0)", "(0,1,0)"};
    // frozen regression values: (|ball|, |ball ball^-1 ball|) per radius
    const std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> frozen = {
        {2, {17, 593}}, {3, {53, 2845}}, {4, {135, 8871}},
    };
    for (const auto& [r, counts] : frozen) {
        s.radius = r;
        FinSet ball = generate(s);
        TriplingStat st = tripling(ball);
        CHECK(ball.size() == counts.first);
        CHECK(st.card_xinvx_form == counts.second);
        // stays under 3^4 = 81, the growth-degree ceiling of H_3(Z)
        CHECK(st.tripling().value() < 81.0);
    }
    // negative control: free-group ball tripling passes any fixed ceiling
    FamilySpec f;
    f.kind = FamilyKind::CayleyBall;
    f.ctx = GroupCtx::cayley({"ab", {}, 24});
    f.gens = {"a", "b"};
    f.radius = 3;
    TriplingStat ft = tripling(generate(f));
    CHECK(ft.tripling().value() > 81.0);  // 39365/53
}

TEST_CASE("cayley ball with radius 0 closes the generated subgroup") {
    FamilySpec s;
    s.kind = FamilyKind::CayleyBall;
    s.ctx = GroupCtx::mod_lattice(35, 1);
    s.gens = {"(5)"};
    s.radius = 0;
    FinSet H = generate(s);
    CHECK(H.size() == 7);
    CHECK(product(H, H).same_elements(H));
}

TEST_CASE("random-symmetric generation is seeded and deterministic") {
    FamilySpec s;
    s.kind = FamilyKind::RandomSymmetric;
    s.ctx = GroupCtx::integer_lattice(2);
    s.size = 20;
    s.n = 30;
    s.seed = 42;
    FinSet a = generate(s);
    FinSet b = generate(s);
    CHECK(a.same_elements(b));
    CHECK(a.size() >= 20);
    CHECK(is_symmetric(a));
    s.seed = 43;
    CHECK_FALSE(generate(s).same_elements(a));
}

TEST_CASE("subgroup-plus-noise and exponent grids") {
    FamilySpec s;
    s.kind = FamilyKind::SubgroupPlusNoise;
    s.ctx = GroupCtx::mod_lattice(2, 8);
    s.basis = 4;
    s.noise = 1;
    s.seed = 7;
    FinSet X = generate(s);
    CHECK(X.size() >= 16);
    CHECK(is_symmetric(X));
    CHECK(contains_identity(X));

    FamilySpec g;
    g.kind = FamilyKind::ExponentGrid;
    g.ctx = GroupCtx::mod_lattice(5, 4);
    g.r = 1;
    FinSet grid = generate(g);
    CHECK(grid.size() == 81);
    CHECK(is_symmetric(grid));
}

TEST_CASE("corpora are registered, nonempty, and stable") {
    auto names = corpus_names();
    CHECK(names.size() == 4);
    auto paper = corpus("paper-examples");
    CHECK(paper.size() >= 12);
    auto again = corpus("paper-examples");
    REQUIRE(paper.size() == again.size());
    for (std::size_t i = 0; i < paper.size(); ++i) CHECK(paper[i].label() == again[i].label());

    auto sl2 = corpus("sl2-grid");
    std::set<std::uint64_t> ps;
    for (const auto& spec : sl2) ps.insert(spec.ctx->modulus());
    CHECK(ps == std::set<std::uint64_t>{5, 7, 11, 13});

    auto growth = corpus("growth-grid");
    CHECK(growth.size() >= 6);
    CHECK_THROWS_AS(corpus("nope"), ConfigError);
}

TEST_CASE("paper-examples corpus entries contain the identity; non-beatty ones are symmetric") {
    for (const auto& spec : corpus("paper-examples")) {
        FinSet X = generate(spec);
        CAPTURE(spec.label());
        CHECK(contains_identity(X));
        if (spec.kind != FamilyKind::Beatty) CHECK(is_symmetric(X));
    }
}
