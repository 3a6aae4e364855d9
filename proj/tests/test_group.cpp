#include <doctest.h>

#include <array>
#include <map>
#include <set>
#include <vector>

#include "apxgrp/families.hpp"
#include "apxgrp/group.hpp"
#include "apxgrp/rng.hpp"

using namespace apxgrp;

namespace {

// Independent permutation oracle: explicit function application on images.
using Perm = std::vector<int>;

Perm oracle_compose(const Perm& s, const Perm& t) {  // (s.t)(i) = s(t(i))
    Perm out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[t[i]];
    return out;
}

std::vector<Perm> all_perms(int n) {
    Perm base(n);
    for (int i = 0; i < n; ++i) base[i] = i;
    std::vector<Perm> out;
    do {
        out.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    return out;
}

Elem elem_of_perm(const GroupCtx& ctx, const Perm& p) {
    Elem e;
    for (int v : p) e.enc.push_back(static_cast<char>(v));
    ctx.validate(e);
    return e;
}

// Independent Heisenberg oracle: 3x3 unitriangular integer matrices.
using Mat3 = std::array<std::array<long long, 3>, 3>;

Mat3 to_mat3(long long x, long long y, long long z) {
    return {{{1, x, z}, {0, 1, y}, {0, 0, 1}}};
}

Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            long long acc = 0;
            for (int k = 0; k < 3; ++k) acc += a[i][k] * b[k][j];
            out[i][j] = acc;
        }
    return out;
}

Elem heis_elem(const GroupCtx& ctx, long long x, long long y, long long z) {
    return ctx.parse("(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(z) + ")");
}

std::array<long long, 3> heis_coords(const GroupCtx& ctx, const Elem& e) {
    std::string txt = ctx.format(e);  // "(x,y,z)"
    std::array<long long, 3> out{};
    std::sscanf(txt.c_str(), "(%lld,%lld,%lld)", &out[0], &out[1], &out[2]);
    return out;
}

}  // namespace

TEST_CASE("symmetric group matches the exhaustive composition oracle") {
    auto ctx = GroupCtx::symmetric(3);
    auto perms = all_perms(3);
    REQUIRE(perms.size() == 6);
    for (const auto& s : perms) {
        for (const auto& t : perms) {
            Elem got = ctx->mul(elem_of_perm(*ctx, s), elem_of_perm(*ctx, t));
            CHECK(got == elem_of_perm(*ctx, oracle_compose(s, t)));
        }
    }
    // (12).(123) = (23) under right-to-left application
    Elem a = ctx->parse("(1 2)");
    Elem b = ctx->parse("(1 2 3)");
    CHECK(ctx->format(ctx->mul(a, b)) == "(2 3)");
}

TEST_CASE("heisenberg operations match the unitriangular matrix oracle") {
    auto ctx = GroupCtx::heisenberg();
    // (1,0,0).(0,1,0) = (1,1,1)
    CHECK(ctx->format(ctx->mul(heis_elem(*ctx, 1, 0, 0), heis_elem(*ctx, 0, 1, 0))) == "(1,1,1)");

    CounterRng rng(2024, 1);
    for (std::uint64_t i = 0; i < 500; ++i) {
        long long x1 = rng.window(50, 6 * i), y1 = rng.window(50, 6 * i + 1), z1 = rng.window(50, 6 * i + 2);
        long long x2 = rng.window(50, 6 * i + 3), y2 = rng.window(50, 6 * i + 4), z2 = rng.window(50, 6 * i + 5);
        Mat3 expect = mat3_mul(to_mat3(x1, y1, z1), to_mat3(x2, y2, z2));
        auto got = heis_coords(*ctx, ctx->mul(heis_elem(*ctx, x1, y1, z1), heis_elem(*ctx, x2, y2, z2)));
        CHECK(got[0] == expect[0][1]);
        CHECK(got[1] == expect[1][2]);
        CHECK(got[2] == expect[0][2]);
        // inverse against the matrix inverse of a unitriangular matrix
        auto inv = heis_coords(*ctx, ctx->inv(heis_elem(*ctx, x1, y1, z1)));
        CHECK(inv[0] == -x1);
        CHECK(inv[1] == -y1);
        CHECK(inv[2] == -z1 + x1 * y1);
    }
}

TEST_CASE("sl2 inverse follows the adjugate and verifies by multiplication") {
    auto ctx = GroupCtx::sl2(5);
    Elem u = ctx->parse("[[1,1],[0,1]]");
    CHECK(ctx->format(ctx->inv(u)) == "[[1,4],[0,1]]");

    CounterRng rng(7, 3);
    for (std::uint64_t i = 0; i < 2000; ++i) {
        Elem g = random_elem(*ctx, rng, i, 0);
        CHECK(ctx->mul(g, ctx->inv(g)) == ctx->identity());
        CHECK(ctx->inv(ctx->inv(g)) == g);
    }
}

TEST_CASE("identity elements") {
    CHECK(GroupCtx::integer_lattice(3)->format(GroupCtx::integer_lattice(3)->identity()) == "(0,0,0)");
    CHECK(GroupCtx::symmetric(4)->format(GroupCtx::symmetric(4)->identity()) == "()");
    CHECK(GroupCtx::sl2(7)->format(GroupCtx::sl2(7)->identity()) == "[[1,0],[0,1]]");
    auto ctx = GroupCtx::mod_lattice(12, 2);
    CounterRng rng(11, 0);
    for (std::uint64_t i = 0; i < 100; ++i) {
        Elem g = random_elem(*ctx, rng, i, 0);
        CHECK(ctx->mul(ctx->identity(), g) == g);
        CHECK(ctx->mul(g, ctx->identity()) == g);
    }
}

TEST_CASE("associativity and inverse laws sampled per backend") {
    std::vector<CtxPtr> backends = {
        GroupCtx::integer_lattice(3),
        GroupCtx::mod_lattice(12, 2),
        GroupCtx::symmetric(6),
        GroupCtx::sl2(7),
        GroupCtx::gl2(5),
        GroupCtx::heisenberg(),
        GroupCtx::cayley({"ab", {}, 48}),
        GroupCtx::cayley({"a", {{"aa", "A"}, {"AA", "a"}}, 16}),  // cyclic of order 3
    };
    for (const auto& ctx : backends) {
        CAPTURE(ctx->describe());
        CounterRng rng(99, 5);
        const std::uint64_t trials = 10000;
        for (std::uint64_t i = 0; i < trials; ++i) {
            Elem a = random_elem(*ctx, rng, 3 * i, 40);
            Elem b = random_elem(*ctx, rng, 3 * i + 1, 40);
            Elem c = random_elem(*ctx, rng, 3 * i + 2, 40);
            // associativity, and canonical encodings agree across orders
            REQUIRE(ctx->mul(ctx->mul(a, b), c).enc == ctx->mul(a, ctx->mul(b, c)).enc);
            if (i % 10 == 0) {
                REQUIRE(ctx->mul(a, ctx->inv(a)) == ctx->identity());
                REQUIRE(ctx->inv(ctx->inv(a)) == a);
            }
        }
    }
}

TEST_CASE("canonical encodings are independent of the construction route") {
    auto s5 = GroupCtx::symmetric(5);
    CHECK(s5->parse("(1 2)(3 4 5)").enc == s5->parse("(3 4 5)(1 2)").enc);
    CHECK(s5->parse("(1 2)(1 2)").enc == s5->identity().enc);
    auto sl2 = GroupCtx::sl2(5);
    CHECK(sl2->parse("[[6,1],[0,6]]").enc == sl2->parse("[[1,1],[0,1]]").enc);
    auto mod = GroupCtx::mod_lattice(10, 1);
    CHECK(mod->parse("(-3)").enc == mod->parse("(7)").enc);
}

TEST_CASE("literal parsing errors and validation") {
    auto sl2 = GroupCtx::sl2(5);
    CHECK_THROWS_AS(sl2->parse("[[1,1],[1,1]]"), EncodingError);  // det 0
    CHECK_THROWS_AS(sl2->parse("[[1,1],[0,1]"), ConfigError);
    auto s4 = GroupCtx::symmetric(4);
    CHECK_THROWS_AS(s4->parse("(1 5)"), ConfigError);
    CHECK_THROWS_AS(s4->parse("(1 1)"), ConfigError);
    auto lat = GroupCtx::integer_lattice(2);
    CHECK_THROWS_AS(lat->parse("(1)"), ConfigError);
    CHECK_THROWS_AS(lat->parse("(1,2,3)"), ConfigError);
    CHECK_THROWS_AS(GroupCtx::sl2(4), ConfigError);       // not prime
    CHECK_THROWS_AS(GroupCtx::mod_lattice(0, 1), ConfigError);
    CHECK_THROWS_AS(GroupCtx::integer_lattice(0), ConfigError);
}

TEST_CASE("cayley backend: rewriting, rejection, and word limits") {
    // free group on two generators
    auto f2 = GroupCtx::cayley({"ab", {}, 8});
    Elem w = f2->mul(f2->parse("ab"), f2->parse("BA"));
    CHECK(f2->format(w) == "1");
    CHECK(f2->format(f2->inv(f2->parse("ab"))) == "BA");

    // cyclic of order three via the shortlex-reducing rule aa -> A
    auto z3 = GroupCtx::cayley({"a", {{"aa", "A"}, {"AA", "a"}}, 8});
    CHECK(z3->format(z3->mul(z3->parse("a"), z3->parse("a"))) == "A");
    CHECK(z3->format(z3->mul(z3->parse("a"), z3->parse("A"))) == "1");
    CHECK(z3->mul(z3->mul(z3->parse("a"), z3->parse("a")), z3->parse("a")) == z3->identity());

    // non-reducing rules are rejected outright
    CHECK_THROWS_AS(GroupCtx::cayley({"a", {{"A", "aa"}}, 8}), ConfigError);
    // non-confluent system: ab -> 1 clashes with the free cancellations
    CHECK_THROWS_AS(GroupCtx::cayley({"ab", {{"ab", ""}}, 8}), ConfigError);

    // word growth beyond max_word is a hard error
    auto tight = GroupCtx::cayley({"ab", {}, 4});
    Elem cur = tight->parse("abab");
    CHECK_THROWS_AS(tight->mul(cur, tight->parse("a")), OverflowError);
}

TEST_CASE("lattice and heisenberg coordinates overflow loudly") {
    auto lat = GroupCtx::integer_lattice(1);
    Elem big = lat->parse("(9223372036854775807)");
    CHECK_THROWS_AS(lat->mul(big, lat->parse("(1)")), OverflowError);
    auto heis = GroupCtx::heisenberg();
    Elem h = heis->parse("(3037000500,3037000500,0)");
    CHECK_THROWS_AS(heis->mul(h, h), OverflowError);
}

TEST_CASE("descriptor round trip preserves structural identity") {
    std::vector<CtxPtr> backends = {
        GroupCtx::integer_lattice(2),
        GroupCtx::mod_lattice(35, 1),
        GroupCtx::symmetric(5),
        GroupCtx::sl2(11),
        GroupCtx::gl2(7),
        GroupCtx::heisenberg(),
        GroupCtx::cayley({"ab", {}, 32}),
        GroupCtx::cayley({"a", {{"aa", "A"}, {"AA", "a"}}, 16}),
        GroupCtx::with_exponent(GroupCtx::mod_lattice(2, 8), 2),
    };
    for (const auto& ctx : backends) {
        auto back = GroupCtx::from_descriptor(ctx->describe());
        CAPTURE(ctx->describe());
        CHECK(ctx->interoperable(*back));
        CHECK(back->describe() == ctx->describe());
    }
    CHECK_FALSE(GroupCtx::sl2(5)->interoperable(*GroupCtx::sl2(7)));
    CHECK_FALSE(GroupCtx::integer_lattice(2)->interoperable(*GroupCtx::integer_lattice(3)));
}
