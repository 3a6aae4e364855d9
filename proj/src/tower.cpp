#include "apxgrp/tower.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace apxgrp {

namespace {

constexpr std::size_t kMaxWidth = 512;

// candidate evaluation skips the quadratic conjugation/commutator scans;
// run `verify_tower` with the full mask on the chosen seed for those
constexpr std::uint32_t kSeedSearchProperties =
    (1u << 1) | (1u << 2) | (1u << 3) | (1u << 6) | (1u << 7);

// x^4 of every element of X, aligned with X's element order.
std::vector<std::uint8_t> fourth_powers(const FinSet& X) {
    const GroupCtx& ctx = X.ctx();
    const std::size_t w = ctx.width();
    std::vector<std::uint8_t> out(X.size() * w);
    std::uint8_t sq[kMaxWidth];
    for (std::size_t i = 0; i < X.size(); ++i) {
        ctx.mul_raw(X.block(i), X.block(i), sq);
        ctx.mul_raw(sq, sq, out.data() + i * w);
    }
    return out;
}

FinSet filter_by_fourth_power(const FinSet& X1, const std::vector<std::uint8_t>& pow4, const FinSet& prev) {
    const std::size_t w = X1.ctx().width();
    SetBuilder b(X1.ctx_ptr());
    for (std::size_t i = 0; i < X1.size(); ++i)
        if (prev.contains_raw(pow4.data() + i * w)) b.add_raw(X1.block(i));
    return b.take();
}

bool is_identity_singleton(const FinSet& S) { return S.size() == 1 && contains_identity(S); }

std::vector<std::string> pair_witness(const GroupCtx& ctx, const FinSet& A, const FinSet& B,
                                      std::pair<std::size_t, std::size_t> ij) {
    return {ctx.format_raw(A.block(ij.first)), ctx.format_raw(B.block(ij.second))};
}

}  // namespace

std::string TowerCheck::key() const {
    std::ostringstream os;
    os << "p" << property;
    if (n) os << " n=" << n;
    if (m) os << " m=" << m;
    if (k) os << " k=" << k;
    return os.str();
}

bool TowerReport::all_pass() const {
    return nested_ok && std::all_of(checks.begin(), checks.end(), [](const TowerCheck& c) { return c.pass; });
}

bool TowerReport::property_passes(int property) const {
    bool any = false;
    for (const auto& c : checks) {
        if (c.property != property) continue;
        any = true;
        if (!c.pass) return false;
    }
    return any || nested_ok;
}

std::vector<FinSet> build_tower(const FinSet& X1, std::size_t N) {
    if (N < 1) throw ConfigError("tower depth must be >= 1");
    if (X1.empty()) throw ConfigError("tower seed must be nonempty");
    if (!is_symmetric(X1) || !contains_identity(X1))
        throw ConfigError("tower seed must be symmetric and contain the identity");

    std::vector<FinSet> levels;
    levels.push_back(X1);
    if (N == 1) return levels;

    const std::vector<std::uint8_t> pow4 = fourth_powers(X1);
    while (levels.size() < N) {
        FinSet next = filter_by_fourth_power(X1, pow4, levels.back());
        bool degenerate = is_identity_singleton(next);
        levels.push_back(std::move(next));
        if (degenerate) break;  // every further level repeats {identity}
    }
    return levels;
}

TowerReport verify_tower(std::span<const FinSet> levels, const TowerOptions& opts) {
    if (levels.empty()) throw ConfigError("verify_tower requires at least one level");
    const GroupCtx& ctx = levels[0].ctx();
    for (const auto& l : levels)
        if (!ctx.interoperable(l.ctx())) throw CtxMismatchError("tower levels use mixed group contexts");

    TowerReport rep;

    // nesting gate: on violation record the first bad level and truncate
    std::size_t usable = levels.size();
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        if (!levels[i + 1].subset_of(levels[i])) {
            rep.nested_ok = false;
            rep.truncated_at = i + 2;  // 1-based index of the violating level
            usable = i + 1;
            break;
        }
    }
    const std::span<const FinSet> L = levels.subspan(0, usable);
    const int N = static_cast<int>(L.size());
    rep.depth = L.size();
    rep.properties_checked = opts.property_mask;
    for (const auto& l : L) rep.level_sizes.push_back(l.size());
    const auto want = [&](int p) { return (opts.property_mask >> p) & 1u; };

    // (1) symmetry and identity per level
    for (int n = 1; want(1) && n <= N; ++n) {
        const FinSet& X = L[n - 1];
        TowerCheck c;
        c.property = 1;
        c.n = n;
        c.pass = true;
        std::uint8_t inv[kMaxWidth];
        for (std::size_t i = 0; i < X.size() && c.pass; ++i) {
            ctx.inv_raw(X.block(i), inv);
            if (!X.contains_raw(inv)) {
                c.pass = false;
                c.witness = {ctx.format_raw(X.block(i))};
            }
        }
        if (c.pass && !contains_identity(X)) {
            c.pass = false;
            c.witness = {"identity missing"};
        }
        rep.checks.push_back(std::move(c));
    }

    // (2) product nesting X_{n+1} X_{n+1} subset X_n
    for (int n = 1; want(2) && n < N; ++n) {
        TowerCheck c;
        c.property = 2;
        c.n = n;
        auto bad = first_pair_outside(L[n], L[n], PairOp::Product, L[n - 1]);
        c.pass = !bad;
        if (bad) c.witness = pair_witness(ctx, L[n], L[n], *bad);
        rep.checks.push_back(std::move(c));
    }

    // (3) covering constant per adjacent pair; c = max
    for (int n = 1; want(3) && n < N; ++n) {
        TowerCheck c;
        c.property = 3;
        c.n = n;
        auto cnt = greedy_cover_count(L[n - 1], L[n], Side::Right, opts.cover_budget);
        if (cnt) {
            c.pass = true;
            c.value = *cnt;
            rep.c = std::max(rep.c, *cnt);
        } else {
            c.pass = false;
            c.witness = {"cover budget exceeded"};
        }
        rep.checks.push_back(std::move(c));
    }

    // (4) conjugation stability a X_{n+1} a^-1 subset X_n for a in X_1
    for (int n = 1; want(4) && n < N; ++n) {
        TowerCheck c;
        c.property = 4;
        c.n = n;
        auto bad = first_pair_outside(L[0], L[n], PairOp::Conjugation, L[n - 1]);
        c.pass = !bad;
        if (bad) c.witness = pair_witness(ctx, L[0], L[n], *bad);
        rep.checks.push_back(std::move(c));
    }

    // (5) commutator depth gain [X_n, X_m] subset X_k for k <= N, k < n+m.
    // Checked from the deepest applicable k down; the first passing k settles
    // every shallower k (levels are nested).
    for (int n = 1; want(5) && n <= N; ++n) {
        for (int m = 1; m <= N; ++m) {
            int kmax = std::min(N, n + m - 1);
            bool settled_pass = false;
            for (int k = kmax; k >= 1; --k) {
                TowerCheck c;
                c.property = 5;
                c.n = n;
                c.m = m;
                c.k = k;
                if (settled_pass) {
                    c.pass = true;
                } else {
                    auto bad = first_pair_outside(L[n - 1], L[m - 1], PairOp::Commutator, L[k - 1]);
                    c.pass = !bad;
                    if (bad)
                        c.witness = pair_witness(ctx, L[n - 1], L[m - 1], *bad);
                    else
                        settled_pass = true;
                }
                rep.checks.push_back(std::move(c));
            }
        }
    }

    // (6) the x^4 recursion reproduces each level from X_1
    if (want(6)) {
        const std::vector<std::uint8_t> pow4 = fourth_powers(L[0]);
        for (int n = 1; n < N; ++n) {
            TowerCheck c;
            c.property = 6;
            c.n = n + 1;
            FinSet derived = filter_by_fourth_power(L[0], pow4, L[n - 1]);
            c.pass = derived.same_elements(L[n]);
            if (!c.pass) {
                // one witness from the symmetric difference
                for (std::size_t i = 0; i < derived.size() && c.witness.empty(); ++i)
                    if (!L[n].contains_raw(derived.block(i))) c.witness = {ctx.format_raw(derived.block(i))};
                for (std::size_t i = 0; i < L[n].size() && c.witness.empty(); ++i)
                    if (!derived.contains_raw(L[n].block(i))) c.witness = {ctx.format_raw(L[n].block(i))};
            }
            rep.checks.push_back(std::move(c));
        }
    }

    // (7) square roots merge into the deepest level: x,y in X_m, x^2 = y^2
    // implies x y^-1 in X_N
    if (want(7)) {
        std::vector<int> ms;
        if (opts.check7_all_m) {
            for (int m = 2; m <= N; ++m) ms.push_back(m);
        } else if (N >= 2) {
            ms.push_back(2);
        }
        const FinSet& deepest = L[N - 1];
        for (int m : ms) {
            const FinSet& X = L[m - 1];
            TowerCheck c;
            c.property = 7;
            c.m = m;
            c.pass = true;
            std::map<std::string, std::vector<std::size_t>> by_square;
            std::uint8_t sq[kMaxWidth];
            for (std::size_t i = 0; i < X.size(); ++i) {
                ctx.mul_raw(X.block(i), X.block(i), sq);
                by_square[std::string(reinterpret_cast<char*>(sq), ctx.width())].push_back(i);
            }
            std::uint8_t yinv[kMaxWidth], prod[kMaxWidth];
            for (const auto& [_, bucket] : by_square) {
                for (std::size_t a : bucket) {
                    for (std::size_t b : bucket) {
                        ctx.inv_raw(X.block(b), yinv);
                        ctx.mul_raw(X.block(a), yinv, prod);
                        if (!deepest.contains_raw(prod)) {
                            c.pass = false;
                            c.witness = {ctx.format_raw(X.block(a)), ctx.format_raw(X.block(b))};
                            break;
                        }
                    }
                    if (!c.pass) break;
                }
                if (!c.pass) break;
            }
            rep.checks.push_back(std::move(c));
        }
    }

    // ambient extras: e and the derived-square seed flag
    if (opts.ambient && !opts.ambient->empty()) {
        const FinSet& X = *opts.ambient;
        const std::size_t cap = 200'000'000;
        if (X.size() * X.size() <= cap) {
            FinSet xinvx = product(inverse_set(X), X);
            auto a = greedy_cover_count(xinvx, L[0], Side::Right, 100000);
            auto b = greedy_cover_count(L[0], xinvx, Side::Right, 100000);
            if (a && b) rep.e = std::max(*a, *b);
            if (xinvx.size() * xinvx.size() <= cap) {
                FinSet dsq = product(xinvx, xinvx);
                rep.seed_in_derived_square = L[0].subset_of(dsq);
            }
        }
    }

    return rep;
}

// ---------------------------------------------------------------------------
// Seed search
// ---------------------------------------------------------------------------

namespace {

struct Candidate {
    std::string desc;
    FinSet set;
    bool skipped = false;
};

std::int64_t load_i64(const std::uint8_t* in) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    return static_cast<std::int64_t>(u);
}

std::int64_t max_abs_coord(const FinSet& X) {
    std::int64_t m = 0;
    const int d = X.ctx().kind() == Backend::Heisenberg ? 2 : X.ctx().dim();  // skip the Heisenberg z coord
    for (std::size_t i = 0; i < X.size(); ++i)
        for (int j = 0; j < d; ++j) m = std::max(m, std::abs(load_i64(X.block(i) + 8 * j)));
    return m;
}

FinSet lattice_box(const CtxPtr& ctx, std::int64_t radius) {
    FinSet box;
    std::vector<std::uint8_t> blocks;
    const int d = ctx->dim();
    const std::size_t w = ctx->width();
    std::vector<std::int64_t> c(static_cast<std::size_t>(d), -radius);
    std::uint64_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::uint64_t>(2 * radius + 1);
    blocks.resize(total * w);
    for (std::uint64_t i = 0; i < total; ++i) {
        for (int j = 0; j < d; ++j) {
            auto v = static_cast<std::uint64_t>(c[j]);
            for (int b = 0; b < 8; ++b) blocks[i * w + 8 * j + b] = static_cast<std::uint8_t>(v >> (8 * b));
        }
        for (int j = d - 1; j >= 0; --j) {
            if (++c[j] <= radius) break;
            c[j] = -radius;
        }
    }
    return FinSet::from_blocks(ctx, std::move(blocks));
}

FinSet heis_box_sym(const CtxPtr& ctx, std::int64_t r) {
    std::vector<std::uint8_t> blocks;
    const std::size_t w = 24;
    blocks.reserve(static_cast<std::size_t>((2 * r + 1) * (2 * r + 1) * (2 * r * r + 1)) * w);
    auto push = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
        std::uint8_t raw[24];
        std::int64_t v[3] = {x, y, z};
        for (int j = 0; j < 3; ++j) {
            auto u = static_cast<std::uint64_t>(v[j]);
            for (int b = 0; b < 8; ++b) raw[8 * j + b] = static_cast<std::uint8_t>(u >> (8 * b));
        }
        blocks.insert(blocks.end(), raw, raw + 24);
    };
    for (std::int64_t x = -r; x <= r; ++x)
        for (std::int64_t y = -r; y <= r; ++y)
            for (std::int64_t z = -r * r; z <= r * r; ++z) push(x, y, z);
    return symmetrize(FinSet::from_blocks(ctx, std::move(blocks)));
}

}  // namespace

SeedSearchResult seed_search(const FinSet& X, SeedFamily family, std::size_t budget, const SeedSearchOptions& opts) {
    if (X.empty()) throw ConfigError("seed_search requires a nonempty set");
    if (!is_symmetric(X) || !contains_identity(X))
        throw ConfigError("seed_search input must be symmetric and contain the identity; symmetrize first");
    if (budget < 1) throw ConfigError("seed_search budget must be >= 1");
    if (family == SeedFamily::UserList && opts.user_list.empty())
        throw ConfigError("seed_search user-list family is empty");

    const CtxPtr ctx = X.ctx_ptr();
    std::vector<Candidate> pool;

    auto add = [&](std::string desc, FinSet s) {
        if (!is_symmetric(s) || !contains_identity(s)) s = symmetrize(s);
        pool.push_back({std::move(desc), std::move(s), false});
    };

    if (family != SeedFamily::UserList) {
        // derived square (X^-1 X)^2 plus shrunk subsets, when affordable
        const std::size_t nx = X.size();
        if (nx * nx <= opts.work_cap_pairs) {
            FinSet xinvx = product(inverse_set(X), X);
            if (xinvx.size() * xinvx.size() <= opts.work_cap_pairs) {
                FinSet d0 = product(xinvx, xinvx);
                const std::vector<std::uint8_t> pow4 = fourth_powers(d0);
                FinSet s1 = filter_by_fourth_power(d0, pow4, d0);
                FinSet s2;
                {
                    const std::vector<std::uint8_t> p2 = fourth_powers(s1);
                    s2 = filter_by_fourth_power(s1, p2, s1);
                }
                add("derived-square", std::move(d0));
                if (!s1.empty()) add("derived-square-shrunk1", std::move(s1));
                if (!s2.empty()) add("derived-square-shrunk2", std::move(s2));
            } else {
                pool.push_back({"derived-square", FinSet(ctx), true});
            }
        } else {
            pool.push_back({"derived-square", FinSet(ctx), true});
        }
    }

    if (family == SeedFamily::Dilates || family == SeedFamily::CayleyBalls) {
        switch (ctx->kind()) {
            case Backend::IntLattice: {
                std::int64_t m0 = std::max<std::int64_t>(1, max_abs_coord(X));
                for (std::int64_t mult : {1, 2, 4})
                    add("dilate-box r=" + std::to_string(m0 * mult), lattice_box(ctx, m0 * mult));
                break;
            }
            case Backend::Heisenberg: {
                std::int64_t r0 = std::max<std::int64_t>(1, max_abs_coord(X));
                for (std::int64_t mult : {1, 2})
                    add("dilate-heis-box r=" + std::to_string(r0 * mult), heis_box_sym(ctx, r0 * mult));
                break;
            }
            default: {
                // ball family from the first few non-identity elements of X
                std::vector<Elem> gens;
                for (std::size_t i = 0; i < X.size() && gens.size() < 4; ++i)
                    if (!ctx->is_identity_raw(X.block(i))) gens.push_back(X.elem(i));
                if (!gens.empty()) {
                    FinSet step = symmetrize(FinSet::of(ctx, gens));
                    FinSet ball = step;
                    for (std::size_t r = 1; r <= 3; ++r) {
                        add("ball radius=" + std::to_string(r), ball);
                        if (ball.size() * step.size() > opts.work_cap_pairs) break;
                        ball = product(ball, step);
                    }
                }
                break;
            }
        }
    }
    if (family == SeedFamily::UserList)
        for (std::size_t i = 0; i < opts.user_list.size(); ++i)
            add("user-" + std::to_string(i), opts.user_list[i]);

    if (pool.empty()) throw ConfigError("seed_search produced no candidates");

    // affordable commensurability reference for the tie-break
    FinSet ref = X;
    if (X.size() * X.size() <= opts.work_cap_pairs) ref = product(inverse_set(X), X);

    SeedSearchResult result;
    std::size_t best = SIZE_MAX;
    for (auto& cand : pool) {
        SeedCandidateOutcome row;
        row.desc = cand.desc;
        row.skipped = cand.skipped;
        if (!cand.skipped) {
            auto levels = build_tower(cand.set, budget);
            TowerOptions eval_opts;
            eval_opts.property_mask = kSeedSearchProperties;
            TowerReport rep = verify_tower(levels, eval_opts);
            // verified depth: longest prefix where (1) holds per level and (2)
            // per adjacent pair
            std::size_t depth = levels.size();
            for (const auto& chk : rep.checks) {
                if (chk.pass) continue;
                if (chk.property == 1) depth = std::min(depth, static_cast<std::size_t>(chk.n) - 1);
                if (chk.property == 2) depth = std::min(depth, static_cast<std::size_t>(chk.n));
            }
            row.verified_depth = depth;
            row.c = rep.c;
            auto ea = greedy_cover_count(ref, cand.set, Side::Right, 100000);
            auto eb = greedy_cover_count(cand.set, ref, Side::Right, 100000);
            row.e = ea && eb ? std::max(*ea, *eb) : SIZE_MAX;

            bool better = false;
            if (best == SIZE_MAX) {
                better = true;
            } else {
                const auto& have = result.candidates[best];
                better = row.verified_depth > have.verified_depth ||
                         (row.verified_depth == have.verified_depth &&
                          (row.c < have.c || (row.c == have.c && row.e < have.e)));
            }
            if (better) {
                best = result.candidates.size();
                result.seed = cand.set;
                result.chosen = cand.desc;
            }
        }
        result.candidates.push_back(std::move(row));
    }
    if (best == SIZE_MAX) throw BudgetError("every seed candidate exceeded the work cap");

    TowerOptions final_opts;
    final_opts.ambient = &X;
    final_opts.property_mask = kSeedSearchProperties;
    result.report = verify_tower(build_tower(result.seed, budget), final_opts);
    return result;
}

}  // namespace apxgrp
