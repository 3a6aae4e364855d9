#include "apxgrp/covering.hpp"

#include <algorithm>
#include <cstring>
#include <functional>

namespace apxgrp {

namespace {

constexpr std::size_t kMaxWidth = 512;

void require_same_ctx(const FinSet& A, const FinSet& B) {
    if (!A.ctx().interoperable(B.ctx()))
        throw CtxMismatchError("operands belong to different group contexts (" + A.ctx().describe() + " vs " +
                               B.ctx().describe() + ")");
}

}  // namespace

std::vector<Elem> disjoint_translates(const FinSet& Z, const FinSet& W) {
    require_same_ctx(Z, W);
    if (Z.empty() || W.empty()) throw ConfigError("disjoint_translates requires nonempty sets");
    const GroupCtx& ctx = Z.ctx();
    const std::size_t w = ctx.width();

    std::vector<Elem> chosen;
    FinSet used(Z.ctx_ptr());  // union of the accepted translates Z.a_i
    std::uint8_t prod[kMaxWidth];

    for (std::size_t i = 0; i < W.size(); ++i) {
        const std::uint8_t* a = W.block(i);
        bool disjoint = true;
        for (std::size_t j = 0; j < Z.size() && disjoint; ++j) {
            ctx.mul_raw(Z.block(j), a, prod);
            if (used.contains_raw(prod)) disjoint = false;
        }
        if (!disjoint) continue;
        Elem e;
        e.enc.assign(reinterpret_cast<const char*>(a), w);
        chosen.push_back(std::move(e));
        std::vector<std::uint8_t> fresh(Z.size() * w);
        for (std::size_t j = 0; j < Z.size(); ++j) ctx.mul_raw(Z.block(j), a, fresh.data() + j * w);
        used = set_union(used, FinSet::from_blocks(Z.ctx_ptr(), std::move(fresh)));
    }
    return chosen;
}

CoverResult ruzsa_cover(const FinSet& W, const FinSet& Z, Side side) {
    require_same_ctx(W, Z);
    if (Z.empty() || W.empty()) throw ConfigError("ruzsa_cover requires nonempty sets");
    const GroupCtx& ctx = Z.ctx();

    CoverResult out;
    out.side = side;
    out.target_desc = "target(card=" + std::to_string(W.size()) + ")";

    FinSet zw(Z.ctx_ptr());
    if (side == Side::Right) {
        out.translates = disjoint_translates(Z, W);
        out.tile = product(inverse_set(Z), Z);
        out.tile_desc = "Z^-1 Z";
        zw = product(Z, W);
    } else {
        // mirror: maximal family a_i . Z pairwise disjoint, cover by a_i . Z Z^-1
        FinSet zi = inverse_set(Z);
        FinSet wi = inverse_set(W);
        auto mirrored = disjoint_translates(zi, wi);
        for (const auto& e : mirrored) out.translates.push_back(ctx.inv(e));
        out.tile = product(Z, zi);
        out.tile_desc = "Z Z^-1";
        zw = product(W, Z);
    }
    out.count = out.translates.size();
    out.certified_bound = Ratio{zw.size(), Z.size()};

    if (out.count * Z.size() > zw.size())
        throw InvariantError("ruzsa cover count exceeds the |ZW|/|Z| certificate");

    // verify the covering union element by element
    std::uint8_t t[kMaxWidth];
    for (std::size_t i = 0; i < W.size(); ++i) {
        bool hit = false;
        for (const auto& a : out.translates) {
            const auto* araw = reinterpret_cast<const std::uint8_t*>(a.enc.data());
            std::uint8_t ainv[kMaxWidth];
            ctx.inv_raw(araw, ainv);
            if (side == Side::Right)
                ctx.mul_raw(W.block(i), ainv, t);  // w a^-1 in tile  <=>  w in tile.a
            else
                ctx.mul_raw(ainv, W.block(i), t);  // a^-1 w in tile  <=>  w in a.tile
            if (out.tile.contains_raw(t)) {
                hit = true;
                break;
            }
        }
        if (!hit) throw InvariantError("ruzsa cover failed to cover the target set");
    }
    out.verified = true;
    return out;
}

std::optional<std::size_t> greedy_cover_count(const FinSet& target, const FinSet& tile, Side side,
                                              std::size_t budget) {
    require_same_ctx(target, tile);
    if (tile.empty()) throw ConfigError("cannot cover with an empty tile");
    if (target.empty()) return 0;
    const GroupCtx& ctx = target.ctx();
    const std::size_t w = ctx.width();

    std::uint8_t anchor_inv[kMaxWidth];
    ctx.inv_raw(tile.block(0), anchor_inv);  // canonical-least tile element

    std::vector<bool> covered(target.size(), false);
    std::size_t count = 0;
    std::uint8_t t[kMaxWidth], prod[kMaxWidth];
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (covered[i]) continue;
        if (++count > budget) return std::nullopt;
        if (side == Side::Right)
            ctx.mul_raw(anchor_inv, target.block(i), t);  // a = tile_min . t
        else
            ctx.mul_raw(target.block(i), anchor_inv, t);  // a = t . tile_min
        for (std::size_t j = 0; j < tile.size(); ++j) {
            if (side == Side::Right)
                ctx.mul_raw(tile.block(j), t, prod);
            else
                ctx.mul_raw(t, tile.block(j), prod);
            if (auto idx = target.index_of(prod)) covered[*idx] = true;
        }
        (void)w;
    }
    return count;
}

Commensurability commensurability(const FinSet& A, const FinSet& B, std::size_t budget) {
    require_same_ctx(A, B);
    Commensurability out;
    out.e_ab = greedy_cover_count(A, B, Side::Right, budget);
    out.e_ba = greedy_cover_count(B, A, Side::Right, budget);
    return out;
}

ApproxConstant approx_constant(const FinSet& X) {
    if (X.empty()) throw ConfigError("approx_constant requires a nonempty set");
    if (!is_symmetric(X) || !contains_identity(X))
        throw ConfigError("approx_constant requires a symmetric set containing the identity; symmetrize first");
    ApproxConstant out;
    FinSet xx = product(X, X);
    out.card_xx = xx.size();
    out.k_lower = Ratio{xx.size(), X.size()};
    auto upper = greedy_cover_count(xx, X, Side::Right, SIZE_MAX);
    out.k_upper = *upper;
    return out;
}

std::optional<std::size_t> exact_cover_count(const FinSet& target, const FinSet& tile, Side side,
                                             std::size_t node_budget) {
    require_same_ctx(target, tile);
    if (tile.size() > 64 || target.size() > 4096)
        throw ConfigError("exact cover search is limited to |tile| <= 64 and |target| <= 4096");
    if (target.empty()) return 0;
    const GroupCtx& ctx = target.ctx();

    // candidate translates: all t with some target element inside the placed tile
    const std::size_t words = (target.size() + 63) / 64;
    std::vector<std::vector<std::uint64_t>> masks;
    {
        SetBuilder cand(target.ctx_ptr());
        std::uint8_t sinv[kMaxWidth], t[kMaxWidth];
        for (std::size_t j = 0; j < tile.size(); ++j) {
            ctx.inv_raw(tile.block(j), sinv);
            for (std::size_t i = 0; i < target.size(); ++i) {
                if (side == Side::Right)
                    ctx.mul_raw(sinv, target.block(i), t);  // a = s.t  =>  t = s^-1 a
                else
                    ctx.mul_raw(target.block(i), sinv, t);  // a = t.s  =>  t = a s^-1
                cand.add_raw(t);
            }
        }
        FinSet translates = cand.take();
        std::uint8_t prod[kMaxWidth];
        for (std::size_t c = 0; c < translates.size(); ++c) {
            std::vector<std::uint64_t> mask(words, 0);
            for (std::size_t j = 0; j < tile.size(); ++j) {
                if (side == Side::Right)
                    ctx.mul_raw(tile.block(j), translates.block(c), prod);
                else
                    ctx.mul_raw(translates.block(c), tile.block(j), prod);
                if (auto idx = target.index_of(prod)) mask[*idx / 64] |= 1ull << (*idx % 64);
            }
            masks.push_back(std::move(mask));
        }
        std::sort(masks.begin(), masks.end());
        masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    }

    std::vector<std::uint64_t> full(words, ~0ull);
    if (target.size() % 64) full[words - 1] = (1ull << (target.size() % 64)) - 1;

    std::size_t best = SIZE_MAX;
    std::size_t nodes = 0;
    bool exhausted = false;

    // branch over covers of the lowest uncovered element
    auto lowest = [&](const std::vector<std::uint64_t>& cov) -> std::size_t {
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t rem = full[w] & ~cov[w];
            if (rem) return w * 64 + static_cast<std::size_t>(__builtin_ctzll(rem));
        }
        return SIZE_MAX;
    };

    std::function<void(std::vector<std::uint64_t>&, std::size_t)> rec = [&](std::vector<std::uint64_t>& cov,
                                                                            std::size_t used) {
        if (exhausted || used >= best) return;
        if (++nodes > node_budget) {
            exhausted = true;
            return;
        }
        std::size_t pick = lowest(cov);
        if (pick == SIZE_MAX) {
            best = used;
            return;
        }
        for (const auto& m : masks) {
            if (!(m[pick / 64] >> (pick % 64) & 1)) continue;
            std::vector<std::uint64_t> next(words);
            for (std::size_t w = 0; w < words; ++w) next[w] = cov[w] | m[w];
            rec(next, used + 1);
        }
    };
    std::vector<std::uint64_t> cov(words, 0);
    rec(cov, 0);
    if (exhausted) return std::nullopt;
    return best;
}

}  // namespace apxgrp
