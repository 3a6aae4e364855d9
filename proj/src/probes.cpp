#include "apxgrp/probes.hpp"

#include <algorithm>
#include <cmath>

#include "apxgrp/rng.hpp"

namespace apxgrp {

namespace {

constexpr std::size_t kExhaustiveTupleLimit = 1'000'000;

}  // namespace

ClosureResult group_closure(const FinSet& X, std::size_t max_size) {
    if (X.empty()) throw ConfigError("group_closure requires a nonempty set");
    ClosureResult out;

    // first application of Y -> symmetrize(Y) u Y.Y
    FinSet cur = set_union(symmetrize(X), product(X, X));
    if (cur.same_elements(X)) {
        out.closure = X;
        out.last_size = X.size();
        return out;
    }
    out.steps = 1;
    FinSet prev = X;
    // From here cur is symmetric with identity, so the map reduces to
    // Y -> Y.Y, grown incrementally through the fresh frontier.
    while (true) {
        if (cur.size() > max_size) {
            out.exceeded = true;
            out.last_size = cur.size();
            return out;
        }
        SetBuilder fb(X.ctx_ptr());
        for (std::size_t i = 0; i < cur.size(); ++i)
            if (!prev.contains_raw(cur.block(i))) fb.add_raw(cur.block(i));
        FinSet frontier = fb.take();
        FinSet next = cur;
        if (!frontier.empty()) {
            next = set_union(next, product(prev, frontier));
            next = set_union(next, product(frontier, prev));
            next = set_union(next, product(frontier, frontier));
        }
        if (next.same_elements(cur)) {
            out.closure = cur;
            out.last_size = cur.size();
            return out;
        }
        ++out.steps;
        prev = std::move(cur);
        cur = std::move(next);
    }
}

ProbeReport near_subgroup_probe(const FinSet& X) {
    if (X.empty()) throw ConfigError("near_subgroup_probe requires a nonempty set");
    ProbeReport rep;
    rep.kind = "near-subgroup";

    FinSet xinvx = product(inverse_set(X), X);
    FinSet S = product(xinvx, xinvx);
    FinSet SS = product(S, S);
    FinSet Sinv = inverse_set(S);

    rep.payload["card_x"] = X.size();
    rep.payload["card_s_candidate"] = S.size();

    const bool closed = SS.same_elements(S) && Sinv.same_elements(S);
    if (closed) {
        rep.verdict = "subgroup";
        auto K = greedy_cover_count(X, S, Side::Right, SIZE_MAX);
        rep.payload["coset_count"] = *K;
    } else {
        rep.verdict = "not-closed";
        rep.payload["defect"] = SS.size() - S.size();
        auto bad = first_pair_outside(S, S, PairOp::Product, S);
        if (bad)
            rep.witnesses = {S.ctx().format_raw(S.block(bad->first)), S.ctx().format_raw(S.block(bad->second))};
        else  // closure failed on the inverse side only
            rep.witnesses = {"inverse-set differs"};
    }
    // echo of the normalizer remark: does X normalize the candidate?
    bool normalized = !first_pair_outside(X, S, PairOp::Conjugation, S).has_value();
    rep.payload["normalized_by_x"] = normalized;
    return rep;
}

PerfStat perfectness_stat(const FinSet& X, std::size_t l, std::size_t m, std::size_t samples, std::uint64_t seed) {
    if (X.empty()) throw ConfigError("perfectness_stat requires a nonempty set");
    if (l < 1 || m < 1 || samples < 1) throw ConfigError("perfectness_stat needs l, m, samples >= 1");

    PerfStat st;
    st.seed = seed;
    const std::size_t cap = X.size();

    // conjugacy sets recur across tuples; cache them per element index
    std::vector<std::optional<FinSet>> conj_cache(X.size());
    auto conj_of = [&](std::size_t idx) -> const FinSet& {
        if (!conj_cache[idx]) conj_cache[idx] = conj_set(X.elem(idx), X);
        return *conj_cache[idx];
    };
    auto tuple_hits = [&](const std::vector<std::size_t>& idx) {
        FinSet acc = conj_of(idx[0]);
        for (std::size_t i = 1; i < idx.size(); ++i) {
            if (acc.size() >= cap) break;
            auto [next, capped] = product_capped(acc, conj_of(idx[i]), cap);
            acc = std::move(next);
            if (capped) break;
        }
        // |a_1^X ... a_l^X| >= |X|/m  as exact integers
        return acc.size() * m >= X.size();
    };

    double total = 0;
    std::uint64_t pow = 1;
    bool exhaustive = true;
    for (std::size_t i = 0; i < l; ++i) {
        if (pow > kExhaustiveTupleLimit / X.size()) {
            exhaustive = false;
            break;
        }
        pow *= X.size();
    }
    st.exhaustive = exhaustive && pow <= kExhaustiveTupleLimit;

    if (st.exhaustive) {
        std::vector<std::size_t> idx(l, 0);
        st.samples = pow;
        for (std::uint64_t t = 0; t < pow; ++t) {
            if (tuple_hits(idx)) ++st.hits;
            for (std::size_t j = l; j-- > 0;) {
                if (++idx[j] < X.size()) break;
                idx[j] = 0;
            }
        }
        total = static_cast<double>(pow);
        st.radius = 0;
    } else {
        st.samples = samples;
        std::vector<std::size_t> idx(l);
        for (std::size_t t = 0; t < samples; ++t) {
            CounterRng rng(seed, t);  // stream keyed by the tuple index
            for (std::size_t j = 0; j < l; ++j) idx[j] = rng.below(X.size(), j);
            if (tuple_hits(idx)) ++st.hits;
        }
        total = static_cast<double>(samples);
        double p = static_cast<double>(st.hits) / total;
        st.radius = 1.96 * std::sqrt(p * (1 - p) / total);
    }
    st.p_hat = static_cast<double>(st.hits) / total;
    return st;
}

WordDepthResult word_depth(const FinSet& X, std::span<const Elem> a_list, std::size_t n_max,
                           const WordDepthOptions& opts) {
    if (X.empty()) throw ConfigError("word_depth requires a nonempty set");
    if (a_list.empty()) throw ConfigError("word_depth requires at least one conjugating element");
    if (n_max < 1) throw ConfigError("word_depth requires n_max >= 1");
    const CtxPtr ctx = X.ctx_ptr();

    FinSet A(ctx);
    for (const auto& a : a_list) {
        A = set_union(A, conj_set(a, X));
        if (opts.use_inverses) A = set_union(A, conj_set(ctx->inv(a), X));
    }

    // words of length <= n over pool, always containing the empty word
    auto words_up_to = [&](const FinSet& pool, std::size_t n) {
        FinSet w = FinSet::of(ctx, {ctx->identity()});
        for (std::size_t k = 0; k < n; ++k) {
            FinSet next = set_union(w, product(w, pool));
            if (next.size() > opts.cap) throw BudgetError("word_depth intermediate word set exceeded the cap");
            if (next.same_elements(w)) break;
            w = std::move(next);
        }
        return w;
    };
    auto first_missing = [&](const FinSet& w) -> std::optional<Elem> {
        for (std::size_t i = 0; i < X.size(); ++i)
            if (!w.contains_raw(X.block(i))) return X.elem(i);
        return std::nullopt;
    };

    WordDepthResult out;
    for (std::size_t n = 1; n <= n_max; ++n) {
        std::vector<Elem> bs;
        FinSet pool = A;
        while (true) {
            FinSet w = words_up_to(pool, n);
            auto missing = first_missing(w);
            if (!missing) {
                out.d = n;
                out.b_chosen = bs;
                return out;
            }
            if (bs.size() >= a_list.size()) break;  // b_1..b_l exhausted at this depth
            bs.push_back(*missing);                 // greedy translate pick from X \ W_n
            pool = set_union(pool, FinSet::of(ctx, {*missing}));
        }
    }
    return out;
}

ProbeReport freiman_exponent_probe(const FinSet& X, std::size_t e_budget) {
    if (X.empty()) throw ConfigError("freiman_exponent_probe requires a nonempty set");
    if (!X.ctx().element_order_bound())
        throw ConfigError("freiman_exponent_probe requires a backend with a declared group exponent");
    ProbeReport rep;
    rep.kind = "freiman-exponent";
    rep.payload["exponent"] = *X.ctx().element_order_bound();
    rep.payload["card_x"] = X.size();

    FinSet xinvx = product(inverse_set(X), X);
    FinSet start = product(xinvx, xinvx);
    ClosureResult cl = group_closure(start, e_budget * X.size());
    rep.payload["closure_steps"] = cl.steps;
    if (cl.exceeded) {
        rep.verdict = "budget-exceeded";
        rep.payload["last_size"] = cl.last_size;
        return rep;
    }
    const FinSet& S = cl.closure;
    if (!product(S, S).same_elements(S) || !inverse_set(S).same_elements(S))
        throw InvariantError("group_closure returned a non-closed set");

    auto comm = commensurability(S, X, SIZE_MAX);
    rep.verdict = "subgroup";
    rep.payload["card_s"] = S.size();
    rep.payload["e"] = std::max(*comm.e_ab, *comm.e_ba);
    rep.payload["e_sx"] = *comm.e_ab;
    rep.payload["e_xs"] = *comm.e_ba;
    return rep;
}

}  // namespace apxgrp
