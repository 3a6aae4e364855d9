#include "apxgrp/dimcmp.hpp"

#include <algorithm>
#include <cmath>

#include "apxgrp/parallel.hpp"

namespace apxgrp {

namespace {

void load_matrix(const FinSet& G, std::size_t i, int rbytes, std::uint64_t m[4]) {
    const std::uint8_t* raw = G.block(i);
    for (int j = 0; j < 4; ++j) {
        std::uint64_t v = 0;
        for (int b = 0; b < rbytes; ++b) v |= static_cast<std::uint64_t>(raw[rbytes * j + b]) << (8 * b);
        m[j] = v;
    }
}

int residue_bytes(const GroupCtx& ctx) { return static_cast<int>(ctx.width() / 4); }

void require_matrix_backend(const FinSet& G) {
    if (G.ctx().kind() != Backend::SL2 && G.ctx().kind() != Backend::GL2)
        throw ConfigError("variety operations require the SL2/GL2 backend");
}

}  // namespace

std::string VarietySpec::display() const {
    if (name == "trace") return "trace=" + std::to_string(trace);
    return name;
}

std::vector<VarietySpec> builtin_varieties() {
    return {
        {"torus", 1, 1, 0}, {"unipotent", 1, 1, 0},        {"borel", 2, 1, 0},
        {"torus-normalizer", 1, 2, 0}, {"trace", 2, 1, 0}, {"center", 0, 2, 0},
    };
}

VarietySpec variety_by_name(std::string_view name) {
    std::string base(name);
    std::int64_t trace = 0;
    if (auto eq = base.find('='); eq != std::string::npos) {
        trace = std::stoll(base.substr(eq + 1));
        base = base.substr(0, eq);
    }
    for (auto& v : builtin_varieties()) {
        if (v.name == base) {
            VarietySpec out = v;
            out.trace = trace;
            return out;
        }
    }
    throw ConfigError("unknown variety '" + std::string(name) + "'");
}

bool variety_contains(const VarietySpec& z, std::uint64_t p, const std::uint64_t m[4]) {
    const std::uint64_t a = m[0], b = m[1], c = m[2], d = m[3];
    if (z.name == "torus") return b == 0 && c == 0;
    if (z.name == "unipotent") return a == 1 && d == 1 && c == 0;
    if (z.name == "borel") return c == 0;
    if (z.name == "torus-normalizer") return (b == 0 && c == 0) || (a == 0 && d == 0);
    if (z.name == "trace") {
        auto t = static_cast<std::uint64_t>(((z.trace % static_cast<std::int64_t>(p)) + static_cast<std::int64_t>(p)) %
                                            static_cast<std::int64_t>(p));
        return (a + d) % p == t;
    }
    if (z.name == "center") return b == 0 && c == 0 && a == d && a * a % p == 1;
    throw ConfigError("unknown variety '" + z.name + "'");
}

std::size_t variety_count(const FinSet& Gamma, const VarietySpec& z) {
    require_matrix_backend(Gamma);
    const std::uint64_t p = Gamma.ctx().modulus();
    const int rb = residue_bytes(Gamma.ctx());
    std::vector<std::size_t> partial(thread_count() + 1, 0);
    parallel_for(Gamma.size(), [&](std::size_t b, std::size_t e, unsigned w) {
        std::uint64_t m[4];
        std::size_t cnt = 0;
        for (std::size_t i = b; i < e; ++i) {
            load_matrix(Gamma, i, rb, m);
            if (variety_contains(z, p, m)) ++cnt;
        }
        partial[w] = cnt;
    });
    std::size_t total = 0;
    for (auto c : partial) total += c;
    return total;
}

bool DimReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const DimRow& r) { return r.pass; });
}

DimReport lp_report(const FinSet& Gamma, const std::vector<VarietySpec>& varieties, double epsilon) {
    require_matrix_backend(Gamma);
    if (Gamma.ctx().kind() != Backend::SL2)
        throw ConfigError("lp_report dimension table covers SL2 only");
    if (Gamma.empty()) throw ConfigError("lp_report requires a nonempty set");
    if (Gamma.size() == 1) throw ConfigError("lp_report needs |Gamma| > 1 (log ratio undefined)");
    if (epsilon < 0) throw ConfigError("lp_report epsilon must be >= 0");

    DimReport rep;
    rep.p = Gamma.ctx().modulus();
    rep.gamma_card = Gamma.size();
    rep.dim_g = kDimSL2;
    rep.epsilon = epsilon;
    const double log_gamma = std::log(static_cast<double>(Gamma.size()));
    rep.gamma0 = log_gamma / rep.dim_g;

    for (const auto& z : varieties) {
        DimRow row;
        row.name = z.display();
        row.count = variety_count(Gamma, z);
        row.dim = z.dim;
        row.components = z.components;
        row.bound = static_cast<double>(z.dim) / rep.dim_g;
        const double cnt = static_cast<double>(row.count);
        row.ratio = row.count ? std::log(cnt) / log_gamma : 0.0;
        const double adj = std::max(1.0, cnt / z.components);
        row.ratio_adj = std::log(adj) / log_gamma;
        row.slack = row.bound + epsilon - row.ratio_adj;
        row.pass = row.ratio_adj <= row.bound + epsilon;
        row.unbalanced = !row.pass;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Dichotomy probe
// ---------------------------------------------------------------------------

namespace {

// Projective line over F_p: index t in [0,p) is the line through (1,t);
// index p is the line through (0,1).
struct ProjAction {
    std::uint64_t p;

    // image of line index under [[a,b],[c,d]] acting on column vectors
    std::size_t apply(const std::uint64_t m[4], std::size_t line) const {
        std::uint64_t x, y;
        if (line < p) {
            x = 1;
            y = line;
        } else {
            x = 0;
            y = 1;
        }
        std::uint64_t nx = (m[0] * x + m[1] * y) % p;
        std::uint64_t ny = (m[2] * x + m[3] * y) % p;
        if (nx == 0) return p;
        // normalize to (1, ny/nx)
        std::uint64_t inv = 1, base = nx % p, e = p - 2;
        while (e) {
            if (e & 1) inv = inv * base % p;
            base = base * base % p;
            e >>= 1;
        }
        return static_cast<std::size_t>(ny * inv % p);
    }
};

// All of SL2(F_p) by solving the determinant equation.
FinSet full_sl2(const CtxPtr& ctx) {
    const std::uint64_t p = ctx->modulus();
    SetBuilder b(ctx);
    std::vector<std::uint8_t> raw(ctx->width());
    const int rb = static_cast<int>(ctx->width() / 4);
    auto push = [&](std::uint64_t a, std::uint64_t bb, std::uint64_t c, std::uint64_t d) {
        std::uint64_t m[4] = {a, bb, c, d};
        for (int j = 0; j < 4; ++j)
            for (int by = 0; by < rb; ++by) raw[rb * j + by] = static_cast<std::uint8_t>(m[j] >> (8 * by));
        b.add_raw(raw.data());
    };
    for (std::uint64_t a = 1; a < p; ++a) {
        std::uint64_t inv = 1, base = a, e = p - 2;
        while (e) {
            if (e & 1) inv = inv * base % p;
            base = base * base % p;
            e >>= 1;
        }
        for (std::uint64_t bb = 0; bb < p; ++bb)
            for (std::uint64_t c = 0; c < p; ++c) push(a, bb, c, (1 + bb * c) % p * inv % p);
    }
    for (std::uint64_t bb = 1; bb < p; ++bb) {
        std::uint64_t inv = 1, base = bb, e = p - 2;
        while (e) {
            if (e & 1) inv = inv * base % p;
            base = base * base % p;
            e >>= 1;
        }
        for (std::uint64_t d = 0; d < p; ++d) push(0, bb, (p - inv) % p, d);
    }
    return b.take();
}

}  // namespace

ProbeReport linear_dichotomy_probe(const FinSet& X, std::uint64_t exhaustive_p_bound) {
    if (X.ctx().kind() != Backend::SL2) throw ConfigError("linear_dichotomy_probe requires the SL2 backend");
    if (X.empty()) throw ConfigError("linear_dichotomy_probe requires a nonempty set");
    const std::uint64_t p = X.ctx().modulus();
    if (p > exhaustive_p_bound)
        throw BudgetError("linear_dichotomy_probe is exhaustive; p exceeds the configured bound of " +
                          std::to_string(exhaustive_p_bound));

    ProbeReport rep;
    rep.kind = "linear-dichotomy";
    const std::size_t order = static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1) *
                              static_cast<std::size_t>(p + 1);
    ClosureResult cl = group_closure(X, order);
    if (cl.exceeded) throw InvariantError("closure exceeded the ambient group order");
    const FinSet& G0 = cl.closure;
    rep.payload["card_closure"] = G0.size();
    rep.payload["card_x"] = X.size();
    const int rb = residue_bytes(X.ctx());

    // center first: scalar closures are degenerate stabilizers
    bool central = true;
    {
        std::uint64_t m[4];
        for (std::size_t i = 0; i < G0.size() && central; ++i) {
            load_matrix(G0, i, rb, m);
            if (!(m[1] == 0 && m[2] == 0 && m[0] == m[3])) central = false;
        }
    }

    ProjAction act{p};
    const std::size_t nlines = static_cast<std::size_t>(p) + 1;

    // lines fixed by every element of X (hence by the closure)
    std::vector<std::size_t> fixed;
    std::vector<std::pair<std::size_t, std::size_t>> swapped_pairs;
    {
        std::vector<bool> fixed_all(nlines, true);
        std::uint64_t m[4];
        for (std::size_t li = 0; li < nlines; ++li) {
            for (std::size_t i = 0; i < X.size() && fixed_all[li]; ++i) {
                load_matrix(X, i, rb, m);
                if (act.apply(m, li) != li) fixed_all[li] = false;
            }
            if (fixed_all[li]) fixed.push_back(li);
        }
        // setwise-invariant pairs beyond common fixed lines
        for (std::size_t l1 = 0; l1 < nlines; ++l1) {
            for (std::size_t l2 = l1 + 1; l2 < nlines; ++l2) {
                bool ok = true;
                for (std::size_t i = 0; i < X.size() && ok; ++i) {
                    load_matrix(X, i, rb, m);
                    std::size_t i1 = act.apply(m, l1), i2 = act.apply(m, l2);
                    ok = (i1 == l1 && i2 == l2) || (i1 == l2 && i2 == l1);
                }
                if (ok) swapped_pairs.push_back({l1, l2});
            }
        }
    }
    rep.payload["fixed_lines"] = fixed.size();
    rep.payload["invariant_pairs"] = swapped_pairs.size();

    std::string subgroup_name;
    if (central)
        subgroup_name = "center";
    else if (fixed.size() >= 2)
        subgroup_name = "torus";
    else if (fixed.size() == 1)
        subgroup_name = "borel";
    else if (!swapped_pairs.empty())
        subgroup_name = "torus-normalizer";

    if (!subgroup_name.empty()) {
        rep.verdict = "proper algebraic subgroup";
        rep.payload["subgroup"] = subgroup_name;
        // the stabilized structure inside the full group
        FinSet full = full_sl2(X.ctx_ptr());
        SetBuilder hb(X.ctx_ptr());
        std::uint64_t m[4];
        for (std::size_t i = 0; i < full.size(); ++i) {
            load_matrix(full, i, rb, m);
            bool keep = false;
            if (subgroup_name == "center") {
                keep = m[1] == 0 && m[2] == 0 && m[0] == m[3];
            } else if (subgroup_name == "torus") {
                keep = act.apply(m, fixed[0]) == fixed[0] && act.apply(m, fixed[1]) == fixed[1];
            } else if (subgroup_name == "borel") {
                keep = act.apply(m, fixed[0]) == fixed[0];
            } else {
                auto [l1, l2] = swapped_pairs[0];
                std::size_t i1 = act.apply(m, l1), i2 = act.apply(m, l2);
                keep = (i1 == l1 && i2 == l2) || (i1 == l2 && i2 == l1);
            }
            if (keep) hb.add_raw(full.block(i));
        }
        FinSet H = hb.take();
        rep.payload["card_subgroup"] = H.size();
        auto K = greedy_cover_count(X, H, Side::Right, SIZE_MAX);
        rep.payload["coset_count"] = *K;
        return rep;
    }

    // no invariant structure: test saturation (X X^-1)^2 = <X>
    FinSet xxinv = product(X, inverse_set(X));
    FinSet dsq = product(xxinv, xxinv);
    rep.payload["card_dsq"] = dsq.size();
    rep.payload["saturation_ratio"] = static_cast<double>(dsq.size()) / static_cast<double>(G0.size());
    if (dsq.same_elements(G0)) {
        rep.verdict = "saturates";
    } else {
        rep.verdict = "intermediate";
    }
    return rep;
}

}  // namespace apxgrp
