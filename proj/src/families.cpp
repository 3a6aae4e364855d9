#include "apxgrp/families.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace apxgrp {

namespace {

constexpr std::size_t kGenerateLimit = 60'000'000;  // elements per generated set

// 38-digit decimal expansions of the named constants.
const char* alpha_digits(const std::string& name) {
    if (name == "4pi") return "12.56637061435917295385057353311801153679";
    if (name == "10+sqrt2") return "11.41421356237309504880168872420969807857";
    if (name == "e4") return "54.59815003314423907811026120286087840279";
    return nullptr;
}

void store_i64(std::uint8_t* out, std::int64_t v) {
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(u >> (8 * i));
}

}  // namespace

unsigned __int128 parse_alpha(const std::string& text) {
    std::string digits = text;
    if (const char* named = alpha_digits(text)) digits = named;
    auto dot = digits.find('.');
    std::string int_part = dot == std::string::npos ? digits : digits.substr(0, dot);
    std::string frac_part = dot == std::string::npos ? "" : digits.substr(dot + 1);
    if (frac_part.size() > 30) frac_part.resize(30);
    if (int_part.empty() || int_part.find_first_not_of("0123456789") != std::string::npos ||
        frac_part.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("alpha must be a named constant (4pi, 10+sqrt2, e4) or a positive decimal literal");

    unsigned __int128 ip = 0;
    for (char c : int_part) {
        ip = ip * 10 + static_cast<unsigned>(c - '0');
        if (ip > (static_cast<unsigned __int128>(1) << 62)) throw ConfigError("alpha too large");
    }
    unsigned __int128 den = 1, num = 0;
    for (char c : frac_part) {
        den *= 10;
        num = num * 10 + static_cast<unsigned>(c - '0');
    }
    // binary long division of num/den to 64 fractional bits
    unsigned __int128 frac_scaled = 0;
    for (int bit = 0; bit < 64; ++bit) {
        num <<= 1;
        frac_scaled <<= 1;
        if (num >= den) {
            num -= den;
            frac_scaled |= 1;
        }
    }
    unsigned __int128 scaled = (ip << 64) | frac_scaled;
    if (scaled <= (static_cast<unsigned __int128>(10) << 64))
        throw ConfigError("beatty families require alpha > 10");
    return scaled;
}

std::int64_t beatty_floor(unsigned __int128 alpha_scaled, std::int64_t m) {
    bool neg = m < 0;
    auto mm = static_cast<unsigned __int128>(neg ? -m : m);
    unsigned __int128 prod = mm * alpha_scaled;  // < 2^20 * 2^71, fits
    auto frac = static_cast<std::uint64_t>(prod & ~std::uint64_t{0});
    constexpr std::uint64_t kGuard = 1ull << 24;
    if (m != 0 && (frac < kGuard || frac > ~kGuard))
        throw ConfigError("alpha is indistinguishable from a rational at the working precision (near-integer multiple)");
    auto t = static_cast<std::int64_t>(prod >> 64);
    // floor: negative multiples of an irrational round down past the integer
    return neg ? -t - 1 : t;
}

Elem random_elem(const GroupCtx& ctx, const CounterRng& rng, std::uint64_t counter, std::int64_t window) {
    Elem e;
    e.enc.resize(ctx.width());
    auto* raw = reinterpret_cast<std::uint8_t*>(e.enc.data());
    const std::uint64_t base = counter * 256;
    switch (ctx.kind()) {
        case Backend::IntLattice:
            for (int i = 0; i < ctx.dim(); ++i) store_i64(raw + 8 * i, rng.window(window, base + i));
            return e;
        case Backend::ModLattice:
            for (int i = 0; i < ctx.dim(); ++i)
                store_i64(raw + 8 * i, static_cast<std::int64_t>(rng.below(ctx.modulus(), base + i)));
            return e;
        case Backend::Symmetric: {
            const int n = ctx.dim();
            std::vector<std::uint8_t> img(n);
            for (int i = 0; i < n; ++i) img[i] = static_cast<std::uint8_t>(i);
            for (int i = n - 1; i > 0; --i) {
                auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1), base + i));
                std::swap(img[i], img[j]);
            }
            std::memcpy(raw, img.data(), img.size());
            return e;
        }
        case Backend::SL2: {
            const std::uint64_t p = ctx.modulus();
            for (std::uint64_t attempt = 0;; ++attempt) {
                std::uint64_t a = rng.below(p, base + 4 * attempt);
                std::uint64_t b = rng.below(p, base + 4 * attempt + 1);
                std::uint64_t c = rng.below(p, base + 4 * attempt + 2);
                std::ostringstream os;
                if (a != 0) {
                    // d = (1 + b c) / a
                    std::uint64_t inv_a = 1;
                    {
                        std::uint64_t acc = 1, bb = a % p, ee = p - 2;
                        while (ee) {
                            if (ee & 1) acc = acc * bb % p;
                            bb = bb * bb % p;
                            ee >>= 1;
                        }
                        inv_a = acc;
                    }
                    std::uint64_t dd = (1 + b % p * (c % p)) % p * inv_a % p;
                    os << "[[" << a << "," << b << "],[" << c << "," << dd << "]]";
                    return ctx.parse(os.str());
                }
                if (b == 0) continue;  // need bc = -1 when a = 0
                std::uint64_t inv_b = 1;
                {
                    std::uint64_t acc = 1, bb = b % p, ee = p - 2;
                    while (ee) {
                        if (ee & 1) acc = acc * bb % p;
                        bb = bb * bb % p;
                        ee >>= 1;
                    }
                    inv_b = acc;
                }
                std::uint64_t cc = (p - inv_b) % p;
                std::uint64_t dd = rng.below(p, base + 4 * attempt + 3);
                os << "[[0," << b << "],[" << cc << "," << dd << "]]";
                return ctx.parse(os.str());
            }
        }
        case Backend::GL2: {
            const std::uint64_t p = ctx.modulus();
            for (std::uint64_t attempt = 0;; ++attempt) {
                std::uint64_t m[4];
                for (int i = 0; i < 4; ++i) m[i] = rng.below(p, base + 4 * attempt + i);
                if ((m[0] * m[3] % p + p - m[1] * m[2] % p) % p == 0) continue;
                std::ostringstream os;
                os << "[[" << m[0] << "," << m[1] << "],[" << m[2] << "," << m[3] << "]]";
                return ctx.parse(os.str());
            }
        }
        case Backend::Heisenberg: {
            store_i64(raw, rng.window(window, base));
            store_i64(raw + 8, rng.window(window, base + 1));
            store_i64(raw + 16, rng.window(window * window, base + 2));
            return e;
        }
        case Backend::Cayley: {
            // random short word, reduced by the backend
            std::uint64_t len = 1 + rng.below(6, base);
            Elem acc = ctx.identity();
            for (std::uint64_t i = 0; i < len; ++i) {
                auto g = rng.below(static_cast<std::uint64_t>(2 * ctx.dim()), base + 1 + i);
                Elem one;
                one.enc.assign(ctx.width(), '\0');
                one.enc[0] = static_cast<char>(g + 1);
                acc = ctx.mul(acc, one);
            }
            return acc;
        }
    }
    return e;
}

std::string FamilySpec::label() const {
    std::ostringstream os;
    switch (kind) {
        case FamilyKind::IntervalBox: os << "interval-box d=" << d << " n=" << n; break;
        case FamilyKind::Beatty: os << "beatty n=" << n << " alpha=" << alpha; break;
        case FamilyKind::HeisenbergBox: os << "heisenberg-box r=" << r; break;
        case FamilyKind::CayleyBall: {
            os << "cayley-ball radius=" << radius << " gens=";
            for (std::size_t i = 0; i < gens.size(); ++i) os << (i ? "|" : "") << gens[i];
            break;
        }
        case FamilyKind::RandomSymmetric: os << "random-symmetric size=" << size << " n=" << n << " seed=" << seed; break;
        case FamilyKind::SubgroupPlusNoise:
            os << "subgroup-plus-noise basis=" << basis << " noise=" << noise << " shifts=" << shifts << " seed=" << seed;
            break;
        case FamilyKind::ExponentGrid: os << "exponent-grid r=" << r; break;
    }
    if (symmetrized) os << " sym";
    return os.str();
}

namespace {

FinSet interval_box(const FamilySpec& spec) {
    if (spec.n < 0) throw ConfigError("interval-box radius must be >= 0");
    CtxPtr ctx = spec.ctx ? spec.ctx : GroupCtx::integer_lattice(spec.d);
    if (ctx->kind() != Backend::IntLattice) throw ConfigError("interval-box requires the integer lattice backend");
    const int d = ctx->dim();
    const std::uint64_t side = static_cast<std::uint64_t>(2 * spec.n + 1);
    std::uint64_t total = 1;
    for (int i = 0; i < d; ++i) {
        total *= side;
        if (total > kGenerateLimit) throw BudgetError("interval-box exceeds the generation size guard");
    }
    std::vector<std::uint8_t> blocks(total * ctx->width());
    std::vector<std::int64_t> coord(static_cast<std::size_t>(d), -spec.n);
    for (std::uint64_t i = 0; i < total; ++i) {
        for (int j = 0; j < d; ++j) store_i64(blocks.data() + i * ctx->width() + 8 * j, coord[j]);
        for (int j = d - 1; j >= 0; --j) {
            if (++coord[j] <= spec.n) break;
            coord[j] = -spec.n;
        }
    }
    return FinSet::from_blocks(ctx, std::move(blocks));
}

FinSet beatty(const FamilySpec& spec) {
    if (spec.n < 0) throw ConfigError("beatty index bound must be >= 0");
    CtxPtr ctx = spec.ctx ? spec.ctx : GroupCtx::integer_lattice(1);
    if (ctx->kind() != Backend::IntLattice || ctx->dim() != 1)
        throw ConfigError("beatty families live in the rank-1 integer lattice");
    unsigned __int128 a = parse_alpha(spec.alpha);
    SetBuilder b(ctx);
    std::uint8_t raw[8];
    for (std::int64_t m = -spec.n; m <= spec.n; ++m) {
        store_i64(raw, beatty_floor(a, m));
        b.add_raw(raw);
    }
    return b.take();
}

FinSet heisenberg_box(const FamilySpec& spec) {
    if (spec.r < 0) throw ConfigError("heisenberg-box radius must be >= 0");
    CtxPtr ctx = spec.ctx ? spec.ctx : GroupCtx::heisenberg();
    if (ctx->kind() != Backend::Heisenberg) throw ConfigError("heisenberg-box requires the Heisenberg backend");
    const std::int64_t r = spec.r, r2 = r * r;
    const std::uint64_t total = static_cast<std::uint64_t>(2 * r + 1) * static_cast<std::uint64_t>(2 * r + 1) *
                                static_cast<std::uint64_t>(2 * r2 + 1);
    if (total > kGenerateLimit) throw BudgetError("heisenberg-box exceeds the generation size guard");
    std::vector<std::uint8_t> blocks(total * 24);
    std::size_t i = 0;
    for (std::int64_t x = -r; x <= r; ++x)
        for (std::int64_t y = -r; y <= r; ++y)
            for (std::int64_t z = -r2; z <= r2; ++z) {
                store_i64(blocks.data() + i * 24, x);
                store_i64(blocks.data() + i * 24 + 8, y);
                store_i64(blocks.data() + i * 24 + 16, z);
                ++i;
            }
    return FinSet::from_blocks(ctx, std::move(blocks));
}

FinSet cayley_ball(const FamilySpec& spec) {
    if (!spec.ctx) throw ConfigError("cayley-ball requires an explicit backend");
    if (spec.gens.empty()) throw ConfigError("cayley-ball requires at least one generator literal");
    CtxPtr ctx = spec.ctx;
    std::vector<Elem> gens;
    for (const auto& lit : spec.gens) gens.push_back(ctx->parse(lit));
    FinSet step = symmetrize(FinSet::of(ctx, gens));  // generators, inverses, identity

    FinSet ball = step;
    FinSet frontier = step;
    for (std::size_t round = 1; spec.radius == 0 || round < spec.radius; ++round) {
        FinSet next = product(frontier, step);
        // fresh elements only
        SetBuilder fresh(ctx);
        for (std::size_t i = 0; i < next.size(); ++i)
            if (!ball.contains_raw(next.block(i))) fresh.add_raw(next.block(i));
        FinSet diff = fresh.take();
        if (diff.empty()) break;  // ball closed: whole generated subgroup reached
        ball = set_union(ball, diff);
        frontier = std::move(diff);
        if (ball.size() > kGenerateLimit) throw BudgetError("cayley-ball exceeds the generation size guard");
    }
    return ball;
}

FinSet random_symmetric(const FamilySpec& spec) {
    if (spec.size == 0) throw ConfigError("random-symmetric size must be >= 1");
    CtxPtr ctx = spec.ctx ? spec.ctx : GroupCtx::integer_lattice(1);
    CounterRng rng(spec.seed, 0x5e7);
    SetBuilder b(ctx);
    std::size_t distinct = 0;
    FinSet seen(ctx);
    std::vector<Elem> drawn;
    for (std::uint64_t counter = 0; distinct < spec.size; ++counter) {
        if (counter > 64 * spec.size + 1024)
            throw BudgetError("random-symmetric sampling failed to reach the requested size");
        Elem e = random_elem(*ctx, rng, counter, spec.n > 0 ? spec.n : 16);
        bool fresh = std::find(drawn.begin(), drawn.end(), e) == drawn.end();
        if (fresh) {
            drawn.push_back(e);
            ++distinct;
        }
    }
    for (const auto& e : drawn) b.add(e);
    return symmetrize(b.take());
}

FinSet subgroup_plus_noise(const FamilySpec& spec) {
    CtxPtr ctx = spec.ctx;
    if (!ctx || ctx->kind() != Backend::ModLattice)
        throw ConfigError("subgroup-plus-noise requires a modular lattice backend");
    const int d = ctx->dim();
    const std::uint64_t q = ctx->modulus();
    if (spec.basis < 0 || spec.basis > d) throw ConfigError("basis count out of range");
    std::uint64_t span = 1;
    for (int i = 0; i < spec.basis; ++i) {
        span *= q;
        if (span > kGenerateLimit) throw BudgetError("subgroup span exceeds the generation size guard");
    }
    std::vector<Elem> pts;
    // span of the first `basis` coordinates
    std::vector<std::uint64_t> c(static_cast<std::size_t>(spec.basis), 0);
    for (std::uint64_t i = 0; i < span; ++i) {
        Elem e;
        e.enc.assign(ctx->width(), '\0');
        auto* raw = reinterpret_cast<std::uint8_t*>(e.enc.data());
        for (int j = 0; j < spec.basis; ++j) store_i64(raw + 8 * j, static_cast<std::int64_t>(c[j]));
        pts.push_back(std::move(e));
        for (int j = spec.basis - 1; j >= 0; --j) {
            if (++c[j] < q) break;
            c[j] = 0;
        }
    }
    CounterRng noise_rng(spec.seed, 0x401);
    std::vector<Elem> noise_pts;
    for (int j = 0; j < spec.noise; ++j) noise_pts.push_back(random_elem(*ctx, noise_rng, j, 0));
    std::vector<Elem> all = pts;
    all.insert(all.end(), noise_pts.begin(), noise_pts.end());
    for (int s = 0; s < spec.shifts; ++s) {
        Elem shift = random_elem(*ctx, noise_rng, 1000 + s, 0);
        for (const auto& h : pts) all.push_back(ctx->mul(shift, h));
    }
    return symmetrize(FinSet::of(ctx, all));
}

FinSet exponent_grid(const FamilySpec& spec) {
    CtxPtr ctx = spec.ctx;
    if (!ctx || ctx->kind() != Backend::ModLattice)
        throw ConfigError("exponent-grid requires a modular lattice backend");
    if (spec.r < 0) throw ConfigError("exponent-grid radius must be >= 0");
    const int d = ctx->dim();
    const auto q = static_cast<std::int64_t>(ctx->modulus());
    const std::int64_t side = std::min<std::int64_t>(2 * spec.r + 1, q);
    std::uint64_t total = 1;
    for (int i = 0; i < d; ++i) {
        total *= static_cast<std::uint64_t>(side);
        if (total > kGenerateLimit) throw BudgetError("exponent-grid exceeds the generation size guard");
    }
    SetBuilder b(ctx);
    std::vector<std::int64_t> c(static_cast<std::size_t>(d), -std::min(spec.r, (side - 1) / 2));
    const std::int64_t lo = c[0];
    const std::int64_t hi = lo + side - 1;
    std::vector<std::uint8_t> raw(ctx->width());
    for (std::uint64_t i = 0; i < total; ++i) {
        for (int j = 0; j < d; ++j) store_i64(raw.data() + 8 * j, ((c[j] % q) + q) % q);
        b.add_raw(raw.data());
        for (int j = d - 1; j >= 0; --j) {
            if (++c[j] <= hi) break;
            c[j] = lo;
        }
    }
    return b.take();
}

}  // namespace

FinSet generate(const FamilySpec& spec) {
    FinSet out;
    switch (spec.kind) {
        case FamilyKind::IntervalBox: out = interval_box(spec); break;
        case FamilyKind::Beatty: out = beatty(spec); break;
        case FamilyKind::HeisenbergBox: out = heisenberg_box(spec); break;
        case FamilyKind::CayleyBall: out = cayley_ball(spec); break;
        case FamilyKind::RandomSymmetric: out = random_symmetric(spec); break;
        case FamilyKind::SubgroupPlusNoise: out = subgroup_plus_noise(spec); break;
        case FamilyKind::ExponentGrid: out = exponent_grid(spec); break;
    }
    if (spec.symmetrized) out = symmetrize(out);
    return out;
}

namespace {

FamilySpec sl2_ball(std::uint64_t p, std::size_t radius) {
    FamilySpec s;
    s.kind = FamilyKind::CayleyBall;
    s.ctx = GroupCtx::sl2(p);
    s.radius = radius;
    s.gens = {"[[1,1],[0,1]]", "[[1,0],[1,1]]"};
    return s;
}

}  // namespace

std::vector<std::string> corpus_names() { return {"paper-examples", "growth-grid", "tower-grid", "sl2-grid"}; }

std::vector<FamilySpec> corpus(std::string_view name) {
    std::vector<FamilySpec> out;
    auto interval = [](int d, std::int64_t n) {
        FamilySpec s;
        s.kind = FamilyKind::IntervalBox;
        s.d = d;
        s.ctx = GroupCtx::integer_lattice(d);
        s.n = n;
        return s;
    };
    auto beatty_spec = [](std::int64_t n, std::string alpha) {
        FamilySpec s;
        s.kind = FamilyKind::Beatty;
        s.ctx = GroupCtx::integer_lattice(1);
        s.n = n;
        s.alpha = std::move(alpha);
        return s;
    };
    auto heis = [](std::int64_t r, bool sym) {
        FamilySpec s;
        s.kind = FamilyKind::HeisenbergBox;
        s.ctx = GroupCtx::heisenberg();
        s.r = r;
        s.symmetrized = sym;
        return s;
    };

    if (name == "paper-examples") {
        out.push_back(beatty_spec(100, "4pi"));
        out.push_back(beatty_spec(100, "10+sqrt2"));
        out.push_back(beatty_spec(100, "e4"));
        out.push_back(interval(1, 100));
        out.push_back(interval(2, 10));
        out.push_back(interval(3, 4));
        out.push_back(heis(2, true));
        out.push_back(heis(4, true));
        out.push_back(sl2_ball(5, 1));
        out.push_back(sl2_ball(5, 2));
        {
            FamilySpec s;
            s.kind = FamilyKind::SubgroupPlusNoise;
            s.ctx = GroupCtx::mod_lattice(2, 8);
            s.basis = 4;
            s.noise = 1;
            s.seed = 7;
            out.push_back(s);
            s.basis = 5;
            s.noise = 2;
            s.seed = 11;
            out.push_back(s);
        }
        {
            FamilySpec s;
            s.kind = FamilyKind::ExponentGrid;
            s.ctx = GroupCtx::mod_lattice(3, 6);
            s.r = 1;
            out.push_back(s);
        }
        {
            FamilySpec s;
            s.kind = FamilyKind::CayleyBall;
            s.ctx = GroupCtx::cayley({"ab", {}, 24});
            s.radius = 3;
            s.gens = {"a", "b"};
            out.push_back(s);
        }
        return out;
    }
    if (name == "growth-grid") {
        out.push_back(interval(1, 64));
        out.push_back(interval(1, 256));
        out.push_back(interval(1, 1024));
        out.push_back(interval(2, 8));
        out.push_back(interval(2, 16));
        out.push_back(beatty_spec(10, "4pi"));
        out.push_back(beatty_spec(100, "4pi"));
        out.push_back(beatty_spec(1000, "4pi"));
        return out;
    }
    if (name == "tower-grid") {
        out.push_back(interval(1, 256));
        out.push_back(heis(8, true));
        {
            FamilySpec s;  // A3 inside S3
            s.kind = FamilyKind::CayleyBall;
            s.ctx = GroupCtx::symmetric(3);
            s.radius = 0;
            s.gens = {"(1 2 3)"};
            out.push_back(s);
        }
        {
            FamilySpec s;  // <5> inside Z/35
            s.kind = FamilyKind::CayleyBall;
            s.ctx = GroupCtx::mod_lattice(35, 1);
            s.radius = 0;
            s.gens = {"(5)"};
            out.push_back(s);
        }
        return out;
    }
    if (name == "sl2-grid") {
        for (std::uint64_t p : {5ull, 7ull, 11ull, 13ull}) {
            out.push_back(sl2_ball(p, 1));
            out.push_back(sl2_ball(p, 2));
        }
        return out;
    }
    throw ConfigError("unknown corpus '" + std::string(name) + "'");
}

}  // namespace apxgrp
