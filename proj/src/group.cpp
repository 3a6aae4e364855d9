#include "apxgrp/group.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <sstream>

namespace apxgrp {

namespace {

void store_i64(std::uint8_t* out, std::int64_t v) {
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(u >> (8 * i));
}

std::int64_t load_i64(const std::uint8_t* in) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    return static_cast<std::int64_t>(u);
}

void store_res(std::uint8_t* out, std::uint64_t v, int rbytes) {
    for (int i = 0; i < rbytes; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t load_res(const std::uint8_t* in, int rbytes) {
    std::uint64_t u = 0;
    for (int i = 0; i < rbytes; ++i) u |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    return u;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r))
        throw OverflowError("coordinate overflow in 64-bit window (set sizes too large for exact arithmetic)");
    return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r))
        throw OverflowError("coordinate overflow in 64-bit window (set sizes too large for exact arithmetic)");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r))
        throw OverflowError("coordinate overflow in 64-bit window (set sizes too large for exact arithmetic)");
    return r;
}

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
    std::uint64_t acc = 1 % p;
    base %= p;
    while (exp) {
        if (exp & 1) acc = acc * base % p;
        base = base * base % p;
        exp >>= 1;
    }
    return acc;
}

std::uint64_t mod_inv(std::uint64_t a, std::uint64_t p) { return mod_pow(a, p - 2, p); }

void skip_ws(std::string_view& s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
}

bool consume(std::string_view& s, char c) {
    skip_ws(s);
    if (s.empty() || s.front() != c) return false;
    s.remove_prefix(1);
    return true;
}

std::int64_t parse_int(std::string_view& s) {
    skip_ws(s);
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty() || !std::isdigit(static_cast<unsigned char>(s.front())))
        throw ConfigError("expected integer in element literal");
    std::uint64_t acc = 0;
    while (!s.empty() && std::isdigit(static_cast<unsigned char>(s.front()))) {
        acc = acc * 10 + static_cast<std::uint64_t>(s.front() - '0');
        if (acc > (1ull << 63)) throw ConfigError("integer literal out of 64-bit range");
        s.remove_prefix(1);
    }
    if (neg) return -static_cast<std::int64_t>(acc);
    if (acc == (1ull << 63)) throw ConfigError("integer literal out of 64-bit range");
    return static_cast<std::int64_t>(acc);
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    for (std::uint64_t f = 11; f * f <= n; f += 2)
        if (n % f == 0) return false;
    return true;
}

int compare_raw(const std::uint8_t* a, const std::uint8_t* b, std::size_t width) {
    return std::memcmp(a, b, width);
}

// ---------------------------------------------------------------------------
// Word backend: shortlex normal forms under a verified confluent system.
// ---------------------------------------------------------------------------

namespace detail {

using Word = std::basic_string<std::uint8_t>;  // letters 1..2k, 0 never appears

class Rewriter {
  public:
    Rewriter(const CayleyPresentation& pres) : names_(pres.gens), max_word_(pres.max_word), user_rules_(pres.rules) {
        if (names_.empty() || names_.size() > 16) throw ConfigError("cayley backend needs 1..16 generators");
        for (char c : names_)
            if (!std::islower(static_cast<unsigned char>(c))) throw ConfigError("generator names must be lowercase letters");
        for (std::size_t i = 0; i < names_.size(); ++i)
            for (std::size_t j = i + 1; j < names_.size(); ++j)
                if (names_[i] == names_[j]) throw ConfigError("duplicate generator name");
        if (max_word_ < 2 || max_word_ > 255) throw ConfigError("cayley max_word must be in [2,255]");
        k_ = names_.size();
        // implicit free cancellations x x^-1 -> 1, x^-1 x -> 1
        for (std::size_t i = 1; i <= k_; ++i) {
            rules_.push_back({Word{(std::uint8_t)i, (std::uint8_t)(i + k_)}, Word{}});
            rules_.push_back({Word{(std::uint8_t)(i + k_), (std::uint8_t)i}, Word{}});
        }
        for (const auto& [l, r] : pres.rules) {
            Word lhs = word_of(l), rhs = word_of(r);
            if (lhs.empty()) throw ConfigError("rewrite rule with empty left side");
            if (!shortlex_less(rhs, lhs))
                throw ConfigError("rewrite rule '" + l + " -> " + r + "' is not shortlex-reducing; presentation rejected");
            rules_.push_back({std::move(lhs), std::move(rhs)});
        }
        check_confluence();
    }

    std::size_t n_gens() const { return k_; }
    std::size_t max_word() const { return max_word_; }
    const std::vector<std::pair<std::string, std::string>>& user_rules() const { return user_rules_; }

    std::uint8_t letter(char c) const {
        bool up = std::isupper(static_cast<unsigned char>(c));
        char low = up ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : c;
        for (std::size_t i = 0; i < k_; ++i)
            if (names_[i] == low) return static_cast<std::uint8_t>(up ? i + 1 + k_ : i + 1);
        throw ConfigError(std::string("unknown generator '") + c + "'");
    }

    char name(std::uint8_t l) const {
        if (l >= 1 && l <= k_) return names_[l - 1];
        return static_cast<char>(std::toupper(static_cast<unsigned char>(names_[l - 1 - k_])));
    }

    std::uint8_t inverse_letter(std::uint8_t l) const {
        return static_cast<std::uint8_t>(l <= k_ ? l + k_ : l - k_);
    }

    Word word_of(std::string_view text) const {
        Word w;
        if (text == "1" || text == "e") return w;
        for (char c : text) {
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            w.push_back(letter(c));
        }
        return w;
    }

    std::string text_of(const Word& w) const {
        if (w.empty()) return "1";
        std::string s;
        for (auto l : w) s.push_back(name(l));
        return s;
    }

    static bool shortlex_less(const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }

    Word reduce(Word w) const {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t pos = 0; pos < w.size() && !changed; ++pos) {
                for (const auto& [lhs, rhs] : rules_) {
                    if (pos + lhs.size() > w.size()) continue;
                    if (std::equal(lhs.begin(), lhs.end(), w.begin() + pos)) {
                        Word next;
                        next.reserve(w.size() - lhs.size() + rhs.size());
                        next.append(w, 0, pos);
                        next.append(rhs);
                        next.append(w, pos + lhs.size(), Word::npos);
                        w = std::move(next);
                        changed = true;
                        break;
                    }
                }
            }
        }
        return w;
    }

    Word mul(const Word& a, const Word& b) const {
        Word w = reduce(a + b);
        if (w.size() > max_word_)
            throw OverflowError("word length exceeds cayley backend limit (max_word=" + std::to_string(max_word_) + ")");
        return w;
    }

    Word inv(const Word& a) const {
        Word w;
        w.reserve(a.size());
        for (auto it = a.rbegin(); it != a.rend(); ++it) w.push_back(inverse_letter(*it));
        return reduce(w);
    }

  private:
    // Local confluence via critical pairs; with terminating rules this gives
    // global confluence (Newman), so normal forms are canonical.
    void check_confluence() const {
        for (const auto& [l1, r1] : rules_) {
            for (const auto& [l2, r2] : rules_) {
                // overlap: a proper suffix of l1 equals a prefix of l2
                for (std::size_t o = 1; o < l1.size() && o <= l2.size(); ++o) {
                    if (!std::equal(l1.end() - o, l1.end(), l2.begin(), l2.begin() + o)) continue;
                    Word big = l1 + Word(l2.begin() + o, l2.end());
                    Word via1 = r1 + Word(l2.begin() + o, l2.end());
                    Word via2 = Word(l1.begin(), l1.end() - o) + r2;
                    if (reduce(via1) != reduce(via2))
                        throw ConfigError("rewriting system is not confluent (unresolved critical pair); presentation rejected");
                }
                // containment: l2 occurs strictly inside l1
                if (l2.size() < l1.size()) {
                    for (std::size_t pos = 0; pos + l2.size() <= l1.size(); ++pos) {
                        if (!std::equal(l2.begin(), l2.end(), l1.begin() + pos)) continue;
                        Word via2 = Word(l1.begin(), l1.begin() + pos) + r2 + Word(l1.begin() + pos + l2.size(), l1.end());
                        if (reduce(via2) != reduce(r1))
                            throw ConfigError("rewriting system is not confluent (unresolved critical pair); presentation rejected");
                    }
                }
            }
        }
    }

    std::string names_;
    std::size_t k_ = 0;
    std::size_t max_word_ = 0;
    std::vector<std::pair<std::string, std::string>> user_rules_;
    std::vector<std::pair<Word, Word>> rules_;
};

}  // namespace detail

using detail::Word;

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

GroupCtx::~GroupCtx() = default;

std::shared_ptr<GroupCtx> GroupCtx::make_ctx() { return std::shared_ptr<GroupCtx>(new GroupCtx()); }

CtxPtr GroupCtx::integer_lattice(int d) {
    if (d < 1 || d > 64) throw ConfigError("integer lattice dimension must be in [1,64]");
    auto c = make_ctx();
    c->kind_ = Backend::IntLattice;
    c->d_ = d;
    c->width_ = 8u * static_cast<std::size_t>(d);
    return c;
}

CtxPtr GroupCtx::mod_lattice(std::uint64_t n, int d) {
    if (d < 1 || d > 64) throw ConfigError("modular lattice dimension must be in [1,64]");
    if (n < 1 || n > (1ull << 62)) throw ConfigError("modular lattice modulus must be in [1,2^62]");
    auto c = make_ctx();
    c->kind_ = Backend::ModLattice;
    c->d_ = d;
    c->n_ = n;
    c->width_ = 8u * static_cast<std::size_t>(d);
    c->order_bound_ = n;
    return c;
}

CtxPtr GroupCtx::symmetric(int n) {
    if (n < 1 || n > 255) throw ConfigError("symmetric group degree must be in [1,255]");
    auto c = make_ctx();
    c->kind_ = Backend::Symmetric;
    c->d_ = n;
    c->width_ = static_cast<std::size_t>(n);
    return c;
}

CtxPtr GroupCtx::sl2(std::uint64_t p) {
    if (!is_prime_u64(p)) throw ConfigError("sl2 characteristic must be prime, got " + std::to_string(p));
    if (p >= (1ull << 31)) throw ConfigError("sl2 characteristic must be < 2^31");
    auto c = make_ctx();
    c->kind_ = Backend::SL2;
    c->n_ = p;
    c->rbytes_ = p <= 0xff ? 1 : (p <= 0xffff ? 2 : 4);
    c->width_ = 4u * static_cast<std::size_t>(c->rbytes_);
    return c;
}

CtxPtr GroupCtx::gl2(std::uint64_t p) {
    if (!is_prime_u64(p)) throw ConfigError("gl2 characteristic must be prime, got " + std::to_string(p));
    if (p >= (1ull << 31)) throw ConfigError("gl2 characteristic must be < 2^31");
    auto c = make_ctx();
    c->kind_ = Backend::GL2;
    c->n_ = p;
    c->rbytes_ = p <= 0xff ? 1 : (p <= 0xffff ? 2 : 4);
    c->width_ = 4u * static_cast<std::size_t>(c->rbytes_);
    return c;
}

CtxPtr GroupCtx::heisenberg() {
    auto c = make_ctx();
    c->kind_ = Backend::Heisenberg;
    c->d_ = 3;
    c->width_ = 24;
    return c;
}

CtxPtr GroupCtx::cayley(CayleyPresentation pres) {
    auto rw = std::make_shared<const detail::Rewriter>(pres);
    auto c = make_ctx();
    c->kind_ = Backend::Cayley;
    c->d_ = static_cast<int>(rw->n_gens());
    c->width_ = rw->max_word();
    c->rw_ = std::move(rw);
    return c;
}

CtxPtr GroupCtx::with_exponent(CtxPtr ctx, std::uint64_t m) {
    if (m == 0) throw ConfigError("group exponent must be positive");
    auto c = make_ctx();
    *c = *ctx;
    c->order_bound_ = m;
    return c;
}

bool GroupCtx::interoperable(const GroupCtx& o) const {
    if (kind_ != o.kind_ || d_ != o.d_ || n_ != o.n_ || rbytes_ != o.rbytes_ || width_ != o.width_) return false;
    if (order_bound_ != o.order_bound_) return false;
    if (kind_ == Backend::Cayley) return describe() == o.describe();
    return true;
}

std::string GroupCtx::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Backend::IntLattice: os << "int-lattice d=" << d_; break;
        case Backend::ModLattice: os << "mod-lattice n=" << n_ << " d=" << d_; break;
        case Backend::Symmetric: os << "symmetric n=" << d_; break;
        case Backend::SL2: os << "sl2 p=" << n_; break;
        case Backend::GL2: os << "gl2 p=" << n_; break;
        case Backend::Heisenberg: os << "heisenberg"; break;
        case Backend::Cayley: {
            os << "cayley gens=";
            for (int i = 0; i < d_; ++i) os << rw_->name(static_cast<std::uint8_t>(i + 1));
            os << " maxlen=" << width_;
            if (!rw_->user_rules().empty()) {
                os << " rules=";
                bool first = true;
                for (const auto& [l, r] : rw_->user_rules()) {
                    if (!first) os << ';';
                    os << l << "->" << (r.empty() ? "1" : r);
                    first = false;
                }
            }
            break;
        }
    }
    if (order_bound_) os << " exp=" << *order_bound_;
    return os.str();
}

CtxPtr GroupCtx::from_descriptor(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string kind;
    is >> kind;
    std::uint64_t exp = 0, n = 0, p = 0;
    int d = 0;
    std::string gens, rules_text;
    std::size_t maxlen = 32;
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError("bad backend descriptor token '" + tok + "'");
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "d") d = std::stoi(val);
        else if (key == "n") n = std::stoull(val);
        else if (key == "p") p = std::stoull(val);
        else if (key == "exp") exp = std::stoull(val);
        else if (key == "gens") gens = val;
        else if (key == "maxlen") maxlen = std::stoull(val);
        else if (key == "rules") rules_text = val;
        else throw ConfigError("unknown backend descriptor key '" + key + "'");
    }
    CtxPtr ctx;
    if (kind == "int-lattice") ctx = integer_lattice(d);
    else if (kind == "mod-lattice") ctx = mod_lattice(n, d);
    else if (kind == "symmetric") ctx = symmetric(static_cast<int>(n));
    else if (kind == "sl2") ctx = sl2(p);
    else if (kind == "gl2") ctx = gl2(p);
    else if (kind == "heisenberg") ctx = heisenberg();
    else if (kind == "cayley") {
        CayleyPresentation pres;
        pres.gens = gens;
        pres.max_word = maxlen;
        std::stringstream rs(rules_text);
        std::string rule;
        while (std::getline(rs, rule, ';')) {
            if (rule.empty()) continue;
            auto arrow = rule.find("->");
            if (arrow == std::string::npos) throw ConfigError("cayley rule must look like lhs->rhs");
            std::string rhs = rule.substr(arrow + 2);
            pres.rules.push_back({rule.substr(0, arrow), rhs == "1" ? "" : rhs});
        }
        ctx = cayley(std::move(pres));
    } else {
        throw ConfigError("unknown backend kind '" + kind + "'");
    }
    if (exp) ctx = with_exponent(ctx, exp);
    return ctx;
}

// ---------------------------------------------------------------------------
// Raw operations
// ---------------------------------------------------------------------------

void GroupCtx::mul_raw(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out) const {
    switch (kind_) {
        case Backend::IntLattice:
            for (int i = 0; i < d_; ++i) store_i64(out + 8 * i, checked_add(load_i64(a + 8 * i), load_i64(b + 8 * i)));
            return;
        case Backend::ModLattice:
            for (int i = 0; i < d_; ++i) {
                auto s = static_cast<std::uint64_t>(load_i64(a + 8 * i)) + static_cast<std::uint64_t>(load_i64(b + 8 * i));
                if (s >= n_) s -= n_;
                store_i64(out + 8 * i, static_cast<std::int64_t>(s));
            }
            return;
        case Backend::Symmetric:
            for (int i = 0; i < d_; ++i) out[i] = a[b[i]];  // (a.b)(i) = a(b(i))
            return;
        case Backend::SL2:
        case Backend::GL2: {
            const std::uint64_t p = n_;
            std::uint64_t m1[4], m2[4];
            for (int i = 0; i < 4; ++i) m1[i] = load_res(a + rbytes_ * i, rbytes_);
            for (int i = 0; i < 4; ++i) m2[i] = load_res(b + rbytes_ * i, rbytes_);
            std::uint64_t r[4] = {
                (m1[0] * m2[0] + m1[1] * m2[2]) % p,
                (m1[0] * m2[1] + m1[1] * m2[3]) % p,
                (m1[2] * m2[0] + m1[3] * m2[2]) % p,
                (m1[2] * m2[1] + m1[3] * m2[3]) % p,
            };
            for (int i = 0; i < 4; ++i) store_res(out + rbytes_ * i, r[i], rbytes_);
            return;
        }
        case Backend::Heisenberg: {
            std::int64_t x1 = load_i64(a), y1 = load_i64(a + 8), z1 = load_i64(a + 16);
            std::int64_t x2 = load_i64(b), y2 = load_i64(b + 8), z2 = load_i64(b + 16);
            store_i64(out, checked_add(x1, x2));
            store_i64(out + 8, checked_add(y1, y2));
            store_i64(out + 16, checked_add(checked_add(z1, z2), checked_mul(x1, y2)));
            return;
        }
        case Backend::Cayley: {
            Word wa(a, a + width_), wb(b, b + width_);
            wa.erase(std::find(wa.begin(), wa.end(), std::uint8_t{0}), wa.end());
            wb.erase(std::find(wb.begin(), wb.end(), std::uint8_t{0}), wb.end());
            Word r = rw_->mul(wa, wb);
            std::memset(out, 0, width_);
            std::memcpy(out, r.data(), r.size());
            return;
        }
    }
}

void GroupCtx::inv_raw(const std::uint8_t* a, std::uint8_t* out) const {
    switch (kind_) {
        case Backend::IntLattice:
            for (int i = 0; i < d_; ++i) store_i64(out + 8 * i, checked_sub(0, load_i64(a + 8 * i)));
            return;
        case Backend::ModLattice:
            for (int i = 0; i < d_; ++i) {
                auto v = static_cast<std::uint64_t>(load_i64(a + 8 * i));
                store_i64(out + 8 * i, static_cast<std::int64_t>(v == 0 ? 0 : n_ - v));
            }
            return;
        case Backend::Symmetric:
            for (int i = 0; i < d_; ++i) out[a[i]] = static_cast<std::uint8_t>(i);
            return;
        case Backend::SL2: {
            const std::uint64_t p = n_;
            std::uint64_t m[4];
            for (int i = 0; i < 4; ++i) m[i] = load_res(a + rbytes_ * i, rbytes_);
            std::uint64_t r[4] = {m[3], (p - m[1]) % p, (p - m[2]) % p, m[0]};  // adjugate, det = 1
            for (int i = 0; i < 4; ++i) store_res(out + rbytes_ * i, r[i], rbytes_);
            return;
        }
        case Backend::GL2: {
            const std::uint64_t p = n_;
            std::uint64_t m[4];
            for (int i = 0; i < 4; ++i) m[i] = load_res(a + rbytes_ * i, rbytes_);
            std::uint64_t det = (m[0] * m[3] % p + p - m[1] * m[2] % p) % p;
            std::uint64_t di = mod_inv(det, p);
            std::uint64_t r[4] = {m[3] * di % p, (p - m[1]) % p * di % p, (p - m[2]) % p * di % p, m[0] * di % p};
            for (int i = 0; i < 4; ++i) store_res(out + rbytes_ * i, r[i], rbytes_);
            return;
        }
        case Backend::Heisenberg: {
            std::int64_t x = load_i64(a), y = load_i64(a + 8), z = load_i64(a + 16);
            store_i64(out, checked_sub(0, x));
            store_i64(out + 8, checked_sub(0, y));
            store_i64(out + 16, checked_sub(checked_mul(x, y), z));
            return;
        }
        case Backend::Cayley: {
            Word wa(a, a + width_);
            wa.erase(std::find(wa.begin(), wa.end(), std::uint8_t{0}), wa.end());
            Word r = rw_->inv(wa);
            std::memset(out, 0, width_);
            std::memcpy(out, r.data(), r.size());
            return;
        }
    }
}

void GroupCtx::id_raw(std::uint8_t* out) const {
    switch (kind_) {
        case Backend::Symmetric:
            for (int i = 0; i < d_; ++i) out[i] = static_cast<std::uint8_t>(i);
            return;
        case Backend::SL2:
        case Backend::GL2:
            std::memset(out, 0, width_);
            store_res(out, 1, rbytes_);
            store_res(out + 3 * rbytes_, 1, rbytes_);
            return;
        default:
            std::memset(out, 0, width_);
            return;
    }
}

bool GroupCtx::is_identity_raw(const std::uint8_t* a) const {
    std::uint8_t id[64];
    if (width_ <= sizeof(id)) {
        id_raw(id);
        return std::memcmp(a, id, width_) == 0;
    }
    std::vector<std::uint8_t> big(width_);
    id_raw(big.data());
    return std::memcmp(a, big.data(), width_) == 0;
}

void GroupCtx::validate_raw(const std::uint8_t* a) const {
    switch (kind_) {
        case Backend::IntLattice:
        case Backend::Heisenberg:
            return;
        case Backend::ModLattice:
            for (int i = 0; i < d_; ++i) {
                auto v = static_cast<std::uint64_t>(load_i64(a + 8 * i));
                if (v >= n_) throw EncodingError("modular coordinate out of range");
            }
            return;
        case Backend::Symmetric: {
            std::uint64_t seen = 0;
            for (int i = 0; i < d_; ++i) {
                if (a[i] >= d_) throw EncodingError("permutation image out of range");
                if (d_ <= 64) {
                    if (seen & (1ull << a[i])) throw EncodingError("permutation image repeated");
                    seen |= 1ull << a[i];
                }
            }
            if (d_ > 64) {
                std::vector<bool> hit(static_cast<std::size_t>(d_));
                for (int i = 0; i < d_; ++i) {
                    if (hit[a[i]]) throw EncodingError("permutation image repeated");
                    hit[a[i]] = true;
                }
            }
            return;
        }
        case Backend::SL2:
        case Backend::GL2: {
            const std::uint64_t p = n_;
            std::uint64_t m[4];
            for (int i = 0; i < 4; ++i) {
                m[i] = load_res(a + rbytes_ * i, rbytes_);
                if (m[i] >= p) throw EncodingError("matrix residue out of range");
            }
            std::uint64_t det = (m[0] * m[3] % p + p - m[1] * m[2] % p) % p;
            if (kind_ == Backend::SL2 && det != 1) throw EncodingError("matrix determinant is not 1");
            if (kind_ == Backend::GL2 && det == 0) throw EncodingError("matrix is singular");
            return;
        }
        case Backend::Cayley: {
            Word w(a, a + width_);
            auto z = std::find(w.begin(), w.end(), std::uint8_t{0});
            for (auto it = z; it != w.end(); ++it)
                if (*it != 0) throw EncodingError("word has interior padding");
            w.erase(z, w.end());
            for (auto l : w)
                if (l < 1 || l > 2 * rw_->n_gens()) throw EncodingError("word letter out of range");
            if (rw_->reduce(w) != w) throw EncodingError("word is not in normal form");
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Elem-level wrappers
// ---------------------------------------------------------------------------

static const std::uint8_t* bytes(const Elem& e) { return reinterpret_cast<const std::uint8_t*>(e.enc.data()); }

void GroupCtx::validate(const Elem& a) const {
    if (a.enc.size() != width_) throw EncodingError("element width does not match context");
    validate_raw(bytes(a));
}

Elem GroupCtx::mul(const Elem& a, const Elem& b) const {
    validate(a);
    validate(b);
    Elem out;
    out.enc.resize(width_);
    mul_raw(bytes(a), bytes(b), reinterpret_cast<std::uint8_t*>(out.enc.data()));
    return out;
}

Elem GroupCtx::inv(const Elem& a) const {
    validate(a);
    Elem out;
    out.enc.resize(width_);
    inv_raw(bytes(a), reinterpret_cast<std::uint8_t*>(out.enc.data()));
    return out;
}

Elem GroupCtx::identity() const {
    Elem out;
    out.enc.resize(width_);
    id_raw(reinterpret_cast<std::uint8_t*>(out.enc.data()));
    return out;
}

// ---------------------------------------------------------------------------
// Literals
// ---------------------------------------------------------------------------

std::string GroupCtx::format_raw(const std::uint8_t* a) const {
    std::ostringstream os;
    switch (kind_) {
        case Backend::IntLattice:
        case Backend::ModLattice:
        case Backend::Heisenberg: {
            int dd = kind_ == Backend::Heisenberg ? 3 : d_;
            os << '(';
            for (int i = 0; i < dd; ++i) {
                if (i) os << ',';
                os << load_i64(a + 8 * i);
            }
            os << ')';
            return os.str();
        }
        case Backend::Symmetric: {
            std::vector<bool> done(static_cast<std::size_t>(d_), false);
            bool any = false;
            for (int i = 0; i < d_; ++i) {
                if (done[i] || a[i] == i) continue;
                os << '(' << (i + 1);
                done[i] = true;
                for (int j = a[i]; j != i; j = a[j]) {
                    os << ' ' << (j + 1);
                    done[j] = true;
                }
                os << ')';
                any = true;
            }
            if (!any) os << "()";
            return os.str();
        }
        case Backend::SL2:
        case Backend::GL2: {
            std::uint64_t m[4];
            for (int i = 0; i < 4; ++i) m[i] = load_res(a + rbytes_ * i, rbytes_);
            os << "[[" << m[0] << ',' << m[1] << "],[" << m[2] << ',' << m[3] << "]]";
            return os.str();
        }
        case Backend::Cayley: {
            Word w(a, a + width_);
            w.erase(std::find(w.begin(), w.end(), std::uint8_t{0}), w.end());
            return rw_->text_of(w);
        }
    }
    return {};
}

std::string GroupCtx::format(const Elem& a) const {
    if (a.enc.size() != width_) throw EncodingError("element width does not match context");
    return format_raw(bytes(a));
}

Elem GroupCtx::parse(std::string_view text) const {
    Elem out;
    out.enc.resize(width_);
    auto* raw = reinterpret_cast<std::uint8_t*>(out.enc.data());
    std::string_view s = text;
    switch (kind_) {
        case Backend::IntLattice:
        case Backend::ModLattice:
        case Backend::Heisenberg: {
            int dd = kind_ == Backend::Heisenberg ? 3 : d_;
            if (!consume(s, '(')) throw ConfigError("lattice literal must look like (a,b,...)");
            for (int i = 0; i < dd; ++i) {
                if (i && !consume(s, ',')) throw ConfigError("lattice literal has too few coordinates");
                std::int64_t v = parse_int(s);
                if (kind_ == Backend::ModLattice) {
                    auto m = static_cast<std::int64_t>(n_);
                    v = ((v % m) + m) % m;
                }
                store_i64(raw + 8 * i, v);
            }
            if (!consume(s, ')')) throw ConfigError("lattice literal has trailing coordinates");
            break;
        }
        case Backend::Symmetric: {
            for (int i = 0; i < d_; ++i) raw[i] = static_cast<std::uint8_t>(i);
            skip_ws(s);
            if (s == "e" || s == "()") {
                s = {};
                break;
            }
            // product of cycles, applied right-to-left like composition
            std::vector<std::vector<int>> cycles;
            while (consume(s, '(')) {
                std::vector<int> cyc;
                skip_ws(s);
                while (!s.empty() && s.front() != ')') {
                    std::int64_t v = parse_int(s);
                    if (v < 1 || v > d_) throw ConfigError("cycle point out of range");
                    cyc.push_back(static_cast<int>(v - 1));
                    skip_ws(s);
                    if (!s.empty() && s.front() == ',') s.remove_prefix(1);
                    skip_ws(s);
                }
                if (!consume(s, ')')) throw ConfigError("unterminated cycle");
                cycles.push_back(std::move(cyc));
            }
            for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) {
                const auto& cyc = *it;
                if (cyc.size() < 2) continue;
                std::vector<std::uint8_t> cmap(static_cast<std::size_t>(d_));
                for (int i = 0; i < d_; ++i) cmap[i] = static_cast<std::uint8_t>(i);
                for (std::size_t i = 0; i < cyc.size(); ++i) {
                    for (std::size_t j = i + 1; j < cyc.size(); ++j)
                        if (cyc[i] == cyc[j]) throw ConfigError("cycle repeats a point");
                    cmap[cyc[i]] = static_cast<std::uint8_t>(cyc[(i + 1) % cyc.size()]);
                }
                for (int i = 0; i < d_; ++i) raw[i] = cmap[raw[i]];
            }
            break;
        }
        case Backend::SL2:
        case Backend::GL2: {
            if (!consume(s, '[') || !consume(s, '[')) throw ConfigError("matrix literal must look like [[a,b],[c,d]]");
            std::int64_t vals[4];
            vals[0] = parse_int(s);
            if (!consume(s, ',')) throw ConfigError("bad matrix literal");
            vals[1] = parse_int(s);
            if (!consume(s, ']') || !consume(s, ',') || !consume(s, '[')) throw ConfigError("bad matrix literal");
            vals[2] = parse_int(s);
            if (!consume(s, ',')) throw ConfigError("bad matrix literal");
            vals[3] = parse_int(s);
            if (!consume(s, ']') || !consume(s, ']')) throw ConfigError("bad matrix literal");
            for (int i = 0; i < 4; ++i) {
                auto m = static_cast<std::int64_t>(n_);
                std::int64_t v = ((vals[i] % m) + m) % m;
                store_res(raw + rbytes_ * i, static_cast<std::uint64_t>(v), rbytes_);
            }
            break;
        }
        case Backend::Cayley: {
            Word w = rw_->reduce(rw_->word_of(s));
            if (w.size() > width_) throw OverflowError("word literal exceeds cayley backend limit");
            std::memset(raw, 0, width_);
            std::memcpy(raw, w.data(), w.size());
            s = {};
            break;
        }
    }
    skip_ws(s);
    if (!s.empty() && kind_ != Backend::Cayley) throw ConfigError("trailing characters in element literal");
    validate_raw(raw);
    return out;
}

}  // namespace apxgrp
