#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apxgrp/errors.hpp"

namespace apxgrp {

enum class Backend {
    IntLattice,   // Z^d under addition
    ModLattice,   // (Z/n)^d under addition
    Symmetric,    // S_n, composition right-to-left
    SL2,          // SL_2(F_p)
    GL2,          // GL_2(F_p)
    Heisenberg,   // discrete H_3(Z), (x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')
    Cayley,       // words over generators, shortlex-reduced by a confluent system
};

// One group element as its canonical byte encoding.  Equal elements of the
// same context always have byte-identical encodings, and the lexicographic
// order of these bytes is the canonical element order used by every greedy
// algorithm in the library.
struct Elem {
    std::string enc;

    bool operator==(const Elem&) const = default;
    auto operator<=>(const Elem&) const = default;
};

// Generators plus an optional shortlex-reducing rewriting system.  Only
// presentations whose system passes the local-confluence check are accepted;
// anything else is rejected at construction (the word problem is not solvable
// in general and we do not pretend otherwise).
struct CayleyPresentation {
    std::string gens;  // distinct lowercase letters; uppercase letter = inverse
    std::vector<std::pair<std::string, std::string>> rules;  // lhs -> rhs, "1" or "" = empty word
    std::size_t max_word = 32;
};

namespace detail {
class Rewriter;
}

// Immutable descriptor of the ambient group.  All operations are pure; a
// context may be shared freely between threads.
class GroupCtx {
  public:
    static std::shared_ptr<const GroupCtx> integer_lattice(int d);
    static std::shared_ptr<const GroupCtx> mod_lattice(std::uint64_t n, int d);
    static std::shared_ptr<const GroupCtx> symmetric(int n);
    static std::shared_ptr<const GroupCtx> sl2(std::uint64_t p);
    static std::shared_ptr<const GroupCtx> gl2(std::uint64_t p);
    static std::shared_ptr<const GroupCtx> heisenberg();
    static std::shared_ptr<const GroupCtx> cayley(CayleyPresentation pres);

    // Copy of ctx annotated with a known group exponent (x^m = 1 for all x).
    static std::shared_ptr<const GroupCtx> with_exponent(std::shared_ptr<const GroupCtx> ctx, std::uint64_t m);

    // Rebuilds a context from the string describe() produced.
    static std::shared_ptr<const GroupCtx> from_descriptor(std::string_view text);

    Backend kind() const { return kind_; }
    std::size_t width() const { return width_; }
    int dim() const { return d_; }               // lattice dimension / permutation degree
    std::uint64_t modulus() const { return n_; } // lattice modulus / field characteristic
    std::optional<std::uint64_t> element_order_bound() const { return order_bound_; }

    // Structural identity; sets from non-interoperable contexts never mix.
    bool interoperable(const GroupCtx& other) const;
    std::string describe() const;

    // Fixed-width operations on raw encodings.
    void mul_raw(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out) const;
    void inv_raw(const std::uint8_t* a, std::uint8_t* out) const;
    void id_raw(std::uint8_t* out) const;
    bool is_identity_raw(const std::uint8_t* a) const;
    void validate_raw(const std::uint8_t* a) const;  // throws EncodingError

    Elem mul(const Elem& a, const Elem& b) const;
    Elem inv(const Elem& a) const;
    Elem identity() const;
    void validate(const Elem& a) const;

    // Per-backend text grammar: lattice "(a,b,...)", permutation "(1 2 3)",
    // matrix "[[a,b],[c,d]]", Heisenberg "(x,y,z)", word backends "abA".
    std::string format_raw(const std::uint8_t* a) const;
    std::string format(const Elem& a) const;
    Elem parse(std::string_view text) const;

    ~GroupCtx();

  private:
    GroupCtx() = default;
    static std::shared_ptr<GroupCtx> make_ctx();

    Backend kind_ = Backend::IntLattice;
    int d_ = 0;
    std::uint64_t n_ = 0;
    int rbytes_ = 0;  // bytes per matrix residue
    std::size_t width_ = 0;
    std::optional<std::uint64_t> order_bound_;
    std::shared_ptr<const detail::Rewriter> rw_;

    friend class detail::Rewriter;
};

using CtxPtr = std::shared_ptr<const GroupCtx>;

// Canonical-order comparison of two raw encodings of the given width.
int compare_raw(const std::uint8_t* a, const std::uint8_t* b, std::size_t width);

bool is_prime_u64(std::uint64_t n);

}  // namespace apxgrp
