#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "apxgrp/group.hpp"

namespace apxgrp {

// Exact rational statistic num/den (kept unreduced: num and den are the two
// cardinalities of record).
struct Ratio {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Ratio&) const = default;
};

// A deduplicated finite subset of one group, stored as sorted fixed-width
// canonical encodings.  Immutable after construction; canonical element order
// is the byte order of the encodings.
class FinSet {
  public:
    FinSet() = default;
    explicit FinSet(CtxPtr ctx);
    static FinSet of(CtxPtr ctx, const std::vector<Elem>& elems);
    static FinSet of_literals(CtxPtr ctx, const std::vector<std::string>& literals);
    // Takes unsorted possibly-duplicated blocks; validates each element.
    static FinSet from_blocks(CtxPtr ctx, std::vector<std::uint8_t> blocks);

    const GroupCtx& ctx() const { return *ctx_; }
    const CtxPtr& ctx_ptr() const { return ctx_; }
    std::size_t size() const { return width_ ? data_.size() / width_ : 0; }
    bool empty() const { return data_.empty(); }
    std::size_t width() const { return width_; }
    const std::uint8_t* block(std::size_t i) const { return data_.data() + i * width_; }
    const std::uint8_t* data() const { return data_.data(); }

    bool contains_raw(const std::uint8_t* enc) const;
    bool contains(const Elem& e) const;
    std::optional<std::size_t> index_of(const std::uint8_t* enc) const;

    Elem elem(std::size_t i) const;
    std::vector<Elem> elems() const;

    bool same_elements(const FinSet& other) const;
    bool subset_of(const FinSet& other) const;

    // Serialization: one-line header naming the backend, then one element
    // literal per line.
    std::string serialize() const;
    static FinSet deserialize(std::string_view text);

    // Adopts blocks that are already sorted, deduplicated and validated.
    void adopt_sorted(std::vector<std::uint8_t> sorted_blocks);

    friend class SetBuilder;

  private:
    CtxPtr ctx_;
    std::size_t width_ = 0;
    std::vector<std::uint8_t> data_;  // sorted unique blocks
};

// Accumulates raw encodings and produces a sorted deduplicated FinSet.
class SetBuilder {
  public:
    explicit SetBuilder(CtxPtr ctx);
    void add_raw(const std::uint8_t* enc);
    void add(const Elem& e);
    std::size_t pending() const { return buf_.size() / width_; }
    FinSet take();

  private:
    CtxPtr ctx_;
    std::size_t width_;
    std::vector<std::uint8_t> buf_;
};

// --- product-set operations ------------------------------------------------

// {a.b : a in A, b in B}; throws CtxMismatchError when the contexts differ.
FinSet product(const FinSet& A, const FinSet& B);

// As product(), but stops once the running result holds at least cap distinct
// elements.  Second member of the pair is true when the cap cut the run short.
std::pair<FinSet, bool> product_capped(const FinSet& A, const FinSet& B, std::size_t cap);

FinSet inverse_set(const FinSet& A);

// X  u  X^-1  u  {identity}
FinSet symmetrize(const FinSet& X);

// n-fold set product X.X...X, n >= 1.
FinSet power(const FinSet& X, std::size_t n);

FinSet set_union(const FinSet& A, const FinSet& B);

bool is_symmetric(const FinSet& X);
bool contains_identity(const FinSet& X);

struct TriplingStat {
    std::size_t card_x = 0;
    std::size_t card_xinvx_form = 0;  // |X X^-1 X|
    std::size_t card_xx = 0;          // |XX| (doubling variant)
    std::size_t card_xxx = 0;         // |X^3|, reported when X is symmetric
    bool symmetric = false;
    Ratio tripling() const { return {card_xinvx_form, card_x}; }
    Ratio doubling() const { return {card_xx, card_x}; }
};

// |X X^-1 X| / |X| plus the doubling variant; when X is symmetric the
// canonical statistic and |X^3| coincide and both are reported.
TriplingStat tripling(const FinSet& X);

// {a b a^-1 b^-1 : a in A, b in B}
FinSet commutator_set(const FinSet& A, const FinSet& B);

// a^X = {x^-1 a x : x in X}
FinSet conj_set(const Elem& a, const FinSet& X);

// Cardinality of a_1^X ... a_l^X by progressive left-to-right products,
// stopping once an intermediate set reaches cap.
struct ConjProdSize {
    std::size_t size = 0;
    bool capped = false;
};
ConjProdSize conj_prod_size(std::span<const Elem> a_list, const FinSet& X, std::size_t cap);

constexpr std::size_t kDefaultConjProdCap = 10'000'000;

// --- streaming helpers (no materialization) --------------------------------

// First pair (i,j) in scan order whose image lies outside `inside`, without
// materializing the image set.  Product: a.b; Commutator: a b a^-1 b^-1;
// Conjugation: a b a^-1 (the left element conjugates the right one).
enum class PairOp { Product, Commutator, Conjugation };
std::optional<std::pair<std::size_t, std::size_t>> first_pair_outside(const FinSet& A, const FinSet& B,
                                                                      PairOp op, const FinSet& inside);

}  // namespace apxgrp
