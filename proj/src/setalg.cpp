#include "apxgrp/setalg.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <exception>
#include <numeric>
#include <sstream>

#include "apxgrp/parallel.hpp"

namespace apxgrp {

namespace {

constexpr std::size_t kMaxWidth = 512;
constexpr std::size_t kPairsPerBlock = 1u << 21;

void sort_unique_blocks(std::vector<std::uint8_t>& data, std::size_t width) {
    const std::size_t n = width ? data.size() / width : 0;
    if (n <= 1) return;
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    const std::uint8_t* base = data.data();
    std::sort(idx.begin(), idx.end(), [base, width](std::uint32_t a, std::uint32_t b) {
        return std::memcmp(base + std::size_t{a} * width, base + std::size_t{b} * width, width) < 0;
    });
    std::vector<std::uint8_t> out;
    out.reserve(data.size());
    const std::uint8_t* prev = nullptr;
    for (std::uint32_t i : idx) {
        const std::uint8_t* cur = base + std::size_t{i} * width;
        if (prev && std::memcmp(prev, cur, width) == 0) continue;
        out.insert(out.end(), cur, cur + width);
        prev = out.data() + out.size() - width;
    }
    data = std::move(out);
}

// Union of two sorted unique block arrays.
std::vector<std::uint8_t> merge_union(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b,
                                      std::size_t width) {
    std::vector<std::uint8_t> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0, na = a.size() / width, nb = b.size() / width;
    while (i < na && j < nb) {
        int c = std::memcmp(a.data() + i * width, b.data() + j * width, width);
        if (c < 0) {
            out.insert(out.end(), a.data() + i * width, a.data() + (i + 1) * width);
            ++i;
        } else if (c > 0) {
            out.insert(out.end(), b.data() + j * width, b.data() + (j + 1) * width);
            ++j;
        } else {
            out.insert(out.end(), a.data() + i * width, a.data() + (i + 1) * width);
            ++i;
            ++j;
        }
    }
    out.insert(out.end(), a.data() + i * width, a.data() + na * width);
    out.insert(out.end(), b.data() + j * width, b.data() + nb * width);
    return out;
}

bool sorted_contains(const std::vector<std::uint8_t>& data, std::size_t width, const std::uint8_t* enc) {
    std::size_t lo = 0, hi = width ? data.size() / width : 0;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        int c = std::memcmp(data.data() + mid * width, enc, width);
        if (c == 0) return true;
        if (c < 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    return false;
}

void require_same_ctx(const FinSet& A, const FinSet& B) {
    if (!A.ctx().interoperable(B.ctx()))
        throw CtxMismatchError("operands belong to different group contexts (" + A.ctx().describe() + " vs " +
                               B.ctx().describe() + ")");
}

// Runs fn over segments of [0,n) and rethrows the lowest-segment exception.
void parallel_checked(std::size_t n, const std::function<void(std::size_t, std::size_t, unsigned)>& fn) {
    unsigned workers = thread_count();
    std::vector<std::exception_ptr> errs(workers + 1);
    parallel_for(n, [&](std::size_t b, std::size_t e, unsigned w) {
        try {
            fn(b, e, w);
        } catch (...) {
            if (w <= workers) errs[w] = std::current_exception();
        }
    });
    for (auto& ep : errs)
        if (ep) std::rethrow_exception(ep);
}

// Kernel evaluating one pair into out (width bytes); scratch holds 2 blocks.
using PairKernel = void (*)(const GroupCtx&, const std::uint8_t*, const std::uint8_t*, std::uint8_t*, std::uint8_t*);

void kernel_product(const GroupCtx& ctx, const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out,
                    std::uint8_t*) {
    ctx.mul_raw(a, b, out);
}

void kernel_commutator(const GroupCtx& ctx, const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out,
                       std::uint8_t* scratch) {
    std::uint8_t* ainv = scratch;
    std::uint8_t* t = scratch + kMaxWidth;
    const std::size_t w = ctx.width();
    ctx.mul_raw(a, b, out);        // ab
    ctx.inv_raw(a, ainv);          // a^-1
    ctx.mul_raw(out, ainv, t);     // a b a^-1
    ctx.inv_raw(b, ainv);          // b^-1
    ctx.mul_raw(t, ainv, out);     // a b a^-1 b^-1
    (void)w;
}

void kernel_conjugation(const GroupCtx& ctx, const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out,
                        std::uint8_t* scratch) {
    std::uint8_t* ainv = scratch;
    std::uint8_t* t = scratch + kMaxWidth;
    ctx.mul_raw(a, b, t);       // ab
    ctx.inv_raw(a, ainv);       // a^-1
    ctx.mul_raw(t, ainv, out);  // a b a^-1
}

PairKernel kernel_for(PairOp op) {
    switch (op) {
        case PairOp::Product: return kernel_product;
        case PairOp::Commutator: return kernel_commutator;
        case PairOp::Conjugation: return kernel_conjugation;
    }
    return kernel_product;
}

// Shared engine: builds the deduplicated image of kernel over A x B, stopping
// early once the accumulated set reaches cap.  Result independent of the
// worker schedule: segment buffers only feed a sort-unique-merge.
FinSet pair_image(const FinSet& A, const FinSet& B, PairKernel kernel, std::size_t cap, bool* capped) {
    require_same_ctx(A, B);
    const GroupCtx& ctx = A.ctx();
    const std::size_t w = ctx.width();
    if (w > kMaxWidth) throw Error("element width exceeds engine limit");
    if (capped) *capped = false;
    if (A.empty() || B.empty()) return FinSet(A.ctx_ptr());

    const std::size_t nb = B.size();
    const std::size_t rows_per_block = std::max<std::size_t>(1, kPairsPerBlock / nb);
    std::vector<std::uint8_t> acc;

    unsigned workers = thread_count();
    std::vector<std::vector<std::uint8_t>> bufs(workers + 1);

    for (std::size_t row0 = 0; row0 < A.size(); row0 += rows_per_block) {
        const std::size_t rows = std::min(rows_per_block, A.size() - row0);
        const std::size_t pairs = rows * nb;
        for (auto& b : bufs) b.clear();
        parallel_checked(pairs, [&](std::size_t pb, std::size_t pe, unsigned seg) {
            std::uint8_t out[kMaxWidth];
            std::uint8_t scratch[2 * kMaxWidth];
            auto& buf = bufs[seg];
            for (std::size_t t = pb; t < pe; ++t) {
                const std::uint8_t* a = A.block(row0 + t / nb);
                const std::uint8_t* b = B.block(t % nb);
                kernel(ctx, a, b, out, scratch);
                if (!sorted_contains(acc, w, out)) buf.insert(buf.end(), out, out + w);
            }
        });
        std::vector<std::uint8_t> fresh;
        for (auto& b : bufs) fresh.insert(fresh.end(), b.begin(), b.end());
        sort_unique_blocks(fresh, w);
        if (!fresh.empty()) acc = acc.empty() ? std::move(fresh) : merge_union(acc, fresh, w);
        if (cap != SIZE_MAX && acc.size() / w >= cap) {
            if (capped) *capped = true;
            break;
        }
    }

    FinSet out(A.ctx_ptr());
    out.adopt_sorted(std::move(acc));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// FinSet
// ---------------------------------------------------------------------------

FinSet::FinSet(CtxPtr ctx) : ctx_(std::move(ctx)), width_(ctx_ ? ctx_->width() : 0) {}

void FinSet::adopt_sorted(std::vector<std::uint8_t> sorted_blocks) { data_ = std::move(sorted_blocks); }

FinSet FinSet::of(CtxPtr ctx, const std::vector<Elem>& elems) {
    SetBuilder b(ctx);
    for (const auto& e : elems) {
        ctx->validate(e);
        b.add(e);
    }
    return b.take();
}

FinSet FinSet::of_literals(CtxPtr ctx, const std::vector<std::string>& literals) {
    SetBuilder b(ctx);
    for (const auto& s : literals) b.add(ctx->parse(s));
    return b.take();
}

FinSet FinSet::from_blocks(CtxPtr ctx, std::vector<std::uint8_t> blocks) {
    const std::size_t w = ctx->width();
    if (blocks.size() % w != 0) throw EncodingError("raw block buffer is not a multiple of the element width");
    for (std::size_t i = 0; i < blocks.size(); i += w) ctx->validate_raw(blocks.data() + i);
    sort_unique_blocks(blocks, w);
    FinSet out(std::move(ctx));
    out.adopt_sorted(std::move(blocks));
    return out;
}

bool FinSet::contains_raw(const std::uint8_t* enc) const { return sorted_contains(data_, width_, enc); }

bool FinSet::contains(const Elem& e) const {
    if (e.enc.size() != width_) return false;
    return contains_raw(reinterpret_cast<const std::uint8_t*>(e.enc.data()));
}

std::optional<std::size_t> FinSet::index_of(const std::uint8_t* enc) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo) / 2;
        int c = std::memcmp(block(mid), enc, width_);
        if (c == 0) return mid;
        if (c < 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    return std::nullopt;
}

Elem FinSet::elem(std::size_t i) const {
    Elem e;
    e.enc.assign(reinterpret_cast<const char*>(block(i)), width_);
    return e;
}

std::vector<Elem> FinSet::elems() const {
    std::vector<Elem> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(elem(i));
    return out;
}

bool FinSet::same_elements(const FinSet& other) const {
    return ctx_->interoperable(*other.ctx_) && data_ == other.data_;
}

bool FinSet::subset_of(const FinSet& other) const {
    if (!ctx_->interoperable(*other.ctx_)) return false;
    if (size() > other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (!other.contains_raw(block(i))) return false;
    return true;
}

std::string FinSet::serialize() const {
    std::ostringstream os;
    os << "# apxgrp-set backend=\"" << ctx_->describe() << "\" count=" << size() << "\n";
    for (std::size_t i = 0; i < size(); ++i) os << ctx_->format_raw(block(i)) << "\n";
    return os.str();
}

FinSet FinSet::deserialize(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string header;
    if (!std::getline(is, header)) throw ConfigError("empty set file");
    auto q0 = header.find('"');
    auto q1 = header.rfind('"');
    if (header.rfind("# apxgrp-set", 0) != 0 || q0 == std::string::npos || q1 <= q0)
        throw ConfigError("set file must start with '# apxgrp-set backend=\"...\"'");
    CtxPtr ctx = GroupCtx::from_descriptor(header.substr(q0 + 1, q1 - q0 - 1));
    SetBuilder b(ctx);
    std::string line;
    while (std::getline(is, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        b.add(ctx->parse(line));
    }
    return b.take();
}

// ---------------------------------------------------------------------------
// SetBuilder
// ---------------------------------------------------------------------------

SetBuilder::SetBuilder(CtxPtr ctx) : ctx_(std::move(ctx)), width_(ctx_->width()) {}

void SetBuilder::add_raw(const std::uint8_t* enc) { buf_.insert(buf_.end(), enc, enc + width_); }

void SetBuilder::add(const Elem& e) {
    if (e.enc.size() != width_) throw EncodingError("element width does not match context");
    add_raw(reinterpret_cast<const std::uint8_t*>(e.enc.data()));
}

FinSet SetBuilder::take() {
    sort_unique_blocks(buf_, width_);
    FinSet out(ctx_);
    out.adopt_sorted(std::move(buf_));
    buf_.clear();
    return out;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

FinSet product(const FinSet& A, const FinSet& B) { return pair_image(A, B, kernel_product, SIZE_MAX, nullptr); }

std::pair<FinSet, bool> product_capped(const FinSet& A, const FinSet& B, std::size_t cap) {
    bool capped = false;
    FinSet r = pair_image(A, B, kernel_product, cap, &capped);
    return {std::move(r), capped};
}

FinSet inverse_set(const FinSet& A) {
    const GroupCtx& ctx = A.ctx();
    const std::size_t w = ctx.width();
    std::vector<std::uint8_t> blocks(A.size() * w);
    parallel_checked(A.size(), [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t i = b; i < e; ++i) ctx.inv_raw(A.block(i), blocks.data() + i * w);
    });
    sort_unique_blocks(blocks, w);
    FinSet out(A.ctx_ptr());
    out.adopt_sorted(std::move(blocks));
    return out;
}

FinSet symmetrize(const FinSet& X) {
    const GroupCtx& ctx = X.ctx();
    const std::size_t w = ctx.width();
    std::vector<std::uint8_t> blocks((2 * X.size() + 1) * w);
    std::memcpy(blocks.data(), X.data(), X.size() * w);
    parallel_checked(X.size(), [&](std::size_t b, std::size_t e, unsigned) {
        for (std::size_t i = b; i < e; ++i) ctx.inv_raw(X.block(i), blocks.data() + (X.size() + i) * w);
    });
    ctx.id_raw(blocks.data() + 2 * X.size() * w);
    sort_unique_blocks(blocks, w);
    FinSet out(X.ctx_ptr());
    out.adopt_sorted(std::move(blocks));
    return out;
}

FinSet power(const FinSet& X, std::size_t n) {
    if (n < 1) throw ConfigError("set power requires n >= 1");
    FinSet acc = X;
    for (std::size_t i = 1; i < n; ++i) acc = product(acc, X);
    return acc;
}

FinSet set_union(const FinSet& A, const FinSet& B) {
    require_same_ctx(A, B);
    std::vector<std::uint8_t> a(A.data(), A.data() + A.size() * A.width());
    std::vector<std::uint8_t> b(B.data(), B.data() + B.size() * B.width());
    FinSet out(A.ctx_ptr());
    out.adopt_sorted(merge_union(a, b, A.width()));
    return out;
}

bool is_symmetric(const FinSet& X) {
    const GroupCtx& ctx = X.ctx();
    std::uint8_t inv[kMaxWidth];
    for (std::size_t i = 0; i < X.size(); ++i) {
        ctx.inv_raw(X.block(i), inv);
        if (!X.contains_raw(inv)) return false;
    }
    return true;
}

bool contains_identity(const FinSet& X) {
    std::uint8_t id[kMaxWidth];
    X.ctx().id_raw(id);
    return X.contains_raw(id);
}

TriplingStat tripling(const FinSet& X) {
    if (X.empty()) throw ConfigError("tripling requires a nonempty set");
    TriplingStat st;
    st.card_x = X.size();
    st.symmetric = is_symmetric(X);
    FinSet xx = product(X, X);
    st.card_xx = xx.size();
    if (st.symmetric) {
        FinSet xxx = product(xx, X);
        st.card_xxx = xxx.size();
        st.card_xinvx_form = xxx.size();  // X = X^-1 makes the two statistics coincide
    } else {
        FinSet xxinv = product(X, inverse_set(X));
        FinSet xxinvx = product(xxinv, X);
        st.card_xinvx_form = xxinvx.size();
        st.card_xxx = 0;
    }
    return st;
}

FinSet commutator_set(const FinSet& A, const FinSet& B) {
    return pair_image(A, B, kernel_commutator, SIZE_MAX, nullptr);
}

FinSet conj_set(const Elem& a, const FinSet& X) {
    const GroupCtx& ctx = X.ctx();
    ctx.validate(a);
    const std::size_t w = ctx.width();
    const auto* araw = reinterpret_cast<const std::uint8_t*>(a.enc.data());
    std::vector<std::uint8_t> blocks(X.size() * w);
    parallel_checked(X.size(), [&](std::size_t b, std::size_t e, unsigned) {
        std::uint8_t xinv[kMaxWidth], t[kMaxWidth];
        for (std::size_t i = b; i < e; ++i) {
            ctx.inv_raw(X.block(i), xinv);
            ctx.mul_raw(xinv, araw, t);
            ctx.mul_raw(t, X.block(i), blocks.data() + i * w);
        }
    });
    sort_unique_blocks(blocks, w);
    FinSet out(X.ctx_ptr());
    out.adopt_sorted(std::move(blocks));
    return out;
}

ConjProdSize conj_prod_size(std::span<const Elem> a_list, const FinSet& X, std::size_t cap) {
    if (a_list.empty()) throw ConfigError("conj_prod_size requires a nonempty element list");
    if (cap < 1) throw ConfigError("conj_prod_size cap must be >= 1");
    FinSet acc = conj_set(a_list[0], X);
    for (std::size_t i = 1; i < a_list.size(); ++i) {
        if (acc.size() >= cap) return {acc.size(), true};
        auto [next, capped] = product_capped(acc, conj_set(a_list[i], X), cap);
        if (capped) return {next.size(), true};
        acc = std::move(next);
    }
    return {acc.size(), acc.size() >= cap};
}

std::optional<std::pair<std::size_t, std::size_t>> first_pair_outside(const FinSet& A, const FinSet& B, PairOp op,
                                                                      const FinSet& inside) {
    require_same_ctx(A, B);
    require_same_ctx(A, inside);
    PairKernel kernel = kernel_for(op);
    const GroupCtx& ctx = A.ctx();
    const std::size_t nb = B.size();
    if (A.empty() || B.empty()) return std::nullopt;
    const std::size_t total = A.size() * nb;
    const std::size_t block = std::max<std::size_t>(nb, 1u << 22);

    for (std::size_t start = 0; start < total; start += block) {
        const std::size_t count = std::min(block, total - start);
        std::atomic<std::size_t> best{SIZE_MAX};
        parallel_checked(count, [&](std::size_t pb, std::size_t pe, unsigned) {
            std::uint8_t out[kMaxWidth];
            std::uint8_t scratch[2 * kMaxWidth];
            for (std::size_t t = pb; t < pe; ++t) {
                if ((t & 0xfff) == 0 && best.load(std::memory_order_relaxed) < start + pb) return;
                std::size_t idx = start + t;
                kernel(ctx, A.block(idx / nb), B.block(idx % nb), out, scratch);
                if (!inside.contains_raw(out)) {
                    std::size_t cur = best.load(std::memory_order_relaxed);
                    while (idx < cur && !best.compare_exchange_weak(cur, idx, std::memory_order_relaxed)) {
                    }
                    return;
                }
            }
        });
        std::size_t found = best.load();
        if (found != SIZE_MAX) return std::make_pair(found / nb, found % nb);
    }
    return std::nullopt;
}

}  // namespace apxgrp
