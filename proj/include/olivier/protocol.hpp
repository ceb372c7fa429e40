#pragma once

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "olivier/keygen.hpp"

namespace olivier {

/// Thrown when the guess space is exhausted without a verified plaintext
/// (malformed batch or corrupted key material).
struct ExhaustedError : std::runtime_error {
    ExhaustedError() : std::runtime_error("decapsulation exhausted the guess space") {}
};

struct SessionConfig {
    std::size_t t = 64;        // ciphertext batch size, multiple of 64
    std::size_t theta = 8;     // rows checked before the OR early abort
    std::size_t chunk = 8;     // Gray / Four-Russians chunk width
    bool verify_full = true;   // re-verify P(x) = b_k before accepting
    std::size_t workers = 1;   // fast-path guess loop parallelism, 0 = auto
    std::size_t solution_cap = 1024;  // affine solutions tried per column

    void validate(const Params& p) const {
        if (t < 1 || t % 64 != 0) throw std::invalid_argument("SessionConfig: t must be a positive multiple of 64");
        if (theta < 1 || theta > p.oil()) throw std::invalid_argument("SessionConfig: theta out of range");
        if (chunk < 1 || chunk > 16) throw std::invalid_argument("SessionConfig: chunk width out of range");
    }
};

/// Alice's message: t evaluation vectors b_i = P(a_i), each of length m.
struct CipherBatch {
    std::size_t t = 0;
    std::size_t m = 0;
    std::vector<BitVector> vectors;
};

/// Alice's retained side of the session.
struct EncapsState {
    std::vector<BitVector> plaintexts;
    std::vector<Digest> hashes;
};

struct DecapResult {
    BitVector plaintext;          // x with P(x) = b_column
    BitVector guess;              // the vinegar assignment that succeeded
    std::size_t column = 0;       // which ciphertext was inverted
    std::uint64_t guesses_tried = 0;
};

/// Fast-path instrumentation; purely diagnostic.
struct DecapStats {
    std::uint64_t guesses = 0;
    std::uint64_t filter_aborts = 0;
    std::uint64_t full_checks = 0;
    std::uint64_t wrong_columns = 0;    // columns examined on wrong guesses
    std::uint64_t wrong_survivors = 0;  // of those, survivors of the theta filter
    std::uint64_t aborted_with_candidate = 0;  // paranoia counter, must stay 0
};

inline BitVector gray_code_vector(std::uint64_t g, std::size_t v) {
    if (v > 63) throw std::invalid_argument("gray_code_vector: enumeration width too large");
    return BitVector::from_word(g ^ (g >> 1), v);
}

/// Alice: draw t distinct plaintexts, publish their images under P, retain
/// the plaintexts and their confirmation hashes.
inline std::pair<CipherBatch, EncapsState> encapsulate(const PublicKey& pk, const SessionConfig& cfg,
                                                       Rng& rng) {
    cfg.validate(pk.params);
    if (pk.params.n < 64 && (std::uint64_t(1) << pk.params.n) < cfg.t)
        throw std::invalid_argument("encapsulate: t exceeds the plaintext space");
    CipherBatch batch;
    batch.t = cfg.t;
    batch.m = pk.params.m();
    EncapsState state;
    while (state.plaintexts.size() < cfg.t) {
        BitVector a = rng.bits(pk.params.n);
        bool dup = false;
        for (const auto& prev : state.plaintexts)
            if (prev == a) { dup = true; break; }
        if (dup) continue;
        batch.vectors.push_back(public_evaluate(pk, a));
        state.hashes.push_back(hash_bits(kTagConfirm, a));
        state.plaintexts.push_back(std::move(a));
    }
    return {std::move(batch), std::move(state)};
}

/// Bob, step 1: remove the fully quadratic contribution from every ciphertext.
/// Column i of the returned n x t matrix equals (F o S)(a_i) for honest input.
inline BitMatrix strip_lambda(const PrivateKey& sk, const CipherBatch& batch) {
    const std::size_t n = sk.params.n, u = sk.params.u;
    if (batch.m != sk.params.m()) throw std::invalid_argument("strip_lambda: batch arity mismatch");
    BitMatrix head(n, batch.t), tail(u, batch.t);
    for (std::size_t i = 0; i < batch.t; ++i) {
        const BitVector& b = batch.vectors[i];
        if (b.size() != batch.m) throw std::invalid_argument("strip_lambda: ragged batch");
        for (std::size_t j = 0; j < n; ++j)
            if (b.get(j)) head.set(j, i, true);
        for (std::size_t k = 0; k < u; ++k)
            if (b.get(n + k)) tail.set(k, i, true);
    }
    return head ^ mat_mul(sk.lambda, tail);
}

/// Bob, step 2: fix the vinegar variables. Returns the oil coefficient
/// matrix M and the affine constants c with f_j(ybar, y_oil) = (M y_oil)_j + c_j.
/// (The constants drop out of the usual matrix notation but are required for
/// the right-hand sides.)
inline std::pair<BitMatrix, BitVector> specialize_vinegar(const PrivateKey& sk,
                                                          const BitVector& y_bar) {
    const std::size_t n = sk.params.n, v = sk.params.v, o = sk.params.oil();
    if (y_bar.size() != v) throw std::invalid_argument("specialize_vinegar: vinegar length mismatch");
    BitMatrix m(n, o);
    BitVector c(n);
    const BitVector padded = y_bar.concat(BitVector(o));
    for (std::size_t j = 0; j < n; ++j) {
        const QuadraticPoly& f = sk.f.polys[j];
        BitVector row = f.lin().slice(v, n);
        for (std::size_t i = 0; i < v; ++i)
            if (y_bar.get(i)) row ^= f.quad().row_vector(i).slice(v, n);
        m.set_row(j, row);
        if (f.evaluate(padded)) c.set(j, true);
    }
    return {std::move(m), std::move(c)};
}

namespace detail {

struct SpecializedGuess {
    BitMatrix m;                   // n x (n-v) oil coefficients
    BitVector c;                   // affine constants
    std::vector<BitVector> wp;     // rows of W' = W + c * 1^t
    EliminationTranscript tr;
};

inline SpecializedGuess specialize_guess(const PrivateKey& sk, std::span<const BitVector> w_rows,
                                         const BitVector& ones_t, const BitVector& y_bar) {
    SpecializedGuess g;
    auto [m, c] = specialize_vinegar(sk, y_bar);
    g.m = std::move(m);
    g.c = std::move(c);
    g.wp.reserve(w_rows.size());
    for (std::size_t j = 0; j < w_rows.size(); ++j)
        g.wp.push_back(g.c.get(j) ? (w_rows[j] ^ ones_t) : w_rows[j]);
    g.tr = row_reduce_with_transcript(g.m);
    return g;
}

/// Residual of dependent row k: W'_i + sum_j d_ij W'_{pivot_j}. Zero entries
/// mark columns still consistent with this guess.
inline BitVector residual_row(const SpecializedGuess& g, std::size_t k) {
    BitVector res = g.wp[g.tr.dependent_rows[k]];
    const BitVector& d = g.tr.dependency[k];
    for (std::size_t j = 0; j < g.tr.rank; ++j)
        if (d.get(j)) res ^= g.wp[g.tr.pivot_rows[j]];
    return res;
}

/// Columns whose every dependent-row residual vanishes.
inline BitVector candidate_columns(const SpecializedGuess& g, const BitVector& ones_t) {
    BitVector or_acc(ones_t.size());
    for (std::size_t k = 0; k < g.tr.dependent_rows.size(); ++k) or_acc |= residual_row(g, k);
    return ~or_acc;
}

struct VerifyContext {
    const PrivateKey& sk;
    const QuadraticSystem& q;  // expanded tail, for full verification
};

/// Solve M y_oil = w'_k and scan the affine solution set (particular first,
/// then kernel combinations in Gray order, capped). Returns the plaintext of
/// the first solution passing verification.
inline std::optional<BitVector> try_column(const VerifyContext& ctx, const SpecializedGuess& g,
                                           const BitVector& y_bar, std::size_t k,
                                           const CipherBatch& batch, const SessionConfig& cfg) {
    const Params& p = ctx.sk.params;
    BitVector rhs(p.n);
    for (std::size_t j = 0; j < p.n; ++j)
        if (g.wp[j].get(k)) rhs.set(j, true);
    auto sol = solve_affine(g.m, rhs);
    if (!sol) return std::nullopt;

    auto check = [&](const BitVector& y_oil) -> std::optional<BitVector> {
        BitVector y = y_bar.concat(y_oil);
        BitVector x = ctx.sk.s_inv.mul(y);
        if (!cfg.verify_full) return x;
        BitVector tail_bits = ctx.q.evaluate(x);
        BitVector head_bits = ctx.sk.f.evaluate(y) ^ ctx.sk.lambda.mul(tail_bits);
        if (head_bits.concat(tail_bits) == batch.vectors[k]) return x;
        return std::nullopt;
    };

    if (auto x = check(sol->particular)) return x;
    const std::size_t dim = sol->kernel.size();
    if (dim == 0) return std::nullopt;
    std::uint64_t total = dim >= 63 ? ~std::uint64_t(0) : (std::uint64_t(1) << dim);
    BitVector cur = sol->particular;
    for (std::uint64_t gidx = 1; gidx < total && gidx < cfg.solution_cap; ++gidx) {
        cur ^= sol->kernel[std::size_t(std::countr_zero(gidx))];
        if (auto x = check(cur)) return x;
    }
    return std::nullopt;
}

}  // namespace detail

/// One vinegar guess against a stripped batch: returns the smallest column
/// index whose linear system is consistent, or nullopt.
inline std::optional<std::size_t> guess_once(const PrivateKey& sk, const BitMatrix& w,
                                             const BitVector& y_bar, const SessionConfig& cfg) {
    (void)cfg;
    const std::size_t t = w.cols();
    std::vector<BitVector> w_rows;
    w_rows.reserve(w.rows());
    for (std::size_t j = 0; j < w.rows(); ++j) w_rows.push_back(w.row_vector(j));
    const BitVector ones_t = BitVector::ones(t);
    auto g = detail::specialize_guess(sk, w_rows, ones_t, y_bar);
    BitVector cand = detail::candidate_columns(g, ones_t);
    long k = cand.lowest_set();
    if (k < 0) return std::nullopt;
    return std::size_t(k);
}

/// Reference decryption: enumerate vinegar assignments in Gray-code order,
/// solve the specialized linear system on every consistent column, verify.
inline DecapResult decapsulate(const PrivateKey& sk, const CipherBatch& batch,
                               const SessionConfig& cfg) {
    cfg.validate(sk.params);
    const Params& p = sk.params;
    if (p.v >= 64) throw std::invalid_argument("decapsulate: guess space too large to enumerate");
    const BitMatrix w = strip_lambda(sk, batch);
    std::vector<BitVector> w_rows;
    for (std::size_t j = 0; j < p.n; ++j) w_rows.push_back(w.row_vector(j));
    const BitVector ones_t = BitVector::ones(batch.t);
    const QuadraticSystem q = expand_q(sk.seed, p);
    detail::VerifyContext ctx{sk, q};

    const std::uint64_t total = std::uint64_t(1) << p.v;
    for (std::uint64_t gidx = 0; gidx < total; ++gidx) {
        BitVector y_bar = gray_code_vector(gidx, p.v);
        auto g = detail::specialize_guess(sk, w_rows, ones_t, y_bar);
        BitVector cand = detail::candidate_columns(g, ones_t);
        for (long k = cand.lowest_set(); k >= 0;) {
            if (auto x = detail::try_column(ctx, g, y_bar, std::size_t(k), batch, cfg))
                return DecapResult{std::move(*x), std::move(y_bar), std::size_t(k), gidx + 1};
            cand.set(std::size_t(k), false);
            k = cand.lowest_set();
        }
    }
    throw ExhaustedError{};
}

namespace detail {

/// Shared read-only state of the optimized guess loop: chunked Gray tables
/// over the rows of W. The per-guess constant vector only flips whole rows,
/// so a residual over W' is a table combination over W plus a parity fixup.
struct FastTables {
    std::size_t n = 0, t = 0;
    unsigned s = 8;
    std::vector<BitVector> w_rows;
    std::vector<std::vector<BitVector>> tables;  // ceil(n/s) tables of 2^s entries
    BitVector ones_t;

    FastTables(const BitMatrix& w, unsigned chunk) : n(w.rows()), t(w.cols()), s(chunk) {
        for (std::size_t j = 0; j < n; ++j) w_rows.push_back(w.row_vector(j));
        ones_t = BitVector::ones(t);
        const std::size_t chunks = (n + s - 1) / s;
        std::vector<BitVector> group;
        for (std::size_t h = 0; h < chunks; ++h) {
            const std::size_t lo = h * s;
            const unsigned width = unsigned(std::min<std::size_t>(s, n - lo));
            group.assign(w_rows.begin() + long(lo), w_rows.begin() + long(lo + width));
            tables.push_back(gray_combination_table(group, width));
        }
    }

    /// Combination of W rows selected by gamma, via chunk-table lookups.
    BitVector combine(const BitVector& gamma) const {
        BitVector acc(t);
        for (std::size_t h = 0; h < tables.size(); ++h) {
            const std::size_t lo = h * s;
            const unsigned width = unsigned(std::min<std::size_t>(s, n - lo));
            const std::size_t wi = lo / kWordBits, off = lo % kWordBits;
            Word x = gamma.words()[wi] >> off;
            if (off != 0 && wi + 1 < gamma.words().size())
                x |= gamma.words()[wi + 1] << (kWordBits - off);
            x &= (Word(1) << width) - 1;
            acc ^= tables[h][std::size_t(x)];
        }
        return acc;
    }
};

/// Residual of dependent row k computed from the W tables.
inline BitVector residual_row_fast(const FastTables& ft, const SpecializedGuess& g, std::size_t k) {
    const std::size_t i = g.tr.dependent_rows[k];
    BitVector gamma(ft.n);
    const BitVector& d = g.tr.dependency[k];
    for (std::size_t j = 0; j < g.tr.rank; ++j)
        if (d.get(j)) gamma.set(g.tr.pivot_rows[j], true);
    BitVector res = ft.combine(gamma);
    res ^= ft.w_rows[i];
    if (gamma.dot(g.c) ^ g.c.get(i)) res ^= ft.ones_t;
    return res;
}

struct FastOutcome {
    std::optional<DecapResult> result;
    DecapStats stats;
};

/// Process guesses [g_begin, g_end); stop early once `stop_before` drops
/// under the current position.
inline FastOutcome fast_scan_range(const PrivateKey& sk, const CipherBatch& batch,
                                   const SessionConfig& cfg, const FastTables& ft,
                                   const VerifyContext& ctx, std::uint64_t g_begin,
                                   std::uint64_t g_end, const std::atomic<std::uint64_t>* stop_before,
                                   bool paranoid) {
    FastOutcome out;
    const Params& p = sk.params;
    for (std::uint64_t gidx = g_begin; gidx < g_end; ++gidx) {
        if (stop_before && gidx >= stop_before->load(std::memory_order_relaxed)) break;
        BitVector y_bar = gray_code_vector(gidx, p.v);
        auto g = specialize_guess(sk, ft.w_rows, ft.ones_t, y_bar);
        out.stats.guesses++;

        const std::size_t dep = g.tr.dependent_rows.size();
        const std::size_t theta = std::min(cfg.theta, dep);
        BitVector or_acc(ft.t);
        for (std::size_t k = 0; k < theta; ++k) or_acc |= residual_row_fast(ft, g, k);

        if (or_acc == ft.ones_t) {
            out.stats.filter_aborts++;
            out.stats.wrong_columns += ft.t;
            if (paranoid && candidate_columns(g, ft.ones_t).any()) out.stats.aborted_with_candidate++;
            continue;
        }
        const std::uint64_t survivors = (~or_acc).popcount();
        out.stats.full_checks++;
        for (std::size_t k = theta; k < dep; ++k) or_acc |= residual_row_fast(ft, g, k);
        BitVector cand = ~or_acc;
        bool solved = false;
        for (long k = cand.lowest_set(); k >= 0;) {
            if (auto x = try_column(ctx, g, y_bar, std::size_t(k), batch, cfg)) {
                out.result = DecapResult{std::move(*x), std::move(y_bar), std::size_t(k), gidx + 1};
                solved = true;
                break;
            }
            cand.set(std::size_t(k), false);
            k = cand.lowest_set();
        }
        if (solved) break;
        out.stats.wrong_columns += ft.t;
        out.stats.wrong_survivors += survivors;
    }
    return out;
}

}  // namespace detail

/// Optimized decryption: per-session Gray tables over the rows of W, and the
/// theta-row OR test to discard wrong guesses early. Bit-identical plaintexts
/// to decapsulate() on honest batches. With several workers the guess space
/// is split into blocks claimed in enumeration order; the success with the
/// smallest enumeration index wins, so the result does not depend on the
/// worker count.
inline DecapResult decapsulate_fast(const PrivateKey& sk, const CipherBatch& batch,
                                    const SessionConfig& cfg, DecapStats* stats = nullptr,
                                    bool paranoid = false) {
    cfg.validate(sk.params);
    const Params& p = sk.params;
    if (p.v >= 64) throw std::invalid_argument("decapsulate: guess space too large to enumerate");
    const BitMatrix w = strip_lambda(sk, batch);
    const detail::FastTables ft(w, unsigned(cfg.chunk));
    const QuadraticSystem q = expand_q(sk.seed, p);
    const detail::VerifyContext ctx{sk, q};
    const std::uint64_t total = std::uint64_t(1) << p.v;

    std::size_t workers = cfg.workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                           : cfg.workers;
    if (workers <= 1) {
        auto out = detail::fast_scan_range(sk, batch, cfg, ft, ctx, 0, total, nullptr, paranoid);
        if (stats) *stats = out.stats;
        if (!out.result) throw ExhaustedError{};
        return *std::move(out.result);
    }

    const std::uint64_t block = 1024;
    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> stop_before{total};
    std::mutex mu;
    std::optional<DecapResult> best;
    DecapStats merged;
    auto work = [&] {
        for (;;) {
            std::uint64_t lo = next.fetch_add(block);
            if (lo >= total || lo >= stop_before.load()) break;
            std::uint64_t hi = std::min(total, lo + block);
            auto out = detail::fast_scan_range(sk, batch, cfg, ft, ctx, lo, hi, &stop_before, paranoid);
            std::lock_guard<std::mutex> lock(mu);
            merged.guesses += out.stats.guesses;
            merged.filter_aborts += out.stats.filter_aborts;
            merged.full_checks += out.stats.full_checks;
            merged.wrong_columns += out.stats.wrong_columns;
            merged.wrong_survivors += out.stats.wrong_survivors;
            merged.aborted_with_candidate += out.stats.aborted_with_candidate;
            if (out.result && (!best || out.result->guesses_tried < best->guesses_tried)) {
                best = std::move(out.result);
                // Blocks past the successful one cannot beat it.
                std::uint64_t cur = stop_before.load();
                while (best->guesses_tried < cur &&
                       !stop_before.compare_exchange_weak(cur, best->guesses_tried)) {}
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (stats) *stats = merged;
    if (!best) throw ExhaustedError{};
    return *std::move(best);
}

/// Bob -> Alice wire digest.
inline Digest confirm_digest(const BitVector& plaintext) {
    return hash_bits(kTagConfirm, plaintext);
}

/// Shared secret derivation, identical on both sides.
inline Digest shared_secret(const BitVector& plaintext) {
    return hash_bits(kTagSecret, plaintext);
}

/// Alice: match Bob's plaintext hash against the session hashes; on a match
/// both parties derive the shared secret from the agreed plaintext.
inline std::optional<Digest> confirm(const DecapResult& result, const EncapsState& state) {
    const Digest d = confirm_digest(result.plaintext);
    for (std::size_t i = 0; i < state.hashes.size(); ++i)
        if (state.hashes[i] == d) return shared_secret(state.plaintexts[i]);
    return std::nullopt;
}

/// Worst-case operation count of the optimized guess loop, as a closed form:
/// 2^(v - log2 t) * ((n - v)/s * theta + theta).
inline std::uint64_t op_count_estimate(const Params& p, const SessionConfig& cfg) {
    if (cfg.t == 0 || (cfg.t & (cfg.t - 1)) != 0)
        throw std::invalid_argument("op_count_estimate: t must be a power of two");
    const int log2t = std::countr_zero(cfg.t);
    const double per_guess = double(p.n - p.v) / double(cfg.chunk) * double(cfg.theta) +
                             double(cfg.theta);
    return std::uint64_t(std::llround(std::ldexp(per_guess, int(p.v) - log2t)));
}

}  // namespace olivier
