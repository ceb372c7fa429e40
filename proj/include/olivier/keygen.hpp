#pragma once

#include <optional>
#include <string_view>

#include "olivier/hash.hpp"
#include "olivier/quadform.hpp"

namespace olivier {

/// Scheme parameters: n oil+vinegar variables of which v are vinegar, and u
/// fully quadratic equations mixed into the public key. The public system
/// has m = n + u equations.
struct Params {
    std::size_t n = 0;
    std::size_t v = 0;
    std::size_t u = 0;

    std::size_t m() const { return n + u; }
    std::size_t oil() const { return n - v; }
    OvShape shape() const { return OvShape{n, v}; }

    bool valid() const { return v >= 1 && v < n && n - v > v && u >= n; }

    static Params sl1() { return {320, 24, 640}; }
    static Params sl2() { return {640, 29, 1280}; }
    static Params sl3() { return {1280, 36, 2560}; }

    static std::optional<Params> preset(std::string_view name) {
        if (name == "SL1" || name == "sl1") return sl1();
        if (name == "SL2" || name == "sl2") return sl2();
        if (name == "SL3" || name == "sl3") return sl3();
        return std::nullopt;
    }

    bool operator==(const Params&) const = default;
};

inline constexpr std::string_view kTagExpandQ = "OLVR-Q";
inline constexpr std::string_view kTagConfirm = "OLVR-confirm";
inline constexpr std::string_view kTagSecret = "OLVR-secret";

/// Deterministically expand the u fully quadratic polynomials from a seed.
/// Each polynomial consumes ceil(bits/8) whole bytes of the XOF stream, bits
/// LSB-first in canonical coefficient order, so the expansion matches the
/// serialized polynomial layout byte for byte.
inline QuadraticSystem expand_q(const Seed& seed, const Params& params) {
    XofStream xof(kTagExpandQ, seed);
    const std::size_t nbits = full_coeff_bits(params.n);
    std::vector<QuadraticPoly> polys;
    polys.reserve(params.u);
    for (std::size_t i = 0; i < params.u; ++i)
        polys.push_back(unpack_coeffs(xof.bits(nbits), params.n));
    return QuadraticSystem(std::move(polys));
}

struct PrivateKey {
    Params params;
    QuadraticSystem f;    // n OV polynomials (the central map)
    BitMatrix s;          // invertible change of coordinates
    BitMatrix s_inv;
    BitMatrix lambda;     // n x u, full row rank
    Seed seed{};          // regenerates the fully quadratic block
};

struct PublicKey {
    Params params;
    QuadraticSystem head;  // p_1..p_n
    Seed seed{};           // p_{n+1}..p_m are expand_q(seed)
    QuadraticSystem tail;  // cached expansion of seed; derived, never stored

    BitVector evaluate(const BitVector& x) const {
        return head.evaluate(x).concat(tail.evaluate(x));
    }
};

struct KeyPair {
    PublicKey pub;
    PrivateKey priv;
};

/// head_i = (f_i o S) + sum_j lambda_ij q_j, recomputed from the private key.
inline QuadraticSystem derive_public_head(const PrivateKey& sk) {
    const QuadraticSystem q = expand_q(sk.seed, sk.params);
    std::vector<QuadraticPoly> head;
    head.reserve(sk.params.n);
    for (std::size_t i = 0; i < sk.params.n; ++i) {
        QuadraticPoly p = sk.f.polys[i].compose_right_linear(sk.s);
        for (std::size_t j = 0; j < sk.params.u; ++j)
            if (sk.lambda.get(i, j)) p ^= q.polys[j];
        head.push_back(std::move(p));
    }
    return QuadraticSystem(std::move(head));
}

struct KeygenOptions {
    /// Drop the linear and constant parts of the central polynomials, so the
    /// central map vanishes identically on the hidden oil space. The key
    /// exchange works either way; the probabilistic oil-reconstruction
    /// experiments need this variant because their rank certificate reads
    /// P(v) = (Lambda Q(v); Q(v)) off genuine oil vectors.
    bool homogeneous_central = false;
};

inline KeyPair keygen(const Params& params, Rng& rng, const KeygenOptions& opts) {
    if (!params.valid()) throw std::invalid_argument("keygen: invalid parameters");

    PrivateKey sk;
    sk.params = params;
    sk.seed = rng.bytes32();

    std::vector<QuadraticPoly> central;
    central.reserve(params.n);
    for (std::size_t i = 0; i < params.n; ++i) {
        QuadraticPoly f = QuadraticPoly::random_ov(params.shape(), rng);
        if (opts.homogeneous_central) {
            for (std::size_t k = 0; k < params.n; ++k) f.set_lin(k, false);
            f.set_constant(false);
        }
        central.push_back(std::move(f));
    }
    sk.f = QuadraticSystem(std::move(central));

    sk.s = random_invertible(params.n, rng);
    sk.s_inv = *inverse(sk.s);

    do {
        sk.lambda = random_matrix(params.n, params.u, rng);
    } while (rank(sk.lambda) != params.n);

    PublicKey pk;
    pk.params = params;
    pk.seed = sk.seed;
    pk.head = derive_public_head(sk);
    pk.tail = expand_q(sk.seed, params);
    return KeyPair{std::move(pk), std::move(sk)};
}

inline KeyPair keygen(const Params& params, Rng& rng) { return keygen(params, rng, {}); }

/// Full public evaluation P(x): n head bits followed by u tail bits.
inline BitVector public_evaluate(const PublicKey& pk, const BitVector& x) {
    if (x.size() != pk.params.n) throw std::invalid_argument("public_evaluate: length mismatch");
    return pk.evaluate(x);
}

namespace detail {

/// Rows of M select xor-combinations of the given polynomials.
inline std::vector<QuadraticPoly> combine_polys(const BitMatrix& m,
                                                std::span<const QuadraticPoly> polys) {
    if (m.cols() != polys.size()) throw std::invalid_argument("combine_polys: shape mismatch");
    std::vector<QuadraticPoly> out;
    out.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        QuadraticPoly p(polys.empty() ? 0 : polys[0].n());
        for (std::size_t j = 0; j < polys.size(); ++j)
            if (m.get(i, j)) p ^= polys[j];
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace detail

/// Checks the block decomposition of an arbitrary left transform T applied to
/// the stacked system (F o S over Q): with T = (T1 T2; T3 T4) and Q' = T3 (FoS)
/// + T4 Q, the head block must equal (T1 + T2 T4^-1 T3)(FoS) + T2 T4^-1 Q'.
/// This is why publishing with the upper-triangular lambda block loses no
/// generality against full invertible transforms.
inline bool block_transform_equivalence_check(const PrivateKey& sk, const BitMatrix& t) {
    const std::size_t n = sk.params.n, u = sk.params.u, m = sk.params.m();
    if (t.rows() != m || t.cols() != m)
        throw std::invalid_argument("block_transform_equivalence_check: T must be m x m");
    if (rank(t) != m) throw std::invalid_argument("block_transform_equivalence_check: T singular");
    BitMatrix t4 = BitMatrix(u, u);
    for (std::size_t i = 0; i < u; ++i)
        for (std::size_t j = 0; j < u; ++j) t4.set(i, j, t.get(n + i, n + j));
    auto t4_inv = inverse(t4);
    if (!t4_inv) throw std::invalid_argument("block_transform_equivalence_check: T4 singular");

    BitMatrix t1(n, n), t2(n, u), t3(u, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) t1.set(i, j, t.get(i, j));
        for (std::size_t j = 0; j < u; ++j) t2.set(i, j, t.get(i, n + j));
    }
    for (std::size_t i = 0; i < u; ++i)
        for (std::size_t j = 0; j < n; ++j) t3.set(i, j, t.get(n + i, j));

    std::vector<QuadraticPoly> fos;
    fos.reserve(n);
    for (const auto& f : sk.f.polys) fos.push_back(f.compose_right_linear(sk.s));
    const QuadraticSystem q = expand_q(sk.seed, sk.params);

    // Left side: T applied to the stacked system.
    std::vector<QuadraticPoly> stacked = fos;
    stacked.insert(stacked.end(), q.polys.begin(), q.polys.end());
    std::vector<QuadraticPoly> transformed = detail::combine_polys(t, stacked);

    // Right side of the decomposition.
    std::vector<QuadraticPoly> q_prime = detail::combine_polys(t3, fos);
    {
        auto t4q = detail::combine_polys(t4, q.polys);
        for (std::size_t i = 0; i < u; ++i) q_prime[i] ^= t4q[i];
    }
    BitMatrix a = mat_mul(t2, *t4_inv);                    // T2 T4^-1
    BitMatrix head_mix = t1 ^ mat_mul(a, t3);              // T1 + T2 T4^-1 T3
    std::vector<QuadraticPoly> rhs_head = detail::combine_polys(head_mix, fos);
    {
        auto aq = detail::combine_polys(a, q_prime);
        for (std::size_t i = 0; i < n; ++i) rhs_head[i] ^= aq[i];
    }

    for (std::size_t i = 0; i < n; ++i)
        if (transformed[i] != rhs_head[i]) return false;
    for (std::size_t i = 0; i < u; ++i)
        if (transformed[n + i] != q_prime[i]) return false;
    return true;
}

}  // namespace olivier
