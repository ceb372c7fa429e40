#pragma once

#include <utility>
#include <vector>

#include "olivier/bitmatrix.hpp"

namespace olivier {

/// Variable split for Oil & Vinegar polynomials: coordinates 0..v-1 are
/// vinegar, v..n-1 are oil. An OV polynomial has no oil*oil monomial.
struct OvShape {
    std::size_t n = 0;
    std::size_t v = 0;

    std::size_t oil() const { return n - v; }
    bool valid() const { return v >= 1 && v < n; }
};

/// Quadratic polynomial over F2 in n variables:
///   p(x) = sum_{i<j} a_ij x_i x_j + b.x + c
/// The coefficient matrix is kept strictly upper triangular; square terms
/// x_i^2 are folded into the linear part at construction (field equations),
/// so equality of polynomials is bitwise equality of the parts.
class QuadraticPoly {
public:
    QuadraticPoly() = default;
    explicit QuadraticPoly(std::size_t n) : n_(n), quad_(n, n), lin_(n), const_(false) {}

    /// Build from an arbitrary coefficient matrix: a_ij and a_ji are folded
    /// into the upper triangle, the diagonal into the linear part.
    static QuadraticPoly from_parts(const BitMatrix& m, const BitVector& lin, bool c) {
        if (m.rows() != m.cols() || lin.size() != m.rows())
            throw std::invalid_argument("QuadraticPoly::from_parts: shape mismatch");
        QuadraticPoly p(m.rows());
        for (std::size_t i = 0; i < p.n_; ++i) {
            if (m.get(i, i)) p.lin_.flip(i);
            for (std::size_t j = i + 1; j < p.n_; ++j)
                if (m.get(i, j) ^ m.get(j, i)) p.quad_.set(i, j, true);
        }
        p.lin_ ^= lin;
        p.const_ = c;
        return p;
    }

    std::size_t n() const { return n_; }
    const BitMatrix& quad() const { return quad_; }
    const BitVector& lin() const { return lin_; }
    bool constant() const { return const_; }

    bool coeff(std::size_t i, std::size_t j) const { return quad_.get(i, j); }
    void set_coeff(std::size_t i, std::size_t j, bool b) {
        if (i >= j) throw std::invalid_argument("QuadraticPoly::set_coeff: need i < j");
        quad_.set(i, j, b);
    }
    void set_lin(std::size_t i, bool b) { lin_.set(i, b); }
    void set_constant(bool b) { const_ = b; }

    bool evaluate(const BitVector& x) const {
        if (x.size() != n_) throw std::invalid_argument("QuadraticPoly::evaluate: length mismatch");
        return quad_evaluate(x) ^ lin_.dot(x) ^ const_;
    }

    /// Value of the homogeneous quadratic part alone.
    bool quad_evaluate(const BitVector& x) const {
        if (x.size() != n_) throw std::invalid_argument("QuadraticPoly: length mismatch");
        bool acc = false;
        for (std::size_t wi = 0; wi < x.words().size(); ++wi) {
            Word w = x.words()[wi];
            while (w) {
                std::size_t i = wi * kWordBits + std::size_t(std::countr_zero(w));
                acc ^= quad_.row_dot(i, x);
                w &= w - 1;
            }
        }
        return acc;
    }

    /// A + A^t: the symmetric zero-diagonal matrix of the polar form.
    BitMatrix polar_matrix() const { return quad_ ^ quad_.transposed(); }

    /// Polar form p'(x,y) = p(x+y)+p(x)+p(y) = x^t (A+A^t) y, evaluated as
    /// x^t A y + y^t A x without materializing the polar matrix.
    bool polar_eval(const BitVector& x, const BitVector& y) const {
        if (x.size() != n_ || y.size() != n_)
            throw std::invalid_argument("QuadraticPoly::polar_eval: length mismatch");
        bool acc = false;
        for (std::size_t wi = 0; wi < x.words().size(); ++wi) {
            Word w = x.words()[wi];
            while (w) {
                std::size_t i = wi * kWordBits + std::size_t(std::countr_zero(w));
                acc ^= quad_.row_dot(i, y);
                w &= w - 1;
            }
        }
        for (std::size_t wi = 0; wi < y.words().size(); ++wi) {
            Word w = y.words()[wi];
            while (w) {
                std::size_t i = wi * kWordBits + std::size_t(std::countr_zero(w));
                acc ^= quad_.row_dot(i, x);
                w &= w - 1;
            }
        }
        return acc;
    }

    /// q with q(x) = p(S x). The new coefficient matrix is S^t A S, refolded
    /// to canonical form; the polar matrix transforms as S^t (A+A^t) S.
    QuadraticPoly compose_right_linear(const BitMatrix& s) const {
        if (s.rows() != n_ || s.cols() != n_)
            throw std::invalid_argument("compose_right_linear: dimension mismatch");
        BitMatrix st = s.transposed();
        BitMatrix b = mat_mul(mat_mul(st, quad_), s);
        return from_parts(b, st.mul(lin_), const_);
    }

    bool is_ov(const OvShape& shape) const {
        if (shape.n != n_) throw std::invalid_argument("is_ov: shape mismatch");
        for (std::size_t i = shape.v; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (quad_.get(i, j)) return false;
        return true;
    }

    /// Coefficientwise sum over F2.
    QuadraticPoly& operator^=(const QuadraticPoly& o) {
        if (o.n_ != n_) throw std::invalid_argument("QuadraticPoly: size mismatch");
        quad_ ^= o.quad_;
        lin_ ^= o.lin_;
        const_ ^= o.const_;
        return *this;
    }
    friend QuadraticPoly operator^(QuadraticPoly a, const QuadraticPoly& b) { return a ^= b; }

    bool operator==(const QuadraticPoly&) const = default;

    /// Uniform coefficients on every monomial.
    static QuadraticPoly random_full(std::size_t n, Rng& rng) {
        QuadraticPoly p(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            BitVector tail = rng.bits(n - i - 1);
            for (std::size_t j = i + 1; j < n; ++j)
                if (tail.get(j - i - 1)) p.quad_.set(i, j, true);
        }
        p.lin_ = rng.bits(n);
        p.const_ = rng.bit();
        return p;
    }

    /// Uniform coefficients on the monomials an OV polynomial allows
    /// (pairs with at least one vinegar index), plus linear and constant.
    static QuadraticPoly random_ov(const OvShape& shape, Rng& rng) {
        if (!shape.valid()) throw std::invalid_argument("random_ov: invalid shape");
        QuadraticPoly p(shape.n);
        for (std::size_t i = 0; i < shape.v; ++i) {
            BitVector tail = rng.bits(shape.n - i - 1);
            for (std::size_t j = i + 1; j < shape.n; ++j)
                if (tail.get(j - i - 1)) p.quad_.set(i, j, true);
        }
        p.lin_ = rng.bits(shape.n);
        p.const_ = rng.bit();
        return p;
    }

private:
    std::size_t n_ = 0;
    BitMatrix quad_;
    BitVector lin_;
    bool const_ = false;
};

/// Ordered family of quadratic polynomials sharing the variable count.
struct QuadraticSystem {
    std::vector<QuadraticPoly> polys;

    QuadraticSystem() = default;
    explicit QuadraticSystem(std::vector<QuadraticPoly> ps) : polys(std::move(ps)) {
        for (const auto& p : polys)
            if (p.n() != polys.front().n())
                throw std::invalid_argument("QuadraticSystem: mixed variable counts");
    }

    std::size_t size() const { return polys.size(); }
    std::size_t n() const { return polys.empty() ? 0 : polys.front().n(); }

    BitVector evaluate(const BitVector& x) const {
        BitVector out(polys.size());
        for (std::size_t i = 0; i < polys.size(); ++i)
            if (polys[i].evaluate(x)) out.set(i, true);
        return out;
    }

    bool operator==(const QuadraticSystem&) const = default;
};

// Canonical coefficient order, used for seed expansion and serialization:
// quadratic pairs (i,j), i<j, lexicographic; then linear x_0..x_{n-1}; then
// the constant. OV packing keeps only the pairs with a vinegar index.

inline std::size_t full_coeff_bits(std::size_t n) { return n * (n - 1) / 2 + n + 1; }
inline std::size_t ov_coeff_bits(const OvShape& s) {
    return s.v * s.n - s.v * (s.v + 1) / 2 + s.n + 1;
}

inline BitVector pack_coeffs(const QuadraticPoly& p) {
    const std::size_t n = p.n();
    BitVector out(full_coeff_bits(n));
    std::size_t pos = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.set(pos++, p.coeff(i, j));
    for (std::size_t i = 0; i < n; ++i) out.set(pos++, p.lin().get(i));
    out.set(pos, p.constant());
    return out;
}

inline QuadraticPoly unpack_coeffs(const BitVector& bits, std::size_t n) {
    if (bits.size() != full_coeff_bits(n)) throw std::invalid_argument("unpack_coeffs: bad length");
    QuadraticPoly p(n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (bits.get(pos++)) p.set_coeff(i, j, true);
    for (std::size_t i = 0; i < n; ++i) p.set_lin(i, bits.get(pos++));
    p.set_constant(bits.get(pos));
    return p;
}

inline BitVector pack_coeffs_ov(const QuadraticPoly& p, const OvShape& shape) {
    if (p.n() != shape.n || !p.is_ov(shape)) throw std::invalid_argument("pack_coeffs_ov: not OV");
    BitVector out(ov_coeff_bits(shape));
    std::size_t pos = 0;
    for (std::size_t i = 0; i < shape.v; ++i)
        for (std::size_t j = i + 1; j < shape.n; ++j) out.set(pos++, p.coeff(i, j));
    for (std::size_t i = 0; i < shape.n; ++i) out.set(pos++, p.lin().get(i));
    out.set(pos, p.constant());
    return out;
}

inline QuadraticPoly unpack_coeffs_ov(const BitVector& bits, const OvShape& shape) {
    if (bits.size() != ov_coeff_bits(shape)) throw std::invalid_argument("unpack_coeffs_ov: bad length");
    QuadraticPoly p(shape.n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < shape.v; ++i)
        for (std::size_t j = i + 1; j < shape.n; ++j)
            if (bits.get(pos++)) p.set_coeff(i, j, true);
    for (std::size_t i = 0; i < shape.n; ++i) p.set_lin(i, bits.get(pos++));
    p.set_constant(bits.get(pos));
    return p;
}

/// True iff every polynomial's homogeneous quadratic part vanishes on the
/// span of the basis: zero on each basis vector and polar-zero on each pair.
inline bool vanishes_on_subspace(const QuadraticSystem& sys, std::span<const BitVector> basis) {
    for (const auto& p : sys.polys) {
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (p.quad_evaluate(basis[i])) return false;
            for (std::size_t j = i + 1; j < basis.size(); ++j)
                if (p.polar_eval(basis[i], basis[j])) return false;
        }
    }
    return true;
}

}  // namespace olivier
