#pragma once

#include <algorithm>
#include <optional>
#include <utility>

#include "olivier/bits.hpp"
#include "olivier/rng.hpp"

namespace olivier {

/// Dense GF(2) matrix, row-major, each row packed LSB-first like BitVector.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(words_for_bits(cols)), data_(rows * stride_, 0) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    /// Matrix whose rows are the given equal-length vectors.
    static BitMatrix from_rows(std::span<const BitVector> rows) {
        if (rows.empty()) return BitMatrix();
        BitMatrix m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) m.set_row(i, rows[i]);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t stride() const { return stride_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * stride_ + c / kWordBits] >> (c % kWordBits)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool b) {
        Word mask = Word(1) << (c % kWordBits);
        if (b)
            data_[r * stride_ + c / kWordBits] |= mask;
        else
            data_[r * stride_ + c / kWordBits] &= ~mask;
    }
    void flip(std::size_t r, std::size_t c) {
        data_[r * stride_ + c / kWordBits] ^= Word(1) << (c % kWordBits);
    }

    std::span<Word> row(std::size_t r) { return {data_.data() + r * stride_, stride_}; }
    std::span<const Word> row(std::size_t r) const { return {data_.data() + r * stride_, stride_}; }

    BitVector row_vector(std::size_t r) const {
        BitVector v(cols_);
        std::copy_n(row(r).data(), stride_, v.words().data());
        return v;
    }
    void set_row(std::size_t r, const BitVector& v) {
        if (v.size() != cols_) throw std::invalid_argument("BitMatrix::set_row: length mismatch");
        std::copy_n(v.words().data(), stride_, row(r).data());
    }

    BitVector column(std::size_t c) const {
        BitVector v(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            if (get(r, c)) v.set(r, true);
        return v;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        std::swap_ranges(row(a).begin(), row(a).end(), row(b).begin());
    }

    /// row(dst) ^= row(src), starting at word offset from_word.
    void row_xor_row(std::size_t dst, std::size_t src, std::size_t from_word = 0) {
        Word* d = data_.data() + dst * stride_;
        const Word* s = data_.data() + src * stride_;
        for (std::size_t i = from_word; i < stride_; ++i) d[i] ^= s[i];
    }
    void row_xor(std::size_t dst, const BitVector& v) {
        if (v.size() != cols_) throw std::invalid_argument("BitMatrix::row_xor: length mismatch");
        Word* d = data_.data() + dst * stride_;
        for (std::size_t i = 0; i < stride_; ++i) d[i] ^= v.words()[i];
    }

    bool row_is_zero(std::size_t r) const {
        for (Word w : row(r))
            if (w) return false;
        return true;
    }

    /// Parity of row(r) AND v.
    bool row_dot(std::size_t r, const BitVector& v) const {
        if (v.size() != cols_) throw std::invalid_argument("BitMatrix::row_dot: length mismatch");
        Word acc = 0;
        const Word* s = data_.data() + r * stride_;
        for (std::size_t i = 0; i < stride_; ++i) acc ^= s[i] & v.words()[i];
        return std::popcount(acc) & 1;
    }

    /// Matrix-vector product M*x.
    BitVector mul(const BitVector& x) const {
        if (x.size() != cols_) throw std::invalid_argument("BitMatrix::mul: length mismatch");
        BitVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            if (row_dot(r, x)) out.set(r, true);
        return out;
    }

    BitMatrix transposed() const {
        BitMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            const Word* src = data_.data() + r * stride_;
            for (std::size_t wi = 0; wi < stride_; ++wi) {
                Word w = src[wi];
                while (w) {
                    std::size_t c = wi * kWordBits + std::size_t(std::countr_zero(w));
                    t.set(c, r, true);
                    w &= w - 1;
                }
            }
        }
        return t;
    }

    /// Copy of the column range [begin, end) of every row.
    BitMatrix columns_slice(std::size_t begin, std::size_t end) const {
        if (begin > end || end > cols_) throw std::invalid_argument("BitMatrix::columns_slice: bad range");
        BitMatrix out(rows_, end - begin);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = begin; c < end; ++c)
                if (get(r, c)) out.set(r, c - begin, true);
        return out;
    }

    BitMatrix rows_slice(std::size_t begin, std::size_t end) const {
        if (begin > end || end > rows_) throw std::invalid_argument("BitMatrix::rows_slice: bad range");
        BitMatrix out(end - begin, cols_);
        for (std::size_t r = begin; r < end; ++r)
            std::copy_n(row(r).data(), stride_, out.row(r - begin).data());
        return out;
    }

    BitMatrix& operator^=(const BitMatrix& o) {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("BitMatrix: shape mismatch");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] ^= o.data_[i];
        return *this;
    }
    friend BitMatrix operator^(BitMatrix a, const BitMatrix& b) { return a ^= b; }

    bool is_zero() const {
        for (Word w : data_)
            if (w) return false;
        return true;
    }

    bool operator==(const BitMatrix&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0, stride_ = 0;
    std::vector<Word> data_;
};

/// GF(2) rank by in-place forward elimination.
inline std::size_t rank(BitMatrix m) {
    std::size_t r = 0;
    const std::size_t rows = m.rows(), cols = m.cols();
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && !m.get(p, c)) ++p;
        if (p == rows) continue;
        m.swap_rows(p, r);
        std::size_t from = c / kWordBits;
        for (std::size_t q = r + 1; q < rows; ++q)
            if (m.get(q, c)) m.row_xor_row(q, r, from);
        ++r;
    }
    return r;
}

/// Basis of { x : Mx = 0 }; size is cols - rank(M).
inline std::vector<BitVector> kernel_basis(const BitMatrix& m) {
    BitMatrix a = m;
    const std::size_t rows = a.rows(), cols = a.cols();
    std::vector<std::size_t> pivot_col;
    std::vector<bool> col_has_pivot(cols, false);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && !a.get(p, c)) ++p;
        if (p == rows) continue;
        a.swap_rows(p, r);
        for (std::size_t q = 0; q < rows; ++q)
            if (q != r && a.get(q, c)) a.row_xor_row(q, r, c / kWordBits);
        pivot_col.push_back(c);
        col_has_pivot[c] = true;
        ++r;
    }
    std::vector<BitVector> basis;
    for (std::size_t c = 0; c < cols; ++c) {
        if (col_has_pivot[c]) continue;
        BitVector v(cols);
        v.set(c, true);
        for (std::size_t i = 0; i < pivot_col.size(); ++i)
            if (a.get(i, c)) v.set(pivot_col[i], true);
        basis.push_back(std::move(v));
    }
    return basis;
}

struct AffineSolution {
    BitVector particular;
    std::vector<BitVector> kernel;
};

/// Solve Mx = rhs. Returns one particular solution plus a kernel basis,
/// or nullopt when the system is inconsistent.
inline std::optional<AffineSolution> solve_affine(const BitMatrix& m, const BitVector& rhs) {
    if (rhs.size() != m.rows()) throw std::invalid_argument("solve_affine: rhs length mismatch");
    BitMatrix a = m;
    BitVector b = rhs;
    const std::size_t rows = a.rows(), cols = a.cols();
    std::vector<std::size_t> pivot_col;
    std::vector<bool> col_has_pivot(cols, false);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && !a.get(p, c)) ++p;
        if (p == rows) continue;
        a.swap_rows(p, r);
        if (p != r) {
            bool t = b.get(p);
            b.set(p, b.get(r));
            b.set(r, t);
        }
        for (std::size_t q = 0; q < rows; ++q) {
            if (q != r && a.get(q, c)) {
                a.row_xor_row(q, r, c / kWordBits);
                if (b.get(r)) b.flip(q);
            }
        }
        pivot_col.push_back(c);
        col_has_pivot[c] = true;
        ++r;
    }
    for (std::size_t q = r; q < rows; ++q)
        if (b.get(q)) return std::nullopt;

    AffineSolution sol;
    sol.particular = BitVector(cols);
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
        if (b.get(i)) sol.particular.set(pivot_col[i], true);
    for (std::size_t c = 0; c < cols; ++c) {
        if (col_has_pivot[c]) continue;
        BitVector v(cols);
        v.set(c, true);
        for (std::size_t i = 0; i < pivot_col.size(); ++i)
            if (a.get(i, c)) v.set(pivot_col[i], true);
        sol.kernel.push_back(std::move(v));
    }
    return sol;
}

/// Record of a deterministic row reduction: which rows were chosen as pivots
/// (first row introducing a new pivot column, scanning top-down) and, for
/// every remaining row, its expansion over the pivot rows.
struct EliminationTranscript {
    std::vector<std::size_t> pivot_rows;
    std::vector<std::size_t> dependent_rows;
    /// dependency[k].get(j) is the coefficient of pivot_rows[j] in the
    /// expansion of dependent_rows[k].
    std::vector<BitVector> dependency;
    std::size_t rank = 0;
};

inline EliminationTranscript row_reduce_with_transcript(const BitMatrix& m) {
    BitMatrix a = m;
    BitMatrix comb = BitMatrix::identity(m.rows());
    const std::size_t rows = a.rows();
    EliminationTranscript tr;
    std::vector<std::size_t> pivot_cols;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < tr.pivot_rows.size(); ++j) {
            if (a.get(i, pivot_cols[j])) {
                a.row_xor_row(i, tr.pivot_rows[j]);
                comb.row_xor_row(i, tr.pivot_rows[j]);
            }
        }
        if (!a.row_is_zero(i)) {
            tr.pivot_rows.push_back(i);
            pivot_cols.push_back(std::size_t(a.row_vector(i).lowest_set()));
        } else {
            tr.dependent_rows.push_back(i);
        }
    }
    tr.rank = tr.pivot_rows.size();
    for (std::size_t i : tr.dependent_rows) {
        BitVector d(tr.rank);
        for (std::size_t j = 0; j < tr.rank; ++j)
            if (comb.get(i, tr.pivot_rows[j])) d.set(j, true);
        tr.dependency.push_back(std::move(d));
    }
    return tr;
}

/// Table of all 2^s linear combinations of s rows, indexed by the selector
/// bits; built with exactly 2^s - 1 vector xors by walking the Gray code.
inline std::vector<BitVector> gray_combination_table(std::span<const BitVector> rows, unsigned s) {
    if (s < 1 || s > 16) throw std::invalid_argument("gray_combination_table: s out of range");
    if (rows.size() != s) throw std::invalid_argument("gray_combination_table: need exactly s rows");
    const std::size_t len = rows[0].size();
    std::vector<BitVector> table(std::size_t(1) << s, BitVector(len));
    auto gray = [](std::uint32_t g) { return g ^ (g >> 1); };
    for (std::uint32_t g = 1; g < (std::uint32_t(1) << s); ++g) {
        unsigned changed = unsigned(std::countr_zero(g));
        table[gray(g)] = table[gray(g - 1)];
        table[gray(g)] ^= rows[changed];
    }
    return table;
}

enum class MulStrategy { naive, four_russians };

/// GF(2) matrix product. The four_russians strategy tables s-bit chunks of
/// B's rows (Gray-code construction) and is bit-identical to naive.
inline BitMatrix mat_mul(const BitMatrix& a, const BitMatrix& b,
                         MulStrategy strategy = MulStrategy::four_russians, unsigned s = 8) {
    if (a.cols() != b.rows()) throw std::invalid_argument("mat_mul: dimension mismatch");
    BitMatrix out(a.rows(), b.cols());
    if (a.rows() == 0 || b.cols() == 0 || a.cols() == 0) return out;

    if (strategy == MulStrategy::naive) {
        for (std::size_t r = 0; r < a.rows(); ++r) {
            Word* dst = out.row(r).data();
            const auto arow = a.row(r);
            for (std::size_t wi = 0; wi < a.stride(); ++wi) {
                Word w = arow[wi];
                while (w) {
                    std::size_t j = wi * kWordBits + std::size_t(std::countr_zero(w));
                    const Word* src = b.row(j).data();
                    for (std::size_t k = 0; k < b.stride(); ++k) dst[k] ^= src[k];
                    w &= w - 1;
                }
            }
        }
        return out;
    }

    // Four Russians: one combination table per s-wide chunk of B's rows.
    const std::size_t chunks = (a.cols() + s - 1) / s;
    std::vector<std::vector<BitVector>> tables(chunks);
    std::vector<BitVector> chunk_rows;
    for (std::size_t h = 0; h < chunks; ++h) {
        const std::size_t lo = h * s;
        const unsigned width = unsigned(std::min<std::size_t>(s, a.cols() - lo));
        chunk_rows.clear();
        for (unsigned j = 0; j < width; ++j) chunk_rows.push_back(b.row_vector(lo + j));
        tables[h] = gray_combination_table(chunk_rows, width);
    }
    for (std::size_t r = 0; r < a.rows(); ++r) {
        Word* dst = out.row(r).data();
        const auto arow = a.row(r);
        for (std::size_t h = 0; h < chunks; ++h) {
            const std::size_t lo = h * s;
            const unsigned width = unsigned(std::min<std::size_t>(s, a.cols() - lo));
            std::size_t idx = 0;
            for (unsigned j = 0; j < width; ++j)
                if ((arow[(lo + j) / kWordBits] >> ((lo + j) % kWordBits)) & 1u) idx |= std::size_t(1) << j;
            const Word* src = tables[h][idx].words().data();
            for (std::size_t k = 0; k < b.stride(); ++k) dst[k] ^= src[k];
        }
    }
    return out;
}

/// Inverse by Gauss-Jordan on [M | I]; nullopt when singular.
inline std::optional<BitMatrix> inverse(const BitMatrix& m) {
    if (m.rows() != m.cols()) return std::nullopt;
    const std::size_t n = m.rows();
    BitMatrix a = m;
    BitMatrix inv = BitMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && !a.get(p, c)) ++p;
        if (p == n) return std::nullopt;
        a.swap_rows(p, c);
        inv.swap_rows(p, c);
        for (std::size_t q = 0; q < n; ++q) {
            if (q != c && a.get(q, c)) {
                a.row_xor_row(q, c, c / kWordBits);
                inv.row_xor_row(q, c);
            }
        }
    }
    return inv;
}

inline BitMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) m.set_row(r, rng.bits(cols));
    return m;
}

/// Uniform invertible matrix by rejection; over F2 fewer than 4 draws expected.
inline BitMatrix random_invertible(std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("random_invertible: n must be positive");
    for (;;) {
        BitMatrix m = random_matrix(n, n, rng);
        if (rank(m) == n) return m;
    }
}

}  // namespace olivier
