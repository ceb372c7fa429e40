#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>

#include "olivier/quadform.hpp"

namespace olivier {

using BigInt = boost::multiprecision::cpp_int;

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

inline BigInt binomial(long long a, long long b) {
    if (b == 0) return 1;  // including a < 0, for empty-product edge cases
    if (b < 0 || a < 0 || b > a) return 0;
    b = std::min(b, a - b);
    BigInt res = 1;
    for (long long i = 1; i <= b; ++i) {
        res *= a - b + i;
        res /= i;
    }
    return res;
}

/// Number of squarefree degree-h monomials in n variables containing at most
/// k oil variables (the oil variables being the last n - v coordinates).
/// Zero for negative h or k, as the saturation sums require.
inline BigInt eta(long long k, long long h, std::size_t n, std::size_t v) {
    if (h < 0 || k < 0) return 0;
    const long long o = (long long)(n - v);
    BigInt sum = 0;
    for (long long j = 0; j <= std::min(k, h); ++j) sum += binomial(o, j) * binomial(v, h - j);
    return sum;
}

/// Saturation counter of the monomial space with at most i+1 oil variables at
/// degree d, for an OV system of e equations. A negative value signals a
/// degree fall at degree d.
inline BigInt sigma(long long d, long long i, std::size_t n, std::size_t v, std::size_t e) {
    BigInt s = eta(i + 1, d, n, v);
    for (long long j = 0; j <= i; ++j) {
        BigInt term = eta(i - j, d - 2 * j - 2, n, v) * binomial((long long)e + j, j + 1);
        if (j % 2 == 0)
            s -= term;
        else
            s += term;
    }
    return s;
}

/// sigma with the corrections contributed by u fully quadratic equations:
/// A_j counts relations among the fully quadratic equations alone, B_j the
/// mixed products of OV and fully quadratic equations (both factors present,
/// so k and h start at 1).
inline BigInt sigma_tilde(long long d, long long i, std::size_t n, std::size_t v, std::size_t e,
                          std::size_t u) {
    BigInt s = sigma(d, i, n, v, e);
    for (long long j = 1; j <= i; ++j) {
        BigInt a = 0;
        if (i + 1 - 2 * j >= 0)
            a = eta(i + 1 - 2 * j, d - 2 * j, n, v) * binomial((long long)u + j - 1, j);
        BigInt b = 0;
        for (long long k = 1; k < j; ++k) {
            const long long h = j - k;
            if (i + 1 - 2 * h - k >= 0)
                b += eta(i + 1 - 2 * h - k, d - 2 * j, n, v) *
                     binomial((long long)u + h - 1, h) * binomial((long long)e + k - 1, k);
        }
        if (j % 2 == 0)
            s += a + b;
        else
            s -= a + b;
    }
    return s;
}

struct AnalysisParams {
    std::size_t n = 0, v = 0, e = 0, u = 0;
};

/// Degree-fall table: one row per degree d in [3, d_max], entries for
/// i = 0..d-1. With u = 0 the entries are the
/// plain sigma values.
struct SigmaTable {
    AnalysisParams params;
    int d_max = 0;
    std::vector<std::vector<BigInt>> rows;
    std::optional<int> first_fall;

    const BigInt& at(int d, int i) const { return rows.at(std::size_t(d - 3)).at(std::size_t(i)); }
};

inline SigmaTable sigma_table(const AnalysisParams& p, int d_max) {
    if (d_max < 3) throw std::invalid_argument("sigma_table: d_max must be at least 3");
    SigmaTable t;
    t.params = p;
    t.d_max = d_max;
    for (int d = 3; d <= d_max; ++d) {
        std::vector<BigInt> row;
        for (int i = 0; i < d; ++i) {
            row.push_back(sigma_tilde(d, i, p.n, p.v, p.e, p.u));
            if (row.back() < 0 && !t.first_fall) t.first_fall = d;
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Coefficients of the generic (cryptographic semiregular) Hilbert series
/// (1+t)^n / (1+t^2)^m, kept signed past the regularity degree.
struct SeriesPrefix {
    std::vector<BigInt> coeffs;
    int degree() const { return int(coeffs.size()) - 1; }
};

inline BigInt generic_series_coeff(std::size_t n, std::size_t m, long long d) {
    BigInt sum = 0;
    for (long long k = 0; 2 * k <= d; ++k) {
        BigInt term = binomial((long long)m + k - 1, k) * binomial((long long)n, d - 2 * k);
        if (k % 2 == 0)
            sum += term;
        else
            sum -= term;
    }
    return sum;
}

inline SeriesPrefix generic_series(std::size_t n, std::size_t m, int d_max) {
    if (d_max < 0) throw std::invalid_argument("generic_series: negative degree");
    SeriesPrefix s;
    for (int d = 0; d <= d_max; ++d) s.coeffs.push_back(generic_series_coeff(n, m, d));
    return s;
}

/// Degree of regularity of the generic series: least d with coefficient <= 0.
inline int d_reg_generic(std::size_t n, std::size_t m) {
    if (m < 1) throw std::invalid_argument("d_reg_generic: need at least one equation");
    for (long long d = 0; d <= (long long)(n + 2 * m + 4); ++d)
        if (generic_series_coeff(n, m, d) <= 0) return int(d);
    throw std::logic_error("d_reg_generic: series never became non-positive");
}

/// Smallest d >= 3 with a negative sigma_tilde entry, searching no further
/// than the generic degree of regularity of n variables and e+u equations;
/// that degree itself is returned when no earlier fall exists.
inline int first_fall_estimate(std::size_t n, std::size_t v, std::size_t e, std::size_t u) {
    for (long long d = 2;; ++d) {
        if (generic_series_coeff(n, e + u, d) <= 0) return int(d);
        if (d >= 3)
            for (long long i = 0; i < d; ++i)
                if (sigma_tilde(d, i, n, v, e, u) < 0) return int(d);
    }
}

namespace detail {

/// Small Pascal triangle for combinatorial ranking; entries must fit 64 bits.
class BinomTable {
public:
    BinomTable(std::size_t n, std::size_t d) : d_(d), c_((n + 1) * (d + 1), 0) {
        for (std::size_t a = 0; a <= n; ++a) {
            at(a, 0) = 1;
            for (std::size_t b = 1; b <= std::min(a, d); ++b)
                at(a, b) = (b == a) ? 1 : at(a - 1, b - 1) + at(a - 1, b);
        }
    }
    std::uint64_t operator()(std::size_t a, std::size_t b) const {
        return b > d_ ? 0 : c_[a * (d_ + 1) + b];
    }

private:
    std::uint64_t& at(std::size_t a, std::size_t b) { return c_[a * (d_ + 1) + b]; }
    std::size_t d_;
    std::vector<std::uint64_t> c_;
};

/// Colexicographic rank of a strictly increasing subset.
inline std::uint64_t colex_rank(std::span<const std::uint32_t> subset, const BinomTable& binom) {
    std::uint64_t r = 0;
    for (std::size_t k = 0; k < subset.size(); ++k) r += binom(subset[k], k + 1);
    return r;
}

/// Advance a strictly increasing index vector to the next subset of
/// {0..n-1}; false when exhausted.
inline bool next_subset(std::vector<std::uint32_t>& idx, std::uint32_t n) {
    const std::size_t k = idx.size();
    if (k == 0) return false;
    std::size_t i = k;
    while (i-- > 0) {
        if (idx[i] + 1 <= n - (k - i)) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

inline constexpr std::size_t kDefaultMacaulayBudget = std::size_t(2) << 30;  // bytes of packed bits

/// GF(2) rank of the Macaulay matrix at degree d of the homogeneous quadratic
/// parts: rows are equation x (degree d-2 squarefree monomial) products
/// reduced modulo x_i^2 = 0, columns the squarefree degree-d monomials.
inline std::size_t macaulay_rank(const QuadraticSystem& sys, int d,
                                 std::size_t budget_bytes = kDefaultMacaulayBudget) {
    if (d < 2) throw std::invalid_argument("macaulay_rank: degree must be at least 2");
    const std::size_t n = sys.n();
    // budget gate in exact arithmetic, before any table can overflow
    {
        BigInt bits = binomial((long long)n, d) * binomial((long long)n, d - 2) *
                      BigInt(sys.size());
        if (bits > BigInt(budget_bytes) * 8)
            throw BudgetExceeded("macaulay_rank: matrix exceeds the memory budget");
    }
    const detail::BinomTable binom(n, std::size_t(d) + 1);
    const std::uint64_t cols = binom(n, std::size_t(d));
    const std::uint64_t mons = binom(n, std::size_t(d) - 2);
    const std::uint64_t rows = mons * sys.size();
    if (cols == 0 || rows == 0) return 0;

    // Quadratic support of each equation.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> terms(sys.size());
    for (std::size_t e = 0; e < sys.size(); ++e)
        for (std::uint32_t i = 0; i + 1 < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j)
                if (sys.polys[e].coeff(i, j)) terms[e].push_back({i, j});

    BitMatrix mac{std::size_t(rows), std::size_t(cols)};
    std::vector<std::uint32_t> mu(std::size_t(d) - 2);
    std::vector<std::uint32_t> merged(std::size_t(d), 0);
    std::size_t r = 0;
    for (std::size_t e = 0; e < sys.size(); ++e) {
        for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = std::uint32_t(i);
        bool more = true;  // d = 2 has the single empty multiplier monomial
        while (more) {
            for (const auto& [a, b] : terms[e]) {
                bool clash = false;
                for (std::uint32_t m : mu)
                    if (m == a || m == b) { clash = true; break; }
                if (clash) continue;  // repeated variable, vanishes in S_q
                // Merge {a, b} into the sorted mu.
                std::size_t p = 0;
                bool pa = false, pb = false;
                for (std::uint32_t m : mu) {
                    if (!pa && a < m) { merged[p++] = a; pa = true; }
                    if (!pb && b < m) { merged[p++] = b; pb = true; }
                    merged[p++] = m;
                }
                if (!pa) merged[p++] = a;
                if (!pb) merged[p++] = b;
                mac.flip(r, std::size_t(detail::colex_rank(merged, binom)));
            }
            ++r;
            more = detail::next_subset(mu, std::uint32_t(n));
        }
    }
    return rank(std::move(mac));
}

/// Brute-force Hilbert series prefix of the quotient by the homogeneous
/// quadratic parts: h_0 = 1, h_1 = n, h_d = C(n, d) - macaulay_rank(d).
inline SeriesPrefix hilbert_prefix_bruteforce(const QuadraticSystem& sys, int d_max,
                                              std::size_t budget_bytes = kDefaultMacaulayBudget) {
    if (d_max < 0) throw std::invalid_argument("hilbert_prefix_bruteforce: negative degree");
    SeriesPrefix s;
    s.coeffs.push_back(1);
    if (d_max >= 1) s.coeffs.push_back(BigInt(sys.n()));
    for (int d = 2; d <= d_max; ++d)
        s.coeffs.push_back(binomial((long long)sys.n(), d) -
                           BigInt(macaulay_rank(sys, d, budget_bytes)));
    return s;
}

}  // namespace olivier
