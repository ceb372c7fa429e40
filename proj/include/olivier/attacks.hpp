#pragma once

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "olivier/analysis.hpp"
#include "olivier/keygen.hpp"

namespace olivier {

struct AttackReport {
    std::string attack;
    bool success = false;
    std::vector<BitVector> basis;  // recovered oil basis when successful
    std::uint64_t samples = 0;
    std::uint64_t pairs = 0;
    std::uint64_t rank_checks = 0;
    double seconds = 0.0;

    std::string to_records() const {
        std::ostringstream os;
        os << "attack=" << attack << '\n'
           << "success=" << (success ? 1 : 0) << '\n'
           << "samples=" << samples << '\n'
           << "pairs=" << pairs << '\n'
           << "rank_checks=" << rank_checks << '\n'
           << "basis_dim=" << basis.size() << '\n'
           << "seconds=" << seconds << '\n';
        return os.str();
    }
};

struct ComplexityEstimate {
    std::string attack;
    double log2_bits = 0.0;  // real-valued exponent
    int bits = 0;            // floor, as printed in parameter tables
    std::uint64_t big_k = 0, target_rank = 0, punctured_cols = 0;
    int degree = 0;
    double omega = 0.0;

    std::string to_records() const {
        std::ostringstream os;
        os << "attack=" << attack << '\n'
           << "bits=" << bits << '\n'
           << "log2=" << log2_bits << '\n';
        if (big_k) os << "K=" << big_k << '\n';
        if (target_rank) os << "r=" << target_rank << '\n';
        if (punctured_cols) os << "n_prime=" << punctured_cols << '\n';
        if (degree) os << "degree=" << degree << '\n';
        if (omega > 0) os << "omega=" << omega << '\n';
        return os.str();
    }
};

namespace detail {

/// Incremental reduced-echelon accumulator over F2. Every stored row is the
/// only one with a bit at its own leading position, so membership reduction
/// is a single pass.
class SpanAccumulator {
public:
    explicit SpanAccumulator(std::size_t len) : len_(len) {}

    bool add(BitVector v) {
        if (v.size() != len_) throw std::invalid_argument("SpanAccumulator: length mismatch");
        for (const auto& [lead, row] : rows_) {
            if (v.get(lead)) v ^= row;
        }
        long lead = v.lowest_set();
        if (lead < 0) return false;
        for (auto& [l, row] : rows_)
            if (row.get(std::size_t(lead))) row ^= v;
        rows_.emplace_back(std::size_t(lead), std::move(v));
        return true;
    }

    std::size_t dim() const { return rows_.size(); }

    std::vector<BitVector> basis() const {
        std::vector<BitVector> out;
        out.reserve(rows_.size());
        for (const auto& [lead, row] : rows_) out.push_back(row);
        return out;
    }

    void clear() { rows_.clear(); }

private:
    std::size_t len_;
    std::vector<std::pair<std::size_t, BitVector>> rows_;
};

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

/// The coordinate-free part of subspace vanishing: all polar values on basis
/// pairs are zero. (Over F2 the pointwise quadratic part is representation
/// dependent: composing with S folds square terms into the linear part, so
/// only the polar condition survives a change of coordinates.)
inline bool polar_vanishes_on_pairs(const QuadraticSystem& sys, std::span<const BitVector> basis) {
    for (const auto& p : sys.polys)
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t j = i + 1; j < basis.size(); ++j)
                if (p.polar_eval(basis[i], basis[j])) return false;
    return true;
}

}  // namespace detail

/// Oil-space recovery against a public system that is F o S without the
/// fully quadratic mixing: every rank-2v polar matrix (and every rank-2v
/// combination of them) has its kernel inside the hidden oil space, so the
/// kernels accumulate to the full oil space.
inline AttackReport kernel_attack(const QuadraticSystem& pub_sys, const OvShape& shape, Rng& rng,
                                  std::uint64_t combo_budget = 4096) {
    detail::Timer timer;
    AttackReport rep;
    rep.attack = "kernel";
    const std::size_t n = shape.n, v = shape.v;
    if (n <= 2 * v) {
        rep.seconds = timer.elapsed();
        return rep;  // kernels are trivial, nothing to harvest
    }
    std::vector<BitMatrix> polars;
    polars.reserve(pub_sys.size());
    for (const auto& p : pub_sys.polys) polars.push_back(p.polar_matrix());

    detail::SpanAccumulator span(n);
    for (const auto& m : polars) {
        rep.rank_checks++;
        if (rank(m) == 2 * v)
            for (auto& kv : kernel_basis(m)) span.add(std::move(kv));
        if (span.dim() >= n - v) break;
    }
    for (std::uint64_t tries = 0; span.dim() < n - v && tries < combo_budget; ++tries) {
        BitVector sel = rng.bits(polars.size());
        if (sel.none()) continue;
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < polars.size(); ++i)
            if (sel.get(i)) m ^= polars[i];
        rep.rank_checks++;
        if (rank(m) == 2 * v)
            for (auto& kv : kernel_basis(m)) span.add(std::move(kv));
    }
    if (span.dim() == n - v) {
        auto basis = span.basis();
        if (detail::polar_vanishes_on_pairs(pub_sys, basis)) {
            rep.success = true;
            rep.basis = std::move(basis);
        }
    }
    rep.seconds = timer.elapsed();
    return rep;
}

/// Harvest pairs (a, b) with P'(a, b) = 0 and b outside {0, a}: for each
/// sampled a, stack the polar sections p_i' * a and read the kernel.
inline std::vector<std::pair<BitVector, BitVector>> oil_pair_search(const PublicKey& pk,
                                                                    std::uint64_t sample_budget,
                                                                    Rng& rng,
                                                                    std::uint64_t* samples_used = nullptr) {
    const std::size_t n = pk.params.n;
    std::vector<BitMatrix> polars;
    polars.reserve(pk.params.m());
    for (const auto& p : pk.head.polys) polars.push_back(p.polar_matrix());
    for (const auto& p : pk.tail.polys) polars.push_back(p.polar_matrix());

    std::vector<std::pair<BitVector, BitVector>> out;
    std::uint64_t samples = 0;
    for (; samples < sample_budget; ++samples) {
        BitVector a = rng.bits(n);
        if (a.none()) continue;
        BitMatrix phi(polars.size(), n);
        for (std::size_t i = 0; i < polars.size(); ++i) phi.set_row(i, polars[i].mul(a));
        for (auto& kv : kernel_basis(phi))
            if (kv != a) out.emplace_back(a, std::move(kv));
    }
    if (samples_used) *samples_used = samples;
    return out;
}

/// Probabilistic oil-space reconstruction: collect polar-orthogonal pairs
/// until they span an (n-v)-dimensional space, then accept the span iff
/// n + span_margin random combinations v_i all satisfy the head/tail linear
/// dependence of oil vectors, read off as rank(P(v_1); ...) = n.
inline AttackReport oil_reconstruction(const PublicKey& pk, std::size_t span_margin,
                                       std::uint64_t sample_budget, Rng& rng) {
    detail::Timer timer;
    AttackReport rep;
    rep.attack = "oilrecon";
    const Params& p = pk.params;
    const std::size_t n = p.n, target = p.oil();

    std::vector<BitMatrix> polars;
    polars.reserve(p.m());
    for (const auto& q : pk.head.polys) polars.push_back(q.polar_matrix());
    for (const auto& q : pk.tail.polys) polars.push_back(q.polar_matrix());

    detail::SpanAccumulator span(n);
    std::uint64_t pairs = 0;
    while (rep.samples < sample_budget) {
        BitVector a = rng.bits(n);
        rep.samples++;
        if (a.none()) continue;
        BitMatrix phi(polars.size(), n);
        for (std::size_t i = 0; i < polars.size(); ++i) phi.set_row(i, polars[i].mul(a));
        bool new_pair = false;
        for (auto& kv : kernel_basis(phi)) {
            if (kv == a) continue;
            span.add(a);
            span.add(std::move(kv));
            ++pairs;
            new_pair = true;
        }
        rep.pairs = pairs;
        // Pairs accumulate across iterations; a non-oil pair overshoots the
        // target dimension and the acceptance test below never fires again,
        // which is the algorithm's failure mode. The rank certificate draws
        // fresh combinations after every new pair, so one unlucky draw of the
        // v_i does not strand the attack.
        if (new_pair && 2 * pairs >= target && span.dim() == target) {
            auto basis = span.basis();
            BitMatrix b(n + span_margin, p.m());
            for (std::size_t r = 0; r < b.rows(); ++r) {
                BitVector sel = rng.bits(target);
                if (sel.none()) sel.set(0, true);
                BitVector vi(n);
                for (std::size_t j = 0; j < target; ++j)
                    if (sel.get(j)) vi ^= basis[j];
                b.set_row(r, public_evaluate(pk, vi));
            }
            rep.rank_checks++;
            if (rank(b) == n) {
                rep.success = true;
                rep.basis = std::move(basis);
                break;
            }
        }
    }
    rep.seconds = timer.elapsed();
    return rep;
}

/// Empirical fraction of vectors a whose polar section system Q'(a, .) of a
/// fresh random fully quadratic system loses enough rank to admit a partner
/// b outside {0, a}. `equations` overrides the system size (default n).
inline double rank_deficiency_rate(std::size_t n, std::size_t trials, Rng& rng,
                                   std::size_t equations = 0) {
    if (trials < 100) throw std::invalid_argument("rank_deficiency_rate: need at least 100 trials");
    const std::size_t eq = equations == 0 ? n : equations;
    const std::size_t threshold = n >= 2 ? n - 2 : 0;
    std::size_t deficient = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<BitMatrix> polars;
        polars.reserve(eq);
        for (std::size_t i = 0; i < eq; ++i)
            polars.push_back(QuadraticPoly::random_full(n, rng).polar_matrix());
        BitVector a = rng.bits(n);
        while (a.none()) a = rng.bits(n);
        BitMatrix phi(eq, n);
        for (std::size_t i = 0; i < eq; ++i) phi.set_row(i, polars[i].mul(a));
        if (rank(phi) <= threshold) ++deficient;
    }
    return double(deficient) / double(trials);
}

/// Exhaustive search for a mixing row: enumerate lambda over F2^u in Gray
/// order and report the first lambda for which p_1 + sum lambda_j q_j has the
/// OV polar signature rank <= 2v. Cost 2^u, so u is capped.
inline std::optional<BitVector> lambda_strip_bruteforce(const PublicKey& pk, const OvShape& shape,
                                                        std::size_t max_u) {
    const std::size_t u = pk.params.u;
    if (max_u > 24 || u > max_u)
        throw std::invalid_argument("lambda_strip_bruteforce: u exceeds the search cap");
    BitMatrix cur = pk.head.polys.at(0).polar_matrix();
    std::vector<BitMatrix> qpolars;
    qpolars.reserve(u);
    for (const auto& q : pk.tail.polys) qpolars.push_back(q.polar_matrix());

    if (rank(cur) <= 2 * shape.v) return BitVector(u);
    const std::uint64_t total = std::uint64_t(1) << u;
    for (std::uint64_t g = 1; g < total; ++g) {
        cur ^= qpolars[std::size_t(std::countr_zero(g))];
        if (rank(cur) <= 2 * shape.v) return BitVector::from_word(g ^ (g >> 1), u);
    }
    return std::nullopt;
}

/// Linearization feasibility of a Support Minors instance:
/// m C(n, r+1) >= K C(n, r) - 1, evaluated exactly.
inline bool minrank_feasible(std::size_t m_rows, std::size_t n_cols, std::size_t big_k,
                             std::size_t r) {
    if (r > std::min(m_rows, n_cols)) throw std::invalid_argument("minrank_feasible: rank too large");
    return BigInt(m_rows) * binomial((long long)n_cols, (long long)r + 1) >=
           BigInt(big_k) * binomial((long long)n_cols, (long long)r) - 1;
}

namespace detail {

inline double log2_big(const BigInt& x) {
    if (x <= 0) throw std::invalid_argument("log2_big: non-positive");
    const std::size_t b = boost::multiprecision::msb(x);
    if (b <= 512) return std::log2(x.convert_to<double>());
    BigInt y = x >> (b - 52);
    return double(b - 52) + std::log2(y.convert_to<double>());
}

}  // namespace detail

/// Support-minors MinRank cost with K = u+1 combinations, target rank 2v and
/// puncturing to n' = 4v+2 columns: (u+1)^3 (2v+1) C(4v+2, 2v)^2.
inline ComplexityEstimate estimate_minrank_bits(const Params& p) {
    ComplexityEstimate est;
    est.attack = "minrank";
    est.big_k = p.u + 1;
    est.target_rank = 2 * p.v;
    est.punctured_cols = 4 * p.v + 2;
    BigInt cost = BigInt(p.u + 1) * (p.u + 1) * (p.u + 1) * (2 * p.v + 1) *
                  binomial(4 * (long long)p.v + 2, 2 * (long long)p.v) *
                  binomial(4 * (long long)p.v + 2, 2 * (long long)p.v);
    est.bits = int(boost::multiprecision::msb(cost));
    est.log2_bits = detail::log2_big(cost);
    return est;
}

/// Block Wiedemann XL cost at operating degree d: 3 C(n,d)^2 C(n,2).
inline ComplexityEstimate estimate_xl_bits(std::size_t n, int d) {
    if (d < 2) throw std::invalid_argument("estimate_xl_bits: degree too small");
    ComplexityEstimate est;
    est.attack = "xl";
    est.degree = d;
    BigInt c = binomial((long long)n, d);
    BigInt cost = 3 * c * c * binomial((long long)n, 2);
    est.bits = int(boost::multiprecision::msb(cost));
    est.log2_bits = detail::log2_big(cost);
    return est;
}

/// Groebner basis (F4/F5) cost at operating degree d: C(n,d)^omega.
inline ComplexityEstimate estimate_f4_bits(std::size_t n, int d, double omega = 2.37) {
    if (d < 2) throw std::invalid_argument("estimate_f4_bits: degree too small");
    if (omega <= 2.0 || omega > 3.0) throw std::invalid_argument("estimate_f4_bits: omega out of range");
    ComplexityEstimate est;
    est.attack = "f4";
    est.degree = d;
    est.omega = omega;
    est.log2_bits = omega * detail::log2_big(binomial((long long)n, d));
    est.bits = int(std::floor(est.log2_bits));
    return est;
}

/// One bilinear Support Minors equation: sum of lambda_i * c_T terms = 0.
struct SmmTerm {
    std::uint32_t lambda_index;
    std::uint32_t minor_index;  // colex rank of the r-subset T
    bool operator==(const SmmTerm&) const = default;
};

struct SmmEquation {
    std::vector<SmmTerm> terms;
};

/// Symbolic Support Minors system for K matrices and target rank r: the
/// vanishing (r+1)-minors of every row stacked over the unknown row basis C,
/// Laplace-expanded into lambda_i * c_T terms (signs vanish over F2).
/// No solver is attached; the instance reports its own counts.
struct SmmInstance {
    std::size_t big_k = 0, m_rows = 0, n_cols = 0, r = 0;
    std::vector<SmmEquation> equations;

    std::uint64_t equation_count() const { return equations.size(); }
    BigInt variable_count() const { return binomial((long long)n_cols, (long long)r) + big_k; }
    BigInt quadratic_monomial_count() const {
        return BigInt(big_k) * binomial((long long)n_cols, (long long)r);
    }

    /// Evaluate every equation under an assignment of the lambda and minor
    /// variables; true when all vanish.
    bool satisfied_by(const BitVector& lambda, const std::vector<bool>& minors) const {
        for (const auto& eq : equations) {
            bool acc = false;
            for (const auto& term : eq.terms)
                acc ^= lambda.get(term.lambda_index) && minors.at(term.minor_index);
            if (acc) return false;
        }
        return true;
    }
};

inline SmmInstance smm_instance(std::span<const BitMatrix> matrices, std::size_t r,
                                std::uint64_t equation_budget = 1u << 22) {
    if (matrices.empty()) throw std::invalid_argument("smm_instance: no matrices");
    const std::size_t m_rows = matrices[0].rows(), n_cols = matrices[0].cols();
    for (const auto& m : matrices)
        if (m.rows() != m_rows || m.cols() != n_cols)
            throw std::invalid_argument("smm_instance: mixed shapes");
    SmmInstance inst;
    inst.big_k = matrices.size();
    inst.m_rows = m_rows;
    inst.n_cols = n_cols;
    inst.r = r;
    if (r + 1 > n_cols) return inst;  // no (r+1)-minors, empty system

    const detail::BinomTable binom_tab(n_cols, r + 1);
    const BigInt eq_count = BigInt(m_rows) * binomial((long long)n_cols, (long long)r + 1);
    if (eq_count > equation_budget) throw BudgetExceeded("smm_instance: equation budget exceeded");

    std::vector<std::uint32_t> subset(r + 1);
    std::vector<std::uint32_t> t_subset(r);
    for (std::size_t i = 0; i <= r; ++i) subset[i] = std::uint32_t(i);
    bool more = true;
    while (more) {
        for (std::size_t j = 0; j < m_rows; ++j) {
            SmmEquation eq;
            for (std::size_t drop = 0; drop <= r; ++drop) {
                const std::uint32_t col = subset[drop];
                std::size_t p = 0;
                for (std::size_t i = 0; i <= r; ++i)
                    if (i != drop) t_subset[p++] = subset[i];
                const auto t_rank = std::uint32_t(detail::colex_rank(t_subset, binom_tab));
                for (std::size_t i = 0; i < matrices.size(); ++i)
                    if (matrices[i].get(j, col))
                        eq.terms.push_back({std::uint32_t(i), t_rank});
            }
            inst.equations.push_back(std::move(eq));
        }
        more = detail::next_subset(subset, std::uint32_t(n_cols));
    }
    return inst;
}

}  // namespace olivier
