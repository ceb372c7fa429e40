#include <catch2/catch_amalgamated.hpp>

#include "olivier/quadform.hpp"

using namespace olivier;

namespace {

// Term-by-term evaluation, independent of the packed path.
bool naive_evaluate(const QuadraticPoly& p, const BitVector& x) {
    bool acc = p.constant();
    for (std::size_t i = 0; i < p.n(); ++i) {
        if (p.lin().get(i) && x.get(i)) acc ^= true;
        for (std::size_t j = i + 1; j < p.n(); ++j)
            if (p.coeff(i, j) && x.get(i) && x.get(j)) acc ^= true;
    }
    return acc;
}

QuadraticPoly monomial(std::size_t n, std::size_t i, std::size_t j) {
    QuadraticPoly p(n);
    p.set_coeff(i, j, true);
    return p;
}

}  // namespace

TEST_CASE("evaluate") {
    // p = x1 x2 at (1,1)
    QuadraticPoly p = monomial(2, 0, 1);
    REQUIRE(p.evaluate(BitVector::of({1, 1})) == true);
    REQUIRE(p.evaluate(BitVector::of({1, 0})) == false);

    // p = x1 x2 + x1 + 1 at (0,0): only the constant survives
    QuadraticPoly q = monomial(2, 0, 1);
    q.set_lin(0, true);
    q.set_constant(true);
    REQUIRE(q.evaluate(BitVector::of({0, 0})) == true);

    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        QuadraticPoly r = QuadraticPoly::random_full(12, rng);
        BitVector x = rng.bits(12);
        REQUIRE(r.evaluate(x) == naive_evaluate(r, x));
    }
}

TEST_CASE("square terms fold into the linear part") {
    // matrix with a_00 = 1 (an x0^2 term) and a_01 = a_10 = 1 (cancel)
    BitMatrix m(3, 3);
    m.set(0, 0, true);
    m.set(0, 1, true);
    m.set(1, 0, true);
    m.set(2, 1, true);
    QuadraticPoly p = QuadraticPoly::from_parts(m, BitVector(3), false);
    REQUIRE(p.lin().get(0));       // x0^2 -> x0
    REQUIRE_FALSE(p.coeff(0, 1));  // a_01 + a_10 = 0
    REQUIRE(p.coeff(1, 2));
    // canonical form: strictly upper triangular quad matrix
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j <= i; ++j) REQUIRE_FALSE(p.quad().get(i, j));
}

TEST_CASE("polar matrix") {
    QuadraticPoly lin(5);
    lin.set_lin(2, true);
    lin.set_constant(true);
    REQUIRE(lin.polar_matrix().is_zero());

    QuadraticPoly p = monomial(2, 0, 1);
    BitMatrix expect(2, 2);
    expect.set(0, 1, true);
    expect.set(1, 0, true);
    REQUIRE(p.polar_matrix() == expect);

    // polar matrices are symmetric with zero diagonal, rank bounded by 2v for OV
    Rng rng(22);
    OvShape shape{20, 4};
    for (int trial = 0; trial < 100; ++trial) {
        QuadraticPoly f = QuadraticPoly::random_ov(shape, rng);
        BitMatrix pm = f.polar_matrix();
        REQUIRE(pm == pm.transposed());
        for (std::size_t i = 0; i < 20; ++i) REQUIRE_FALSE(pm.get(i, i));
        REQUIRE(rank(pm) <= 8);
    }
}

TEST_CASE("polar_eval equals both defining formulas") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        QuadraticPoly p = QuadraticPoly::random_full(14, rng);
        BitVector x = rng.bits(14), y = rng.bits(14);
        // definitional route; over F2 the constant term survives the
        // three-fold sum, so the identity is exact on constant-free p
        bool def = p.evaluate(x ^ y) ^ p.evaluate(x) ^ p.evaluate(y);
        REQUIRE(p.polar_eval(x, y) == (def ^ p.constant()));
        QuadraticPoly h = p;
        h.set_constant(false);
        REQUIRE(h.polar_eval(x, y) ==
                (h.evaluate(x ^ y) ^ h.evaluate(x) ^ h.evaluate(y)));
        // bilinear-matrix route
        BitMatrix pm = p.polar_matrix();
        bool bil = false;
        for (std::size_t i = 0; i < 14; ++i)
            if (x.get(i)) bil ^= pm.row_dot(i, y);
        REQUIRE(p.polar_eval(x, y) == bil);
        // alternating on the diagonal
        REQUIRE(p.polar_eval(x, x) == false);
    }

    QuadraticPoly p = monomial(2, 0, 1);
    REQUIRE(p.polar_eval(BitVector::of({1, 0}), BitVector::of({0, 1})) == true);
}

TEST_CASE("polar form is symmetric, bilinear and alternating") {
    Rng rng(24);
    QuadraticPoly p = QuadraticPoly::random_full(10, rng);
    for (int trial = 0; trial < 100; ++trial) {
        BitVector x = rng.bits(10), y = rng.bits(10), z = rng.bits(10);
        REQUIRE(p.polar_eval(x, y) == p.polar_eval(y, x));
        REQUIRE(p.polar_eval(x ^ z, y) == (p.polar_eval(x, y) ^ p.polar_eval(z, y)));
    }
    // alternating, exhaustive
    for (unsigned x = 0; x < 1024; ++x)
        REQUIRE(p.polar_eval(BitVector::from_word(x, 10), BitVector::from_word(x, 10)) == false);
}

TEST_CASE("compose_right_linear") {
    Rng rng(25);
    QuadraticPoly p = QuadraticPoly::random_full(6, rng);
    REQUIRE(p.compose_right_linear(BitMatrix::identity(6)) == p);

    // exhaustive check q(x) = p(Sx) for n = 6
    BitMatrix s = random_invertible(6, rng);
    QuadraticPoly q = p.compose_right_linear(s);
    for (unsigned x = 0; x < 64; ++x) {
        BitVector xv = BitVector::from_word(x, 6);
        REQUIRE(q.evaluate(xv) == p.evaluate(s.mul(xv)));
    }

    // polar identity M' = S^t N' S at n = 16
    for (int trial = 0; trial < 25; ++trial) {
        QuadraticPoly f = QuadraticPoly::random_full(16, rng);
        BitMatrix t = random_matrix(16, 16, rng);
        BitMatrix lhs = f.compose_right_linear(t).polar_matrix();
        BitMatrix st = t.transposed();
        REQUIRE(lhs == mat_mul(mat_mul(st, f.polar_matrix()), t));
    }
}

TEST_CASE("composition functoriality") {
    Rng rng(26);
    for (int trial = 0; trial < 20; ++trial) {
        QuadraticPoly p = QuadraticPoly::random_full(12, rng);
        BitMatrix s = random_matrix(12, 12, rng), t = random_matrix(12, 12, rng);
        REQUIRE(p.compose_right_linear(s).compose_right_linear(t) ==
                p.compose_right_linear(mat_mul(s, t)));
    }
}

TEST_CASE("is_ov") {
    OvShape shape{5, 2};
    REQUIRE(monomial(5, 0, 4).is_ov(shape));        // x1 x5: vinegar times oil
    REQUIRE_FALSE(monomial(5, 3, 4).is_ov(shape));  // x4 x5: oil times oil

    Rng rng(27);
    OvShape big{24, 5};
    for (int trial = 0; trial < 1000; ++trial)
        REQUIRE(QuadraticPoly::random_ov(big, rng).is_ov(big));
}

TEST_CASE("random_ov hits only allowed monomials and is unbiased") {
    Rng rng(28);
    // shape (3,1): only x1x2 and x1x3 may appear
    OvShape tiny{3, 1};
    for (int trial = 0; trial < 200; ++trial) {
        QuadraticPoly p = QuadraticPoly::random_ov(tiny, rng);
        REQUIRE_FALSE(p.coeff(1, 2));
    }
    // frequency of each allowed coefficient near 1/2
    OvShape shape{8, 3};
    const int samples = 10000;
    std::vector<int> counts(8 * 8, 0);
    for (int s = 0; s < samples; ++s) {
        QuadraticPoly p = QuadraticPoly::random_ov(shape, rng);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i + 1; j < 8; ++j)
                if (p.coeff(i, j)) counts[i * 8 + j]++;
    }
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 8; ++j) {
            double freq = double(counts[i * 8 + j]) / samples;
            REQUIRE(freq > 0.45);
            REQUIRE(freq < 0.55);
        }
}

TEST_CASE("OV polar rank bound and kernel support") {
    Rng rng(29);
    OvShape shape{20, 3};
    int full_rank_seen = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        QuadraticPoly f = QuadraticPoly::random_ov(shape, rng);
        BitMatrix pm = f.polar_matrix();
        std::size_t r = rank(pm);
        REQUIRE(r <= 6);
        if (r == 6) {
            ++full_rank_seen;
            auto ker = kernel_basis(pm);
            REQUIRE(ker.size() == 20 - 6);
            for (const auto& w : ker)
                for (std::size_t i = 0; i < shape.v; ++i) REQUIRE_FALSE(w.get(i));
        }
    }
    REQUIRE(full_rank_seen > 9000);  // deficiency is rare for v << n
}

TEST_CASE("vanishes_on_subspace") {
    Rng rng(30);
    OvShape shape{20, 6};
    std::vector<QuadraticPoly> polys;
    for (int i = 0; i < 10; ++i) polys.push_back(QuadraticPoly::random_ov(shape, rng));
    QuadraticSystem ov_sys(polys);

    // the canonical oil space {e_{v+1}..e_n}
    std::vector<BitVector> oil;
    for (std::size_t i = shape.v; i < shape.n; ++i) {
        BitVector e(shape.n);
        e.set(i, true);
        oil.push_back(e);
    }
    REQUIRE(vanishes_on_subspace(ov_sys, oil));
    REQUIRE(vanishes_on_subspace(ov_sys, std::vector<BitVector>{}));

    // fully quadratic systems almost never vanish on a random 3-dim subspace
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<QuadraticPoly> full;
        for (int i = 0; i < 10; ++i) full.push_back(QuadraticPoly::random_full(20, rng));
        std::vector<BitVector> basis{rng.bits(20), rng.bits(20), rng.bits(20)};
        if (vanishes_on_subspace(QuadraticSystem(full), basis)) ++failures;
    }
    REQUIRE(failures <= 1);
}

TEST_CASE("coefficient packing round trips") {
    Rng rng(31);
    for (std::size_t n : {2u, 5u, 17u, 33u}) {
        QuadraticPoly p = QuadraticPoly::random_full(n, rng);
        BitVector packed = pack_coeffs(p);
        REQUIRE(packed.size() == full_coeff_bits(n));
        REQUIRE(unpack_coeffs(packed, n) == p);
    }
    OvShape shape{17, 4};
    QuadraticPoly f = QuadraticPoly::random_ov(shape, rng);
    BitVector packed = pack_coeffs_ov(f, shape);
    REQUIRE(packed.size() == ov_coeff_bits(shape));
    REQUIRE(unpack_coeffs_ov(packed, shape) == f);
}
