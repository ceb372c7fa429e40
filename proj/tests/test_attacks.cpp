#include <catch2/catch_amalgamated.hpp>

#include "olivier/attacks.hpp"

using namespace olivier;

namespace {

// F o S without the lambda mixing: the weakened public system of the
// kernel-attack setting.
QuadraticSystem weakened_system(const PrivateKey& sk) {
    std::vector<QuadraticPoly> polys;
    for (const auto& f : sk.f.polys) polys.push_back(f.compose_right_linear(sk.s));
    return QuadraticSystem(std::move(polys));
}

bool maps_into_oil(const PrivateKey& sk, const BitVector& w) {
    BitVector img = sk.s.mul(w);
    for (std::size_t i = 0; i < sk.params.v; ++i)
        if (img.get(i)) return false;
    return true;
}

}  // namespace

TEST_CASE("kernel attack recovers the oil space without lambda mixing") {
    Params p{40, 6, 80};
    Rng rng(80);
    auto [pk, sk] = keygen(p, rng);
    QuadraticSystem weak = weakened_system(sk);

    // a single full-rank polar matrix already leaks an (n-2v)-dimensional slice
    BitMatrix pm = weak.polys[0].polar_matrix();
    REQUIRE(rank(pm) <= 12);
    if (rank(pm) == 12) REQUIRE(kernel_basis(pm).size() == 40 - 12);

    AttackReport rep = kernel_attack(weak, p.shape(), rng);
    REQUIRE(rep.success);
    REQUIRE(rep.basis.size() == p.oil());
    for (const auto& w : rep.basis) REQUIRE(maps_into_oil(sk, w));
    // the weakened system's polar forms vanish on all recovered pairs
    for (std::size_t i = 0; i < rep.basis.size(); ++i)
        for (std::size_t j = i + 1; j < rep.basis.size(); ++j)
            for (const auto& g : weak.polys)
                REQUIRE_FALSE(g.polar_eval(rep.basis[i], rep.basis[j]));
}

TEST_CASE("kernel attack degenerates when the oil space is too small") {
    // n <= 2v: the rank bound is vacuous and the kernels carry nothing
    Rng rng(81);
    OvShape shape{10, 5};
    std::vector<QuadraticPoly> polys;
    for (int i = 0; i < 10; ++i) polys.push_back(QuadraticPoly::random_ov(shape, rng));
    AttackReport rep = kernel_attack(QuadraticSystem(polys), shape, rng);
    REQUIRE_FALSE(rep.success);
}

TEST_CASE("oil pair search separates u = n from u = 2n") {
    Rng rng(82);
    // with u = n pairs show up within a modest budget
    auto weak = keygen(Params{30, 6, 30}, rng);
    auto pairs = oil_pair_search(weak.pub, 10000, rng);
    REQUIRE(!pairs.empty());
    // every reported pair satisfies the polar conditions
    for (const auto& [a, b] : pairs) {
        for (const auto& poly : weak.pub.head.polys) REQUIRE_FALSE(poly.polar_eval(a, b));
        for (const auto& poly : weak.pub.tail.polys) REQUIRE_FALSE(poly.polar_eval(a, b));
        REQUIRE(b != a);
        REQUIRE(b.any());
    }

    // hardened u = 2n: random sampling finds nothing
    auto hard = keygen(Params{30, 6, 60}, rng);
    REQUIRE(oil_pair_search(hard.pub, 10000, rng).empty());
}

TEST_CASE("planted oil vectors admit partners") {
    Rng rng(83);
    auto [pk, sk] = keygen(Params{30, 6, 30}, rng);
    // a in O = S^-1 O': the head polar sections vanish on all of O, so only
    // the u tail constraints remain and a partner appears whenever they go
    // rank deficient on O (a few permille per vector)
    std::vector<BitMatrix> polars;
    for (const auto& q : pk.head.polys) polars.push_back(q.polar_matrix());
    for (const auto& q : pk.tail.polys) polars.push_back(q.polar_matrix());
    int found = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        BitVector oil_part = rng.bits(24);
        BitVector a = sk.s_inv.mul(BitVector(6).concat(oil_part));
        if (a.none()) continue;
        BitMatrix phi(polars.size(), 30);
        for (std::size_t i = 0; i < polars.size(); ++i) phi.set_row(i, polars[i].mul(a));
        auto ker = kernel_basis(phi);
        REQUIRE(!ker.empty());  // a itself always solves the system
        if (ker.size() >= 2) {
            ++found;
            // every kernel vector is an oil vector
            for (const auto& b : ker) REQUIRE(maps_into_oil(sk, b));
        }
    }
    REQUIRE(found >= 1);
}

TEST_CASE("oil reconstruction separates u = n from u = 2n under equal budgets") {
    Rng rng(84);
    KeygenOptions hom{.homogeneous_central = true};
    auto weak = keygen(Params{30, 6, 30}, rng, hom);
    AttackReport rep = oil_reconstruction(weak.pub, 5, 300000, rng);
    REQUIRE(rep.success);
    REQUIRE(rep.basis.size() == 24);
    for (const auto& w : rep.basis) REQUIRE(maps_into_oil(weak.priv, w));

    auto hard = keygen(Params{30, 6, 60}, rng, hom);
    AttackReport rep2 = oil_reconstruction(hard.pub, 5, 300000, rng);
    REQUIRE_FALSE(rep2.success);
    REQUIRE(rep2.pairs == 0);
}

TEST_CASE("genuinely-oil evaluation rows stay inside an n-dimensional space") {
    Rng rng(85);
    auto [pk, sk] = keygen(Params{30, 6, 30}, rng, KeygenOptions{.homogeneous_central = true});
    // P(v) = (Lambda Q(v); Q(v)) for v in O, so any stack of such rows has
    // rank at most u = n
    BitMatrix b(40, pk.params.m());
    for (std::size_t r = 0; r < 40; ++r) {
        BitVector oil_part = rng.bits(24);
        BitVector v = sk.s_inv.mul(BitVector(6).concat(oil_part));
        b.set_row(r, public_evaluate(pk, v));
    }
    REQUIRE(rank(b) <= 30);
}

TEST_CASE("rank deficiency rate") {
    Rng rng(86);
    double rate = rank_deficiency_rate(24, 500, rng);
    REQUIRE(rate > 0.25);
    REQUIRE(rate < 0.55);

    // degenerate single-variable case: the polar system is always zero
    REQUIRE(rank_deficiency_rate(1, 100, rng) == 1.0);

    // one extra equation roughly halves the rate
    double extra = rank_deficiency_rate(24, 500, rng, 25);
    double ratio = extra / rate;
    REQUIRE(ratio > 0.25);
    REQUIRE(ratio < 0.75);
}

TEST_CASE("lambda strip brute force") {
    Params p{14, 3, 8};
    // u < n is outside keygen's contract but exactly the weakened setting
    // the brute force is for; assemble the key directly.
    Rng rng(87);
    PrivateKey sk;
    sk.params = p;
    sk.seed = rng.bytes32();
    std::vector<QuadraticPoly> central;
    for (std::size_t i = 0; i < p.n; ++i)
        central.push_back(QuadraticPoly::random_ov(p.shape(), rng));
    sk.f = QuadraticSystem(std::move(central));
    sk.s = random_invertible(p.n, rng);
    sk.s_inv = *inverse(sk.s);
    do {
        sk.lambda = random_matrix(p.n, p.u, rng);
    } while (rank(sk.lambda) != std::min(p.n, p.u));
    PublicKey pk;
    pk.params = p;
    pk.seed = sk.seed;
    pk.tail = expand_q(sk.seed, p);
    pk.head = derive_public_head(sk);

    auto hit = lambda_strip_bruteforce(pk, p.shape(), 8);
    REQUIRE(hit.has_value());
    // the witness row strips p_1 down to something of OV polar rank
    QuadraticPoly stripped = pk.head.polys[0];
    for (std::size_t j = 0; j < p.u; ++j)
        if (hit->get(j)) stripped ^= pk.tail.polys[j];
    REQUIRE(rank(stripped.polar_matrix()) <= 2 * p.v);

    // u = 0: the head polynomial is tested directly
    PublicKey bare;
    bare.params = Params{14, 3, 0};
    bare.seed = Seed{};
    bare.tail = QuadraticSystem{};
    bare.head = QuadraticSystem({QuadraticPoly::random_ov(p.shape(), rng)});
    auto direct = lambda_strip_bruteforce(bare, p.shape(), 8);
    REQUIRE(direct.has_value());
    REQUIRE(direct->size() == 0);

    // random systems of the same size admit no witness
    for (int draw = 0; draw < 20; ++draw) {
        PublicKey noise;
        noise.params = p;
        noise.seed = rng.bytes32();
        noise.tail = expand_q(noise.seed, p);
        std::vector<QuadraticPoly> head;
        for (std::size_t i = 0; i < p.n; ++i) head.push_back(QuadraticPoly::random_full(p.n, rng));
        noise.head = QuadraticSystem(std::move(head));
        REQUIRE_FALSE(lambda_strip_bruteforce(noise, p.shape(), 8).has_value());
    }
}

TEST_CASE("minrank feasibility") {
    // n' = 2r + 2 makes the inequality hold whenever m = K
    REQUIRE(minrank_feasible(17, 6, 17, 2));
    REQUIRE_FALSE(minrank_feasible(3, 6, std::size_t(1) << 40, 2));
    // r = 0 degenerates to m n >= K - 1
    REQUIRE(minrank_feasible(4, 5, 21, 0));
    REQUIRE_FALSE(minrank_feasible(4, 5, 22, 0));
}

TEST_CASE("complexity estimates reproduce the proposed-parameter table") {
    REQUIRE(estimate_minrank_bits(Params::sl1()).bits == 222);
    REQUIRE(estimate_minrank_bits(Params::sl2()).bits == 265);
    REQUIRE(estimate_minrank_bits(Params::sl3()).bits == 324);

    REQUIRE(estimate_xl_bits(320, 12).bits == 158);
    REQUIRE(estimate_xl_bits(640, 14).bits == 207);
    REQUIRE(estimate_xl_bits(1280, 17).bits == 275);

    REQUIRE(estimate_f4_bits(320, 12).bits == 167);
    REQUIRE(estimate_f4_bits(640, 14).bits == 222);
    REQUIRE(estimate_f4_bits(1280, 17).bits == 300);

    // the records stream carries the operating parameters
    auto est = estimate_minrank_bits(Params::sl1());
    REQUIRE(est.big_k == 641);
    REQUIRE(est.target_rank == 48);
    REQUIRE(est.punctured_cols == 98);
}

TEST_CASE("support minors instance counting") {
    Rng rng(88);
    std::vector<BitMatrix> mats{random_matrix(3, 3, rng), random_matrix(3, 3, rng)};
    SmmInstance inst = smm_instance(mats, 1);
    REQUIRE(inst.equation_count() == 9);          // m C(3,2)
    REQUIRE(inst.variable_count() == 5);          // C(3,1) + K
    REQUIRE(inst.quadratic_monomial_count() == 6);  // K C(3,1)

    // r at the full dimension: no (r+1)-minors exist
    REQUIRE(smm_instance(mats, 3).equation_count() == 0);
}

TEST_CASE("support minors counts match the closed forms on a grid") {
    Rng rng(95);
    for (std::size_t k : {1u, 2u, 4u})
        for (std::size_t n : {3u, 5u, 6u})
            for (std::size_t r : {1u, 2u}) {
                std::vector<BitMatrix> mats;
                for (std::size_t i = 0; i < k; ++i) mats.push_back(random_matrix(n, n, rng));
                SmmInstance inst = smm_instance(mats, r);
                REQUIRE(inst.equation_count() == BigInt(n) * binomial(long(n), long(r) + 1));
                REQUIRE(inst.variable_count() == binomial(long(n), long(r)) + k);
                REQUIRE(inst.quadratic_monomial_count() == BigInt(k) * binomial(long(n), long(r)));
            }
}

TEST_CASE("a planted low-rank combination satisfies the support minors system") {
    Rng rng(89);
    const std::size_t n = 6, r = 2, k = 3;
    // plant M = R C with full-rank factors, then hide it as M1 ^ M2
    BitMatrix rm(n, r), cm(r, n);
    do {
        rm = random_matrix(n, r, rng);
    } while (rank(rm) != r);
    do {
        cm = random_matrix(r, n, rng);
    } while (rank(cm) != r);
    BitMatrix planted = mat_mul(rm, cm);

    std::vector<BitMatrix> mats;
    mats.push_back(random_matrix(n, n, rng));
    mats.push_back(planted ^ mats[0]);
    mats.push_back(random_matrix(n, n, rng));
    SmmInstance inst = smm_instance(mats, r);
    REQUIRE(inst.equation_count() == n * 20);  // m C(6,3)

    // lambda = (1,1,0); minors of C indexed by colex rank over the r-subsets
    BitVector lambda = BitVector::of({1, 1, 0});
    detail::BinomTable binom_tab(n, r + 1);
    std::vector<bool> minors(15, false);
    std::vector<std::uint32_t> t_subset{0, 1};
    do {
        BitMatrix sub(r, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) sub.set(i, j, cm.get(i, t_subset[j]));
        // GF(2) determinant
        minors[detail::colex_rank(t_subset, binom_tab)] = rank(sub) == r;
    } while (detail::next_subset(t_subset, n));
    REQUIRE(inst.satisfied_by(lambda, minors));

    // a random assignment fails with overwhelming probability
    std::vector<bool> noise = minors;
    noise[0] = !noise[0];
    noise[7] = !noise[7];
    REQUIRE_FALSE(inst.satisfied_by(lambda, noise));
}
