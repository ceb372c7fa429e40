#include <catch2/catch_amalgamated.hpp>

#include "olivier/bits.hpp"
#include "olivier/rng.hpp"

using namespace olivier;

TEST_CASE("BitVector basics") {
    BitVector v(70);
    REQUIRE(v.size() == 70);
    REQUIRE(v.none());
    v.set(0, true);
    v.set(69, true);
    REQUIRE(v.get(0));
    REQUIRE(v.get(69));
    REQUIRE(v.popcount() == 2);
    REQUIRE(v.lowest_set() == 0);

    // xor with itself is the zero vector
    BitVector z = v ^ v;
    REQUIRE(z.none());
}

TEST_CASE("BitVector tail stays zero") {
    Rng rng(1);
    for (std::size_t len : {1u, 63u, 64u, 65u, 127u, 130u}) {
        BitVector v = rng.bits(len);
        BitVector w = ~v;
        REQUIRE((v ^ w) == BitVector::ones(len));
        REQUIRE((v & w).none());
        // popcounts of v and ~v partition the length
        REQUIRE(v.popcount() + w.popcount() == len);
    }
}

TEST_CASE("BitVector slice and concat") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t len = 1 + rng.below(200);
        BitVector v = rng.bits(len);
        std::size_t a = rng.below(len + 1);
        std::size_t b = a + rng.below(len - a + 1);
        BitVector s = v.slice(a, b);
        REQUIRE(s.size() == b - a);
        for (std::size_t i = a; i < b; ++i) REQUIRE(s.get(i - a) == v.get(i));

        BitVector rejoined = v.slice(0, a).concat(s).concat(v.slice(b, len));
        REQUIRE(rejoined == v);
    }
}

TEST_CASE("BitVector dot is the parity of the AND") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t len = 1 + rng.below(150);
        BitVector a = rng.bits(len), b = rng.bits(len);
        bool expect = false;
        for (std::size_t i = 0; i < len; ++i) expect ^= a.get(i) && b.get(i);
        REQUIRE(a.dot(b) == expect);
    }
}

TEST_CASE("BitVector bytes round trip") {
    Rng rng(4);
    for (std::size_t len : {1u, 8u, 9u, 64u, 65u, 200u}) {
        BitVector v = rng.bits(len);
        auto bytes = v.to_bytes();
        REQUIRE(bytes.size() == (len + 7) / 8);
        REQUIRE(BitVector::from_bytes(bytes, len) == v);
    }
}

TEST_CASE("Rng determinism") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.word() == b.word());
    REQUIRE(a.bits(97) == b.bits(97));
}
