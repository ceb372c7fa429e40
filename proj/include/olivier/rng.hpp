#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "olivier/bits.hpp"

namespace olivier {

/// Deterministic random stream used for sampling keys, plaintexts and test
/// instances. Only raw engine words are consumed (never std distributions),
/// so the output is identical across platforms for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng from_entropy() {
        std::random_device rd;
        return Rng((std::uint64_t(rd()) << 32) | rd());
    }

    std::uint64_t word() { return gen_(); }

    bool bit() { return word() & 1u; }

    /// Uniform in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
        std::uint64_t mask = bound <= 1 ? 0 : (~std::uint64_t(0) >> std::countl_zero(bound - 1));
        for (;;) {
            std::uint64_t w = word() & mask;
            if (w < bound) return w;
        }
    }

    /// len uniformly random bits, one engine word per 64 bits.
    BitVector bits(std::size_t len) {
        BitVector v(len);
        for (auto& w : v.words()) w = word();
        v.mask_tail();
        return v;
    }

    std::array<std::uint8_t, 32> bytes32() {
        std::array<std::uint8_t, 32> out{};
        for (std::size_t i = 0; i < 4; ++i) {
            std::uint64_t w = word();
            for (std::size_t b = 0; b < 8; ++b) out[8 * i + b] = std::uint8_t(w >> (8 * b));
        }
        return out;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace olivier
