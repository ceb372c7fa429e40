#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "olivier/bits.hpp"

namespace olivier {

using Digest = std::array<std::uint8_t, 32>;
using Seed = std::array<std::uint8_t, 32>;

inline Digest sha256(std::span<const std::uint8_t> data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size())
        throw std::runtime_error("sha256: digest failure");
    return out;
}

inline void append_le32(std::vector<std::uint8_t>& buf, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) buf.push_back(std::uint8_t(x >> (8 * i)));
}

/// 256-bit domain-separated hash of a bit vector: tag || LE32(len) || packed bits.
inline Digest hash_bits(std::string_view tag, const BitVector& v) {
    std::vector<std::uint8_t> buf(tag.begin(), tag.end());
    append_le32(buf, std::uint32_t(v.size()));
    auto packed = v.to_bytes();
    buf.insert(buf.end(), packed.begin(), packed.end());
    return sha256(buf);
}

/// Extendable output stream: block i is SHA-256(prefix || seed || LE64(i)).
/// Deterministic and platform independent; used wherever key material must be
/// reproducible from a 32-byte seed.
class XofStream {
public:
    XofStream(std::string_view prefix, const Seed& seed) : pos_(sizeof(Digest)) {
        input_.assign(prefix.begin(), prefix.end());
        input_.insert(input_.end(), seed.begin(), seed.end());
        input_.resize(input_.size() + 8, 0);
    }

    std::uint8_t byte() {
        if (pos_ == block_.size()) refill();
        return block_[pos_++];
    }

    void fill(std::span<std::uint8_t> out) {
        for (auto& b : out) b = byte();
    }

    /// len bits consumed LSB-first from ceil(len/8) stream bytes.
    BitVector bits(std::size_t len) {
        std::vector<std::uint8_t> buf((len + 7) / 8);
        fill(buf);
        return BitVector::from_bytes(buf, len);
    }

private:
    void refill() {
        std::uint8_t* ctr = input_.data() + input_.size() - 8;
        for (int i = 0; i < 8; ++i) ctr[i] = std::uint8_t(counter_ >> (8 * i));
        block_ = sha256(input_);
        ++counter_;
        pos_ = 0;
    }

    std::vector<std::uint8_t> input_;
    Digest block_{};
    std::uint64_t counter_ = 0;
    std::size_t pos_;
};

}  // namespace olivier
