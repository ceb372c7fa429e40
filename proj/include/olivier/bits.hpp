#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace olivier {

using Word = std::uint64_t;
inline constexpr std::size_t kWordBits = 64;

inline std::size_t words_for_bits(std::size_t bits) {
    return (bits + kWordBits - 1) / kWordBits;
}

/// Fixed-length bit vector over F2, packed LSB-first into 64-bit words.
/// Bits at positions >= size() are kept zero at all times.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_(words_for_bits(len), 0) {}

    static BitVector ones(std::size_t len) {
        BitVector v(len);
        for (auto& w : v.words_) w = ~Word(0);
        v.mask_tail();
        return v;
    }

    /// Convenience literal constructor: BitVector::of({1,0,1}).
    static BitVector of(std::initializer_list<int> bits) {
        BitVector v(bits.size());
        std::size_t i = 0;
        for (int b : bits) v.set(i++, b != 0);
        return v;
    }

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool get(std::size_t i) const {
        return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
    }
    void set(std::size_t i, bool b) {
        Word mask = Word(1) << (i % kWordBits);
        if (b)
            words_[i / kWordBits] |= mask;
        else
            words_[i / kWordBits] &= ~mask;
    }
    void flip(std::size_t i) { words_[i / kWordBits] ^= Word(1) << (i % kWordBits); }

    BitVector& operator^=(const BitVector& o) {
        check_same_length(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
        return *this;
    }
    BitVector& operator&=(const BitVector& o) {
        check_same_length(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    BitVector& operator|=(const BitVector& o) {
        check_same_length(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }

    /// Complement of every bit inside the length.
    BitVector operator~() const {
        BitVector v(len_);
        for (std::size_t i = 0; i < words_.size(); ++i) v.words_[i] = ~words_[i];
        v.mask_tail();
        return v;
    }

    /// Inner product over F2: parity of the AND.
    bool dot(const BitVector& o) const {
        check_same_length(o);
        Word acc = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & o.words_[i];
        return std::popcount(acc) & 1;
    }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (Word w : words_) c += std::size_t(std::popcount(w));
        return c;
    }
    bool any() const {
        for (Word w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    /// Index of the lowest set bit, or -1 if the vector is zero.
    long lowest_set() const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i]) return long(i * kWordBits + std::size_t(std::countr_zero(words_[i])));
        return -1;
    }

    /// Copy of the bit range [begin, end).
    BitVector slice(std::size_t begin, std::size_t end) const {
        if (begin > end || end > len_) throw std::invalid_argument("BitVector::slice: bad range");
        BitVector v(end - begin);
        const std::size_t wo = begin / kWordBits, off = begin % kWordBits;
        for (std::size_t k = 0; k < v.words_.size(); ++k) {
            Word w = words_[wo + k] >> off;
            if (off != 0 && wo + k + 1 < words_.size()) w |= words_[wo + k + 1] << (kWordBits - off);
            v.words_[k] = w;
        }
        v.mask_tail();
        return v;
    }

    /// Concatenation: this followed by o.
    BitVector concat(const BitVector& o) const {
        BitVector v(len_ + o.len_);
        for (std::size_t i = 0; i < len_; ++i)
            if (get(i)) v.set(i, true);
        for (std::size_t i = 0; i < o.len_; ++i)
            if (o.get(i)) v.set(len_ + i, true);
        return v;
    }

    std::span<const Word> words() const { return words_; }
    std::span<Word> words() { return words_; }

    /// Packed LSB-first bytes, ceil(len/8) of them.
    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> out((len_ + 7) / 8, 0);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = std::uint8_t((words_[i / 8] >> (8 * (i % 8))) & 0xFF);
        return out;
    }
    static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t len) {
        if (bytes.size() < (len + 7) / 8) throw std::invalid_argument("BitVector::from_bytes: short buffer");
        BitVector v(len);
        for (std::size_t i = 0; i < (len + 7) / 8; ++i)
            v.words_[i / 8] |= Word(bytes[i]) << (8 * (i % 8));
        v.mask_tail();
        return v;
    }

    /// Low word as an integer (bits beyond 64 ignored); handy for small lengths.
    Word low_word() const { return words_.empty() ? 0 : words_[0]; }

    /// Vector whose low min(len,64) bits are taken from an integer.
    static BitVector from_word(Word w, std::size_t len) {
        BitVector v(len);
        if (!v.words_.empty()) v.words_[0] = w;
        v.mask_tail();
        return v;
    }

    bool operator==(const BitVector&) const = default;

    void mask_tail() {
        if (len_ % kWordBits != 0 && !words_.empty())
            words_.back() &= (Word(1) << (len_ % kWordBits)) - 1;
    }

private:
    void check_same_length(const BitVector& o) const {
        if (len_ != o.len_) throw std::invalid_argument("BitVector: length mismatch");
    }

    std::size_t len_ = 0;
    std::vector<Word> words_;
};

}  // namespace olivier
