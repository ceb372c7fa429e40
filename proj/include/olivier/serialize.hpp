#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "olivier/keygen.hpp"
#include "olivier/protocol.hpp"

namespace olivier {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::uint8_t kKeyVersion = 1;
inline constexpr std::uint8_t kKindPublic = 1;
inline constexpr std::uint8_t kKindPrivate = 2;

namespace detail {

/// LSB-first bit writer; flush() pads the current byte with zeros, giving the
/// per-polynomial / per-matrix byte alignment of the formats.
class BitWriter {
public:
    explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void bit(bool b) {
        if (b) cur_ |= std::uint8_t(1u << nbits_);
        if (++nbits_ == 8) flush_byte();
    }
    void bits(const BitVector& v) {
        for (std::size_t i = 0; i < v.size(); ++i) bit(v.get(i));
    }
    void flush() {
        if (nbits_ > 0) flush_byte();
    }

private:
    void flush_byte() {
        out_.push_back(cur_);
        cur_ = 0;
        nbits_ = 0;
    }
    std::vector<std::uint8_t>& out_;
    std::uint8_t cur_ = 0;
    unsigned nbits_ = 0;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint32_t le32() {
        need(4);
        std::uint32_t x = 0;
        for (int i = 0; i < 4; ++i) x |= std::uint32_t(data_[pos_++]) << (8 * i);
        return x;
    }
    std::span<const std::uint8_t> take(std::size_t k) {
        need(k);
        auto s = data_.subspan(pos_, k);
        pos_ += k;
        return s;
    }
    BitVector bits(std::size_t count) { return BitVector::from_bytes(take((count + 7) / 8), count); }
    bool exhausted() const { return pos_ == data_.size(); }

private:
    void need(std::size_t k) const {
        if (pos_ + k > data_.size()) throw ParseError("truncated input");
    }
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

inline void append_magic(std::vector<std::uint8_t>& out, const char (&magic)[5]) {
    out.insert(out.end(), magic, magic + 4);
}

inline void expect_magic(ByteReader& r, const char (&magic)[5]) {
    auto got = r.take(4);
    for (int i = 0; i < 4; ++i)
        if (got[i] != std::uint8_t(magic[i])) throw ParseError("bad magic");
}

inline BitVector flatten_rows(const BitMatrix& m) {
    BitVector v(m.rows() * m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.get(r, c)) v.set(r * m.cols() + c, true);
    return v;
}

inline BitMatrix unflatten_rows(const BitVector& v, std::size_t rows, std::size_t cols) {
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (v.get(r * cols + c)) m.set(r, c, true);
    return m;
}

inline Params read_params_header(ByteReader& r, std::uint8_t expected_kind) {
    expect_magic(r, "OLVR");
    if (r.u8() != kKeyVersion) throw ParseError("unsupported key version");
    if (r.u8() != expected_kind) throw ParseError("wrong key kind");
    Params p;
    p.n = r.le32();
    p.v = r.le32();
    p.u = r.le32();
    if (!p.valid()) throw ParseError("invalid parameters in key file");
    return p;
}

inline void write_params_header(std::vector<std::uint8_t>& out, const Params& p,
                                std::uint8_t kind) {
    append_magic(out, "OLVR");
    out.push_back(kKeyVersion);
    out.push_back(kind);
    append_le32(out, std::uint32_t(p.n));
    append_le32(out, std::uint32_t(p.v));
    append_le32(out, std::uint32_t(p.u));
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_public_key(const PublicKey& pk) {
    std::vector<std::uint8_t> out;
    detail::write_params_header(out, pk.params, kKindPublic);
    out.insert(out.end(), pk.seed.begin(), pk.seed.end());
    detail::BitWriter w(out);
    for (const auto& p : pk.head.polys) {
        w.bits(pack_coeffs(p));
        w.flush();
    }
    return out;
}

inline PublicKey decode_public_key(std::span<const std::uint8_t> data) {
    detail::ByteReader r(data);
    PublicKey pk;
    pk.params = detail::read_params_header(r, kKindPublic);
    auto seed_bytes = r.take(32);
    std::copy(seed_bytes.begin(), seed_bytes.end(), pk.seed.begin());
    std::vector<QuadraticPoly> head;
    head.reserve(pk.params.n);
    const std::size_t nbits = full_coeff_bits(pk.params.n);
    for (std::size_t i = 0; i < pk.params.n; ++i)
        head.push_back(unpack_coeffs(r.bits(nbits), pk.params.n));
    if (!r.exhausted()) throw ParseError("trailing bytes in public key");
    pk.head = QuadraticSystem(std::move(head));
    pk.tail = expand_q(pk.seed, pk.params);
    return pk;
}

inline std::vector<std::uint8_t> encode_private_key(const PrivateKey& sk) {
    std::vector<std::uint8_t> out;
    detail::write_params_header(out, sk.params, kKindPrivate);
    out.insert(out.end(), sk.seed.begin(), sk.seed.end());
    detail::BitWriter w(out);
    w.bits(detail::flatten_rows(sk.s));
    w.flush();
    w.bits(detail::flatten_rows(sk.lambda));
    w.flush();
    const OvShape shape = sk.params.shape();
    for (const auto& p : sk.f.polys) {
        w.bits(pack_coeffs_ov(p, shape));
        w.flush();
    }
    return out;
}

inline PrivateKey decode_private_key(std::span<const std::uint8_t> data) {
    detail::ByteReader r(data);
    PrivateKey sk;
    sk.params = detail::read_params_header(r, kKindPrivate);
    auto seed_bytes = r.take(32);
    std::copy(seed_bytes.begin(), seed_bytes.end(), sk.seed.begin());
    const std::size_t n = sk.params.n, u = sk.params.u;
    sk.s = detail::unflatten_rows(r.bits(n * n), n, n);
    auto inv = inverse(sk.s);
    if (!inv) throw ParseError("private key: S is singular");
    sk.s_inv = std::move(*inv);
    sk.lambda = detail::unflatten_rows(r.bits(n * u), n, u);
    if (rank(sk.lambda) != n) throw ParseError("private key: lambda is rank deficient");
    const OvShape shape = sk.params.shape();
    std::vector<QuadraticPoly> central;
    central.reserve(n);
    const std::size_t nbits = ov_coeff_bits(shape);
    for (std::size_t i = 0; i < n; ++i)
        central.push_back(unpack_coeffs_ov(r.bits(nbits), shape));
    if (!r.exhausted()) throw ParseError("trailing bytes in private key");
    sk.f = QuadraticSystem(std::move(central));
    return sk;
}

/// Batch wire/file format: "OLVB" || LE32(t) || LE32(m) || t rows of
/// ceil(m/8) packed bytes, one ciphertext per row, LSB-first.
inline std::vector<std::uint8_t> encode_batch(const CipherBatch& batch) {
    std::vector<std::uint8_t> out;
    detail::append_magic(out, "OLVB");
    append_le32(out, std::uint32_t(batch.t));
    append_le32(out, std::uint32_t(batch.m));
    for (const auto& v : batch.vectors) {
        if (v.size() != batch.m) throw std::invalid_argument("encode_batch: ragged batch");
        auto bytes = v.to_bytes();
        out.insert(out.end(), bytes.begin(), bytes.end());
    }
    return out;
}

inline CipherBatch decode_batch(std::span<const std::uint8_t> data) {
    detail::ByteReader r(data);
    detail::expect_magic(r, "OLVB");
    CipherBatch batch;
    batch.t = r.le32();
    batch.m = r.le32();
    if (data.size() != 12 + batch.t * ((batch.m + 7) / 8)) throw ParseError("bad batch file size");
    for (std::size_t i = 0; i < batch.t; ++i) batch.vectors.push_back(r.bits(batch.m));
    return batch;
}

inline void save_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline std::vector<std::uint8_t> load_bytes(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    return data;
}

inline void save_public_key(const std::filesystem::path& p, const PublicKey& pk) {
    save_bytes(p, encode_public_key(pk));
}
inline PublicKey load_public_key(const std::filesystem::path& p) {
    return decode_public_key(load_bytes(p));
}
inline void save_private_key(const std::filesystem::path& p, const PrivateKey& sk) {
    save_bytes(p, encode_private_key(sk));
}
inline PrivateKey load_private_key(const std::filesystem::path& p) {
    return decode_private_key(load_bytes(p));
}
inline void save_batch(const std::filesystem::path& p, const CipherBatch& b) {
    save_bytes(p, encode_batch(b));
}
inline CipherBatch load_batch(const std::filesystem::path& p) {
    return decode_batch(load_bytes(p));
}

}  // namespace olivier
