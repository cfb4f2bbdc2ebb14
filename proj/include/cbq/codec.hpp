#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <vector>

#include "cbq/bitmap.hpp"

namespace cbq {

/// Point-wise relative bound b_r with its induced absolute bound on log2
/// magnitudes, log2_abs = log2(1 + b_r). Quantizing log2|v| to multiples of
/// log2_abs and rounding to nearest keeps the reconstruction within
/// sqrt(1 + b_r) - 1 < b_r of the original, relatively.
struct ErrorBound {
    double relative;
    double log2_abs;

    explicit ErrorBound(double b_r)
        : relative(b_r), log2_abs(std::log2(1.0 + b_r)) {
        if (!(b_r > 0.0) || std::isinf(b_r)) {
            throw std::invalid_argument("relative error bound must be positive and finite");
        }
    }
};

inline double relative_to_absolute_bound(double b_r) { return ErrorBound(b_r).log2_abs; }

// Payload layout, little-endian, byte-aligned segments in order:
//   header (26 bytes):
//     u64 scalar_count | f64 relative_bound | i64 code_min |
//     u8 code_width (bits per code) | u8 flags
//   sign bitmap  (prescan encoded: tag bytes then raw bytes)   { absent when
//   zero bitmap  (prescan encoded)                               ALL_ZERO }
//   codes        (ceil(nonzero_count * code_width / 8) bytes)
// Sign bit 1 = negative; zero bit 1 = stored scalar is exactly zero. Codes
// cover nonzero scalars in order; scalar = sign * 2^((code + code_min) *
// log2(1 + relative_bound)).
inline constexpr std::size_t kPayloadHeaderBytes = 26;
inline constexpr std::uint8_t kFlagAllZero = 0x1;

struct PayloadHeader {
    std::uint64_t scalar_count = 0;
    double relative_bound = 0.0;
    std::int64_t code_min = 0;
    std::uint8_t code_width = 0;
    std::uint8_t flags = 0;

    bool all_zero() const { return flags & kFlagAllZero; }
};

namespace detail {

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }

    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }

    void bytes(const std::uint8_t* data, std::size_t len) {
        out_.insert(out_.end(), data, data + len);
    }

private:
    std::vector<std::uint8_t>& out_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> data, const char* segment)
        : data_(data), segment_(segment) {}

    void segment(const char* name) { segment_ = name; }

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
        }
        return v;
    }

    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }

    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    std::span<const std::uint8_t> bytes(std::size_t len) {
        need(len);
        auto out = data_.subspan(pos_, len);
        pos_ += len;
        return out;
    }

    std::size_t remaining() const { return data_.size() - pos_; }

    void expect_consumed() const {
        if (pos_ != data_.size()) {
            throw CodecError(std::string(segment_) + ": trailing bytes after payload");
        }
    }

private:
    void need(std::size_t len) const {
        if (data_.size() - pos_ < len) {
            throw CodecError(std::string(segment_) + " truncated");
        }
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
    const char* segment_;
};

// LSB-first fixed-width integer packing.
class BitWriter {
public:
    void write(std::uint64_t value, std::uint32_t width) {
        for (std::uint32_t i = 0; i < width; ++i) {
            if (nbits_ % 8 == 0) {
                bytes_.push_back(0);
            }
            bytes_.back() |= static_cast<std::uint8_t>((value >> i) & 1ull) << (nbits_ % 8);
            ++nbits_;
        }
    }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t nbits_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint64_t read(std::uint32_t width) {
        std::uint64_t v = 0;
        for (std::uint32_t i = 0; i < width; ++i) {
            const std::size_t bit = pos_ + i;
            if (bit / 8 >= bytes_.size()) {
                throw CodecError("codes segment truncated");
            }
            v |= static_cast<std::uint64_t>((bytes_[bit / 8] >> (bit % 8)) & 1u) << i;
        }
        pos_ += width;
        return v;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

inline void write_prescan(ByteWriter& w, const PrescanBitmap& pb) {
    w.bytes(pb.tags.data(), pb.tags.size());
    w.bytes(pb.raw.data(), pb.raw.size());
}

inline PrescanBitmap read_prescan(ByteReader& r, std::uint64_t bit_count) {
    PrescanBitmap pb;
    pb.bit_count = bit_count;
    const auto tags = r.bytes(prescan_tag_bytes(bit_count));
    pb.tags.assign(tags.begin(), tags.end());
    std::size_t raw_bytes = 0;
    const std::size_t nchunks = prescan_chunk_count(bit_count);
    for (std::size_t chunk = 0; chunk < nchunks; ++chunk) {
        const std::size_t bits =
            std::min<std::size_t>(kPrescanChunkBits, bit_count - chunk * kPrescanChunkBits);
        if (prescan_tag_at(pb, chunk) == ChunkTag::Mixed) {
            raw_bytes += (bits + 7) / 8;
        } else if (bits < kPrescanChunkBits) {
            throw CodecError("bitmap final partial chunk must be stored raw");
        }
    }
    const auto raw = r.bytes(raw_bytes);
    pb.raw.assign(raw.begin(), raw.end());
    return pb;
}

} // namespace detail

inline PayloadHeader parse_header(std::span<const std::uint8_t> payload) {
    detail::ByteReader r(payload, "header");
    PayloadHeader h;
    h.scalar_count = r.u64();
    h.relative_bound = r.f64();
    h.code_min = r.i64();
    h.code_width = r.u8();
    h.flags = r.u8();
    return h;
}

/// Compress one block's scalars (the 2^b real parts then the 2^b imaginary
/// parts). Each scalar is bounded independently by the point-wise relative
/// bound; exact zeros and signs are preserved exactly via the bitmaps.
inline std::vector<std::uint8_t> compress_block(std::span<const double> scalars,
                                                const ErrorBound& bound) {
    const std::uint64_t n = scalars.size();
    Bitmap signs(n);
    Bitmap zeros(n);
    std::vector<std::int64_t> quants;
    quants.reserve(n);

    // |log2|v|| / log2_abs must stay in a 63-bit code; for normalized state
    // vectors and b_r >= 1e-12 this cannot trigger.
    const double quant_limit = 0x1.0p62;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double v = scalars[i];
        if (std::isnan(v) || std::isinf(v)) {
            throw CodecError("input scalars must be finite");
        }
        if (v < 0.0) {
            signs.set(i);
        }
        if (v == 0.0) {
            zeros.set(i);
        } else {
            const double q = std::log2(std::fabs(v)) / bound.log2_abs;
            if (std::fabs(q) > quant_limit) {
                throw CodecError("quantized magnitude exceeds the 63-bit code range");
            }
            quants.push_back(std::llround(q));
        }
    }

    PayloadHeader h;
    h.scalar_count = n;
    h.relative_bound = bound.relative;

    std::vector<std::uint8_t> payload;
    detail::ByteWriter w(payload);
    if (quants.empty()) {
        h.flags = kFlagAllZero;
        w.u64(h.scalar_count);
        w.f64(h.relative_bound);
        w.i64(h.code_min);
        w.u8(h.code_width);
        w.u8(h.flags);
        return payload;
    }

    std::int64_t qmin = quants.front(), qmax = quants.front();
    for (std::int64_t q : quants) {
        qmin = std::min(qmin, q);
        qmax = std::max(qmax, q);
    }
    h.code_min = qmin;
    const std::uint64_t range = static_cast<std::uint64_t>(qmax - qmin);
    h.code_width = static_cast<std::uint8_t>(std::max(1, static_cast<int>(std::bit_width(range))));

    w.u64(h.scalar_count);
    w.f64(h.relative_bound);
    w.i64(h.code_min);
    w.u8(h.code_width);
    w.u8(h.flags);
    detail::write_prescan(w, prescan_encode(signs));
    detail::write_prescan(w, prescan_encode(zeros));
    detail::BitWriter codes;
    for (std::int64_t q : quants) {
        codes.write(static_cast<std::uint64_t>(q - qmin), h.code_width);
    }
    w.bytes(codes.bytes().data(), codes.bytes().size());
    return payload;
}

/// Inverse of compress_block; total on well-formed payloads, throws
/// CodecError naming the corrupt segment otherwise.
inline std::vector<double> decompress_block(std::span<const std::uint8_t> payload) {
    detail::ByteReader r(payload, "header");
    PayloadHeader h;
    h.scalar_count = r.u64();
    h.relative_bound = r.f64();
    h.code_min = r.i64();
    h.code_width = r.u8();
    h.flags = r.u8();
    if (!(h.relative_bound > 0.0) || std::isnan(h.relative_bound) ||
        std::isinf(h.relative_bound)) {
        throw CodecError("header: invalid relative error bound");
    }

    if (h.all_zero()) {
        r.expect_consumed();
        return std::vector<double>(h.scalar_count, 0.0);
    }

    r.segment("sign bitmap");
    const Bitmap signs = prescan_decode(detail::read_prescan(r, h.scalar_count));
    r.segment("zero bitmap");
    const Bitmap zeros = prescan_decode(detail::read_prescan(r, h.scalar_count));
    r.segment("codes");
    const std::uint64_t nonzero = h.scalar_count - zeros.popcount();
    if (h.code_width == 0 && nonzero > 0) {
        throw CodecError("codes: width zero with nonzero scalars present");
    }
    const std::size_t code_bytes =
        static_cast<std::size_t>((nonzero * h.code_width + 7) / 8);
    detail::BitReader codes(r.bytes(code_bytes));
    r.expect_consumed();

    const double log2_abs = std::log2(1.0 + h.relative_bound);
    std::vector<double> out(h.scalar_count);
    for (std::uint64_t i = 0; i < h.scalar_count; ++i) {
        if (zeros.test(i)) {
            out[i] = 0.0;
            continue;
        }
        const std::int64_t q =
            static_cast<std::int64_t>(codes.read(h.code_width)) + h.code_min;
        const double mag = std::exp2(static_cast<double>(q) * log2_abs);
        out[i] = signs.test(i) ? -mag : mag;
    }
    return out;
}

} // namespace cbq
