#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbq {

/// Malformed or truncated compressed payload; the message names the
/// failing segment.
class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense bit vector backed by 64-bit words (little-endian bit order within
/// each word). Bits past size() in the last word are kept zero.
class Bitmap {
public:
    Bitmap() = default;

    explicit Bitmap(std::size_t size, bool value = false)
        : words_((size + 63) / 64, value ? ~0ull : 0ull), size_(size) {
        clear_tail();
    }

    void push_back(bool v) {
        if (size_ % 64 == 0) {
            words_.push_back(0);
        }
        if (v) {
            words_[size_ / 64] |= 1ull << (size_ % 64);
        }
        ++size_;
    }

    void set(std::size_t i, bool v = true) {
        if (v) {
            words_[i / 64] |= 1ull << (i % 64);
        } else {
            words_[i / 64] &= ~(1ull << (i % 64));
        }
    }

    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1ull; }

    std::size_t size() const { return size_; }

    std::size_t popcount() const {
        std::size_t total = 0;
        for (std::uint64_t w : words_) {
            total += static_cast<std::size_t>(std::popcount(w));
        }
        return total;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

    bool operator==(const Bitmap&) const = default;

private:
    void clear_tail() {
        if (size_ % 64 != 0 && !words_.empty()) {
            words_.back() &= (1ull << (size_ % 64)) - 1;
        }
    }

    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

inline constexpr std::size_t kPrescanChunkBits = 4096;
inline constexpr std::size_t kPrescanChunkWords = kPrescanChunkBits / 64;
inline constexpr std::size_t kPrescanChunkBytes = kPrescanChunkBits / 8;

enum class ChunkTag : std::uint8_t { AllZero = 0, AllOne = 1, Mixed = 2 };

/// Chunked bitmap encoding: each full 4096-bit chunk is classified as all-0,
/// all-1, or mixed (2-bit tag); raw bits are kept for mixed chunks only. A
/// final partial chunk is always stored raw.
struct PrescanBitmap {
    std::uint64_t bit_count = 0;
    std::vector<std::uint8_t> tags;    // 2 bits per chunk, 4 chunks per byte
    std::vector<std::uint8_t> raw;     // byte-aligned payloads of mixed chunks, in order

    bool operator==(const PrescanBitmap&) const = default;
};

inline std::size_t prescan_chunk_count(std::uint64_t bit_count) {
    return static_cast<std::size_t>((bit_count + kPrescanChunkBits - 1) / kPrescanChunkBits);
}

inline std::size_t prescan_tag_bytes(std::uint64_t bit_count) {
    return (prescan_chunk_count(bit_count) + 3) / 4;
}

inline ChunkTag prescan_tag_at(const PrescanBitmap& pb, std::size_t chunk) {
    const std::uint8_t raw = (pb.tags[chunk / 4] >> (2 * (chunk % 4))) & 0x3;
    if (raw > 2) {
        throw CodecError("bitmap tag stream corrupt: invalid chunk tag");
    }
    return static_cast<ChunkTag>(raw);
}

inline PrescanBitmap prescan_encode(const Bitmap& bm) {
    PrescanBitmap out;
    out.bit_count = bm.size();
    const std::size_t nchunks = prescan_chunk_count(out.bit_count);
    out.tags.assign(prescan_tag_bytes(out.bit_count), 0);

    const auto set_tag = [&out](std::size_t chunk, ChunkTag tag) {
        out.tags[chunk / 4] |= static_cast<std::uint8_t>(tag) << (2 * (chunk % 4));
    };

    for (std::size_t chunk = 0; chunk < nchunks; ++chunk) {
        const std::size_t begin_bit = chunk * kPrescanChunkBits;
        const std::size_t bits = std::min(kPrescanChunkBits, bm.size() - begin_bit);
        const std::uint64_t* words = bm.words().data() + chunk * kPrescanChunkWords;
        if (bits == kPrescanChunkBits) {
            bool all0 = true, all1 = true;
            for (std::size_t w = 0; w < kPrescanChunkWords; ++w) {
                all0 &= words[w] == 0;
                all1 &= words[w] == ~0ull;
            }
            if (all0) {
                set_tag(chunk, ChunkTag::AllZero);
                continue;
            }
            if (all1) {
                set_tag(chunk, ChunkTag::AllOne);
                continue;
            }
        }
        set_tag(chunk, ChunkTag::Mixed);
        const std::size_t nbytes = (bits + 7) / 8;
        const std::size_t off = out.raw.size();
        out.raw.resize(off + nbytes);
        std::memcpy(out.raw.data() + off, words, nbytes);
    }
    return out;
}

inline Bitmap prescan_decode(const PrescanBitmap& pb) {
    const std::size_t nchunks = prescan_chunk_count(pb.bit_count);
    if (pb.tags.size() != prescan_tag_bytes(pb.bit_count)) {
        throw CodecError("bitmap tag stream length mismatch vs declared bit count");
    }
    Bitmap bm(pb.bit_count);
    std::size_t raw_off = 0;
    for (std::size_t chunk = 0; chunk < nchunks; ++chunk) {
        const std::size_t begin_bit = chunk * kPrescanChunkBits;
        const std::size_t bits = std::min(kPrescanChunkBits, pb.bit_count - begin_bit);
        std::uint64_t* words = bm.words().data() + chunk * kPrescanChunkWords;
        const ChunkTag tag = prescan_tag_at(pb, chunk);
        if (bits < kPrescanChunkBits && tag != ChunkTag::Mixed) {
            throw CodecError("bitmap final partial chunk must be stored raw");
        }
        switch (tag) {
        case ChunkTag::AllZero:
            break;
        case ChunkTag::AllOne:
            for (std::size_t w = 0; w < kPrescanChunkWords; ++w) {
                words[w] = ~0ull;
            }
            break;
        case ChunkTag::Mixed: {
            const std::size_t nbytes = (bits + 7) / 8;
            if (raw_off + nbytes > pb.raw.size()) {
                throw CodecError("bitmap raw data truncated");
            }
            std::memcpy(words, pb.raw.data() + raw_off, nbytes);
            raw_off += nbytes;
            // bits past the declared count must stay zero
            if (bits % 64 != 0) {
                words[bits / 64] &= (1ull << (bits % 64)) - 1;
            }
            break;
        }
        }
    }
    if (raw_off != pb.raw.size()) {
        throw CodecError("bitmap raw data length mismatch vs declared bit count");
    }
    return bm;
}

} // namespace cbq
