#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "cbq/circuit.hpp"
#include "cbq/partition.hpp"

namespace cbq {

/// One block of 2^b amplitudes, addressed by local index.
using SVBlock = std::vector<Complex>;

/// Concatenation of a group's blocks in SVGroup order: buffer position p
/// encodes (inner value = p >> b, local index = p mod 2^b).
struct GroupBuffer {
    SVGroup group;
    std::vector<Complex> amps;
};

/// Apply a single-qubit unitary to all index pairs differing only in `bit`.
inline void apply_unitary2(std::span<Complex> amps, std::uint32_t bit, const Mat2& u) {
    const std::uint64_t size = amps.size();
    const std::uint64_t mask = 1ull << bit;
    if (mask >= size) {
        throw std::invalid_argument("gate bit out of range for buffer");
    }
    for (std::uint64_t base = 0; base < size; base += mask << 1) {
        for (std::uint64_t i = base; i < base + mask; ++i) {
            const Complex a0 = amps[i];
            const Complex a1 = amps[i | mask];
            amps[i] = u[0] * a0 + u[1] * a1;
            amps[i | mask] = u[2] * a0 + u[3] * a1;
        }
    }
}

/// Apply a two-qubit unitary over all index quadruples varying in hi_bit and
/// lo_bit; hi_bit is the high bit of the 2-bit sub-index.
inline void apply_unitary4(std::span<Complex> amps, std::uint32_t hi_bit, std::uint32_t lo_bit,
                           const Mat4& u) {
    const std::uint64_t size = amps.size();
    const std::uint64_t mh = 1ull << hi_bit;
    const std::uint64_t ml = 1ull << lo_bit;
    if (mh >= size || ml >= size || hi_bit == lo_bit) {
        throw std::invalid_argument("gate bits invalid for buffer");
    }
    const std::uint64_t low0 = (1ull << std::min(hi_bit, lo_bit)) - 1;
    const std::uint64_t low1 = (1ull << std::max(hi_bit, lo_bit)) - 1;
    for (std::uint64_t k = 0; k < size >> 2; ++k) {
        std::uint64_t i = ((k & ~low0) << 1) | (k & low0);
        i = ((i & ~low1) << 1) | (i & low1);
        const Complex a0 = amps[i];
        const Complex a1 = amps[i | ml];
        const Complex a2 = amps[i | mh];
        const Complex a3 = amps[i | mh | ml];
        amps[i] = u[0] * a0 + u[1] * a1 + u[2] * a2 + u[3] * a3;
        amps[i | ml] = u[4] * a0 + u[5] * a1 + u[6] * a2 + u[7] * a3;
        amps[i | mh] = u[8] * a0 + u[9] * a1 + u[10] * a2 + u[11] * a3;
        amps[i | mh | ml] = u[12] * a0 + u[13] * a1 + u[14] * a2 + u[15] * a3;
    }
}

inline GroupBuffer assemble_group_buffer(SVGroup group, const std::vector<SVBlock>& blocks) {
    if (blocks.empty() || !std::has_single_bit(blocks.size())) {
        throw std::invalid_argument("group block count must be a nonzero power of two");
    }
    if (blocks.size() != group.block_ids.size()) {
        throw std::invalid_argument("block list does not match the group");
    }
    const std::size_t block_size = blocks.front().size();
    GroupBuffer buf;
    buf.amps.reserve(block_size * blocks.size());
    for (const SVBlock& blk : blocks) {
        if (blk.size() != block_size) {
            throw std::invalid_argument("group blocks must have equal length");
        }
        buf.amps.insert(buf.amps.end(), blk.begin(), blk.end());
    }
    buf.group = std::move(group);
    return buf;
}

/// Exact inverse of assemble_group_buffer.
inline std::vector<SVBlock> split_buffer(const GroupBuffer& buf, std::uint32_t block_bits) {
    const std::uint64_t block_size = 1ull << block_bits;
    if (buf.amps.size() % block_size != 0) {
        throw std::invalid_argument("buffer length not divisible by the block size");
    }
    std::vector<SVBlock> blocks;
    blocks.reserve(buf.amps.size() / block_size);
    for (std::size_t off = 0; off < buf.amps.size(); off += block_size) {
        blocks.emplace_back(buf.amps.begin() + off, buf.amps.begin() + off + block_size);
    }
    return blocks;
}

inline void apply_gate(GroupBuffer& buf, const Mat2& u, std::uint32_t bit) {
    apply_unitary2(buf.amps, bit, u);
}

inline void apply_gate(GroupBuffer& buf, const Mat4& u, std::uint32_t hi_bit,
                       std::uint32_t lo_bit) {
    apply_unitary4(buf.amps, hi_bit, lo_bit, u);
}

/// Apply every gate of the stage in program order, with operand qubits
/// remapped to group-buffer bits.
inline void apply_stage(GroupBuffer& buf, const Stage& stage, const Circuit& circuit,
                        const Layout& layout) {
    for (std::size_t i = stage.gate_begin; i < stage.gate_end; ++i) {
        const Gate& g = circuit.gates[i];
        if (is_two_qubit(g.kind)) {
            apply_unitary4(buf.amps, buffer_bit_of_qubit(stage, layout, g.q0),
                           buffer_bit_of_qubit(stage, layout, g.q1), unitary4(g));
        } else {
            apply_unitary2(buf.amps, buffer_bit_of_qubit(stage, layout, g.q0), unitary2(g));
        }
    }
}

} // namespace cbq
