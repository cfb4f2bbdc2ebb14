#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cbq/circuit.hpp"

namespace cbq {

/// Split of the n-bit amplitude index space: the low b bits address a
/// position inside a block (local index), the high c = n - b bits are the
/// block id (global index).
struct Layout {
    std::uint32_t n = 1;    // total qubits
    std::uint32_t b = 1;    // local index bits; a block holds 2^b amplitudes
    std::uint32_t c = 0;    // global index bits, n - b

    std::uint64_t num_blocks() const { return 1ull << c; }
    std::uint64_t block_size() const { return 1ull << b; }
};

inline Layout make_layout(std::uint32_t n, std::uint32_t b) {
    if (n < 1 || n > 62) {
        throw std::invalid_argument("layout qubit count must be in [1, 62]");
    }
    if (b < 1 || b > n) {
        throw std::invalid_argument("local index bits must be in [1, n]");
    }
    return Layout{n, b, n - b};
}

/// A contiguous gate range [gate_begin, gate_end) whose global operands all
/// lie in the sorted inner set. Global positions not in inner are the
/// stage's outer indices.
struct Stage {
    std::size_t gate_begin = 0;
    std::size_t gate_end = 0;
    std::vector<std::uint32_t> inner;    // sorted ascending, each >= layout.b
};

struct PartitionPlan {
    Layout layout;
    std::uint32_t inner_size = 0;
    std::vector<Stage> stages;
};

/// The 2^|inner| blocks that agree on every outer bit. block_ids[v] is the
/// block whose inner bits, packed in ascending inner-position order, equal v.
struct SVGroup {
    std::uint64_t outer_value = 0;
    std::vector<std::uint64_t> block_ids;
};

/// Greedy circuit staging: scan gates in order, accumulating the set of
/// distinct global operands; when the next gate would push the set past
/// threshold = max(inner_size, 2), close the stage and start a new one with
/// that gate. Gates with only local operands never force a break.
inline PartitionPlan partition_circuit(const Circuit& circuit, std::uint32_t block_bits,
                                       std::uint32_t inner_size) {
    const Layout layout = make_layout(circuit.num_qubits, block_bits);
    PartitionPlan plan{layout, inner_size, {}};

    const std::uint32_t threshold = std::max(inner_size, 2u);
    std::vector<std::uint32_t> globals;    // sorted distinct global operands of the open stage
    std::size_t stage_begin = 0;

    const auto insert_global = [&](std::uint32_t q, std::vector<std::uint32_t>& set) {
        if (q < layout.b) {
            return;
        }
        const auto it = std::lower_bound(set.begin(), set.end(), q);
        if (it == set.end() || *it != q) {
            set.insert(it, q);
        }
    };

    for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
        const Gate& g = circuit.gates[i];
        std::vector<std::uint32_t> candidate = globals;
        insert_global(g.q0, candidate);
        if (is_two_qubit(g.kind)) {
            insert_global(g.q1, candidate);
        }
        if (candidate.size() > threshold && i > stage_begin) {
            plan.stages.push_back(Stage{stage_begin, i, std::move(globals)});
            stage_begin = i;
            globals.clear();
            insert_global(g.q0, globals);
            if (is_two_qubit(g.kind)) {
                insert_global(g.q1, globals);
            }
        } else {
            globals = std::move(candidate);
        }
    }
    if (stage_begin < circuit.gates.size()) {
        plan.stages.push_back(Stage{stage_begin, circuit.gates.size(), std::move(globals)});
    }
    return plan;
}

namespace detail {

// Scatter the low bits of `packed` into the global-index bit offsets listed
// in `offsets` (each offset is position - b).
inline std::uint64_t scatter_bits(std::uint64_t packed, const std::vector<std::uint32_t>& offsets) {
    std::uint64_t out = 0;
    for (std::size_t j = 0; j < offsets.size(); ++j) {
        out |= ((packed >> j) & 1ull) << offsets[j];
    }
    return out;
}

} // namespace detail

/// Enumerate the stage's SV groups: one group per outer-bit pattern, each
/// listing the 2^|inner| block ids ordered by ascending inner value. Groups
/// partition [0, 2^c).
inline std::vector<SVGroup> enumerate_groups(const Stage& stage, const Layout& layout) {
    std::vector<std::uint32_t> inner_offsets;
    inner_offsets.reserve(stage.inner.size());
    for (std::uint32_t q : stage.inner) {
        if (q < layout.b || q >= layout.n) {
            throw std::invalid_argument("stage inner index " + std::to_string(q) +
                                        " outside the global index range");
        }
        inner_offsets.push_back(q - layout.b);
    }
    std::vector<std::uint32_t> outer_offsets;
    outer_offsets.reserve(layout.c - inner_offsets.size());
    for (std::uint32_t off = 0; off < layout.c; ++off) {
        if (!std::binary_search(inner_offsets.begin(), inner_offsets.end(), off)) {
            outer_offsets.push_back(off);
        }
    }

    const std::uint64_t group_count = 1ull << outer_offsets.size();
    const std::uint64_t blocks_per_group = 1ull << inner_offsets.size();
    std::vector<SVGroup> groups;
    groups.reserve(group_count);
    for (std::uint64_t outer = 0; outer < group_count; ++outer) {
        SVGroup grp;
        grp.outer_value = outer;
        grp.block_ids.reserve(blocks_per_group);
        const std::uint64_t base = detail::scatter_bits(outer, outer_offsets);
        for (std::uint64_t v = 0; v < blocks_per_group; ++v) {
            grp.block_ids.push_back(base | detail::scatter_bits(v, inner_offsets));
        }
        groups.push_back(std::move(grp));
    }
    return groups;
}

/// Map a qubit position to its bit position inside a group buffer assembled
/// from the stage's blocks: local qubits keep their bit, inner qubit of rank
/// j maps to bit b + j. Outer qubits are a contract violation.
inline std::uint32_t buffer_bit_of_qubit(const Stage& stage, const Layout& layout,
                                         std::uint32_t q) {
    if (q < layout.b) {
        return q;
    }
    const auto it = std::lower_bound(stage.inner.begin(), stage.inner.end(), q);
    if (it == stage.inner.end() || *it != q) {
        throw std::logic_error("qubit " + std::to_string(q) +
                               " is an outer index for this stage");
    }
    return layout.b + static_cast<std::uint32_t>(it - stage.inner.begin());
}

} // namespace cbq
