#pragma once

#include <atomic>
#include <chrono>
#include <cstring>
#include <optional>
#include <thread>

#include "cbq/circuit.hpp"
#include "cbq/codec.hpp"
#include "cbq/kernel.hpp"
#include "cbq/parallel.hpp"
#include "cbq/partition.hpp"
#include "cbq/store.hpp"

namespace cbq {

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    std::uint32_t block_bits = 1;
    std::uint32_t inner_size = 2;
    double error_bound = 1e-3;    // point-wise relative bound b_r
    std::uint64_t memory_budget = kUnlimitedBudget;
    std::filesystem::path spill_dir = std::filesystem::temp_directory_path();
    unsigned workers = default_workers();
    bool compress = true;
    std::uint32_t verify_cap_qubits = 24;    // dense vectors allowed up to 16 * 2^cap bytes

    static unsigned default_workers() {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1;
    }
};

struct SimulationReport {
    std::uint64_t qubits = 0;
    std::uint64_t gate_count = 0;
    std::uint64_t stage_count = 0;
    std::uint64_t max_footprint_bytes = 0;
    double standard_bytes = 0.0;    // 2^(n+4), the dense double-precision footprint
    double compression_ratio = 0.0;
    std::uint64_t spilled_blocks = 0;
    double wall_ms = 0.0;
    std::vector<double> stage_ms;
    std::optional<double> fidelity;
    double final_norm = 0.0;
    std::uint64_t stage_compress_calls = 0;
    std::uint64_t stage_decompress_calls = 0;
};

/// Staged out-of-core simulation: partitions the circuit, keeps the state as
/// compressed blocks in a budgeted store, and runs every stage as a set of
/// independent group tasks on a worker pool with a barrier between stages.
class Simulator {
public:
    Simulator(Circuit circuit, Config config)
        : circuit_(std::move(circuit)),
          config_(std::move(config)),
          layout_(make_layout(circuit_.num_qubits, config_.block_bits)),
          plan_(partition_circuit(circuit_, config_.block_bits, config_.inner_size)),
          bound_(config_.error_bound),
          store_(config_.memory_budget, config_.spill_dir) {
        if (config_.workers < 1) {
            throw std::invalid_argument("worker count must be at least 1");
        }
    }

    /// Compress the e0 block and a single all-zero block, then map every
    /// remaining id onto the shared zero payload.
    void init_state() {
        if (initialized_) {
            throw EngineError("state already initialized");
        }
        SVBlock first(layout_.block_size(), Complex(0.0));
        first[0] = Complex(1.0);
        store_.put(0, pack_block(first));
        ++total_compress_calls_;

        if (layout_.c > 0) {
            SVBlock zero_block(layout_.block_size(), Complex(0.0));
            auto zero_payload = pack_block(zero_block);
            ++total_compress_calls_;
            std::vector<std::uint64_t> ids;
            ids.reserve(layout_.num_blocks() - 1);
            for (std::uint64_t id = 1; id < layout_.num_blocks(); ++id) {
                ids.push_back(id);
            }
            store_.put_shared(ids, std::move(zero_payload));
        }
        initialized_ = true;
    }

    SimulationReport run() {
        const auto wall_start = std::chrono::steady_clock::now();
        if (!initialized_) {
            init_state();
        }

        SimulationReport report;
        report.qubits = layout_.n;
        report.gate_count = circuit_.gates.size();
        report.stage_count = plan_.stages.size();
        report.stage_ms.reserve(plan_.stages.size());

        for (std::size_t s = 0; s < plan_.stages.size(); ++s) {
            const auto stage_start = std::chrono::steady_clock::now();
            const Stage& stage = plan_.stages[s];
            const std::vector<SVGroup> groups = enumerate_groups(stage, layout_);
            try {
                parallel_for(config_.workers, groups.size(),
                             [&](std::size_t gi) { process_group(stage, groups[gi]); });
            } catch (const std::exception& e) {
                throw EngineError("stage " + std::to_string(s) + ": " + e.what());
            }
            report.stage_ms.push_back(elapsed_ms(stage_start));
        }

        report.max_footprint_bytes = store_.footprint().peak_bytes;
        report.standard_bytes = std::exp2(static_cast<double>(layout_.n + 4));
        report.compression_ratio =
            report.max_footprint_bytes > 0
                ? report.standard_bytes / static_cast<double>(report.max_footprint_bytes)
                : 0.0;
        report.spilled_blocks = store_.spilled_block_count();
        report.stage_compress_calls = stage_compress_calls_.load();
        report.stage_decompress_calls = stage_decompress_calls_.load();
        report.final_norm = state_norm();
        report.wall_ms = elapsed_ms(wall_start);
        return report;
    }

    /// Dense final state, blocks concatenated in id order. Verification-only:
    /// refuses above the configured qubit cap.
    std::vector<Complex> extract_state() const {
        check_verify_cap(layout_.n, config_.verify_cap_qubits);
        std::vector<Complex> state;
        state.reserve(1ull << layout_.n);
        for (std::uint64_t id = 0; id < layout_.num_blocks(); ++id) {
            const SVBlock block = unpack_block(store_.get(id));
            state.insert(state.end(), block.begin(), block.end());
        }
        return state;
    }

    /// 2-norm of the stored state, streamed block by block (no dense vector).
    double state_norm() const {
        double sum = 0.0;
        for (std::uint64_t id = 0; id < layout_.num_blocks(); ++id) {
            for (const Complex& a : unpack_block(store_.get(id))) {
                sum += std::norm(a);
            }
        }
        return std::sqrt(sum);
    }

    const Layout& layout() const { return layout_; }
    const PartitionPlan& plan() const { return plan_; }
    const BlockStore& store() const { return store_; }
    std::uint64_t total_compress_calls() const { return total_compress_calls_.load(); }

private:
    // Per-block scalar layout: 2^b real parts then 2^b imaginary parts. The
    // uncompressed path stores the same scalars as raw little-endian doubles.
    std::vector<std::uint8_t> pack_block(const SVBlock& block) const {
        std::vector<double> scalars(2 * block.size());
        for (std::size_t i = 0; i < block.size(); ++i) {
            scalars[i] = block[i].real();
            scalars[block.size() + i] = block[i].imag();
        }
        if (config_.compress) {
            return compress_block(scalars, bound_);
        }
        std::vector<std::uint8_t> raw(scalars.size() * sizeof(double));
        std::memcpy(raw.data(), scalars.data(), raw.size());
        return raw;
    }

    SVBlock unpack_block(const std::vector<std::uint8_t>& payload) const {
        std::vector<double> scalars;
        if (config_.compress) {
            scalars = decompress_block(payload);
        } else {
            if (payload.size() % (2 * sizeof(double)) != 0) {
                throw EngineError("raw block payload has invalid length");
            }
            scalars.resize(payload.size() / sizeof(double));
            std::memcpy(scalars.data(), payload.data(), payload.size());
        }
        if (scalars.size() != 2 * layout_.block_size()) {
            throw EngineError("block payload scalar count does not match the layout");
        }
        SVBlock block(layout_.block_size());
        for (std::size_t i = 0; i < block.size(); ++i) {
            block[i] = Complex(scalars[i], scalars[block.size() + i]);
        }
        return block;
    }

    void process_group(const Stage& stage, const SVGroup& group) {
        try {
            std::vector<SVBlock> blocks;
            blocks.reserve(group.block_ids.size());
            for (std::uint64_t id : group.block_ids) {
                blocks.push_back(unpack_block(store_.get(id)));
            }
            stage_decompress_calls_.fetch_add(blocks.size(), std::memory_order_relaxed);

            GroupBuffer buf = assemble_group_buffer(group, blocks);
            apply_stage(buf, stage, circuit_, layout_);
            const std::vector<SVBlock> out = split_buffer(buf, layout_.b);

            for (std::size_t j = 0; j < out.size(); ++j) {
                store_.put(group.block_ids[j], pack_block(out[j]));
            }
            stage_compress_calls_.fetch_add(out.size(), std::memory_order_relaxed);
            total_compress_calls_.fetch_add(out.size(), std::memory_order_relaxed);
        } catch (const std::exception& e) {
            throw EngineError("group with outer value " + std::to_string(group.outer_value) +
                              ": " + e.what());
        }
    }

    static void check_verify_cap(std::uint32_t n, std::uint32_t cap) {
        if (n > cap) {
            throw EngineError("dense verification refused: " + std::to_string(n) +
                              " qubits exceeds the cap of " + std::to_string(cap));
        }
    }

    static double elapsed_ms(std::chrono::steady_clock::time_point start) {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start)
            .count();
    }

    Circuit circuit_;
    Config config_;
    Layout layout_;
    PartitionPlan plan_;
    ErrorBound bound_;
    BlockStore store_;
    bool initialized_ = false;
    std::atomic<std::uint64_t> total_compress_calls_{0};
    std::atomic<std::uint64_t> stage_compress_calls_{0};
    std::atomic<std::uint64_t> stage_decompress_calls_{0};
};

/// Naive full-vector simulation from e0, used as the ideal-state oracle. The
/// gate loop here is deliberately independent of the block kernel.
inline std::vector<Complex> dense_reference(const Circuit& circuit,
                                            std::uint32_t verify_cap_qubits = 24) {
    const std::uint32_t n = circuit.num_qubits;
    if (n > verify_cap_qubits) {
        throw EngineError("dense reference refused: " + std::to_string(n) +
                          " qubits exceeds the cap of " + std::to_string(verify_cap_qubits));
    }
    std::vector<Complex> state(1ull << n, Complex(0.0));
    state[0] = Complex(1.0);
    for (const Gate& g : circuit.gates) {
        if (is_two_qubit(g.kind)) {
            const Mat4 u = unitary4(g);
            const std::uint64_t mh = 1ull << g.q0;
            const std::uint64_t ml = 1ull << g.q1;
            for (std::uint64_t i = 0; i < state.size(); ++i) {
                if ((i & mh) || (i & ml)) {
                    continue;
                }
                const Complex a0 = state[i];
                const Complex a1 = state[i | ml];
                const Complex a2 = state[i | mh];
                const Complex a3 = state[i | mh | ml];
                state[i] = u[0] * a0 + u[1] * a1 + u[2] * a2 + u[3] * a3;
                state[i | ml] = u[4] * a0 + u[5] * a1 + u[6] * a2 + u[7] * a3;
                state[i | mh] = u[8] * a0 + u[9] * a1 + u[10] * a2 + u[11] * a3;
                state[i | mh | ml] = u[12] * a0 + u[13] * a1 + u[14] * a2 + u[15] * a3;
            }
        } else {
            const Mat2 u = unitary2(g);
            const std::uint64_t m = 1ull << g.q0;
            for (std::uint64_t i = 0; i < state.size(); ++i) {
                if (i & m) {
                    continue;
                }
                const Complex a0 = state[i];
                const Complex a1 = state[i | m];
                state[i] = u[0] * a0 + u[1] * a1;
                state[i | m] = u[2] * a0 + u[3] * a1;
            }
        }
    }
    return state;
}

/// |<a|b>|, conjugate-linear in the first argument.
inline double fidelity(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("fidelity requires equal-length states");
    }
    Complex inner(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        inner += std::conj(a[i]) * b[i];
    }
    return std::abs(inner);
}

} // namespace cbq
