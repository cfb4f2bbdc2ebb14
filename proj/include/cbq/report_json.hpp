#pragma once

#include <json.hpp>

#include "cbq/engine.hpp"
#include "cbq/partition.hpp"

namespace cbq {

inline nlohmann::ordered_json report_to_json(const SimulationReport& r) {
    nlohmann::ordered_json j;
    j["qubits"] = r.qubits;
    j["gate_count"] = r.gate_count;
    j["stage_count"] = r.stage_count;
    j["max_footprint_bytes"] = r.max_footprint_bytes;
    j["standard_bytes"] = r.standard_bytes;
    j["compression_ratio"] = r.compression_ratio;
    j["spilled_blocks"] = r.spilled_blocks;
    j["wall_ms"] = r.wall_ms;
    j["stage_ms"] = r.stage_ms;
    if (r.fidelity) {
        j["fidelity"] = *r.fidelity;
    }
    j["final_norm"] = r.final_norm;
    j["stage_compress_calls"] = r.stage_compress_calls;
    j["stage_decompress_calls"] = r.stage_decompress_calls;
    return j;
}

inline nlohmann::ordered_json plan_to_json(const PartitionPlan& plan) {
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < plan.stages.size(); ++s) {
        const Stage& st = plan.stages[s];
        nlohmann::ordered_json j;
        j["stage"] = s;
        j["gate_begin"] = st.gate_begin;
        j["gate_end"] = st.gate_end;
        j["inner_indices"] = st.inner;
        j["group_count"] = 1ull << (plan.layout.c - st.inner.size());
        stages.push_back(std::move(j));
    }
    return stages;
}

} // namespace cbq
