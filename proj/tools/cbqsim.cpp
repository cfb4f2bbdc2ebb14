// cbqsim: compressed-block state-vector simulator CLI.
//
// Subcommands:
//   run        simulate and emit a JSON report
//   verify     run plus dense-reference fidelity (small circuits only)
//   partition  print the stage table for a circuit
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cbq/benchmarks.hpp"
#include "cbq/engine.hpp"
#include "cbq/qasm.hpp"
#include "cbq/report_json.hpp"

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string circuit_file;
    std::string bench;
    std::uint32_t qubits = 0;
    std::uint32_t layers = 1;
    std::string secret;
    std::uint64_t seed = 1;

    std::uint32_t block_bits = 0;
    std::uint32_t inner_size = 2;
    double error_bound = 1e-3;
    std::uint64_t mem_budget = cbq::kUnlimitedBudget;
    std::string spill_dir;
    unsigned workers = cbq::Config::default_workers();
    bool no_compress = false;
    std::string report_path;
};

void add_source_options(CLI::App& app, Options& o) {
    app.add_option("--circuit", o.circuit_file, "OPENQASM 2.0 circuit file");
    app.add_option("--bench", o.bench, "benchmark circuit family")
        ->check(CLI::IsMember({"ghz", "cat_state", "bv", "qft", "qaoa"}));
    app.add_option("--qubits", o.qubits, "qubit count for --bench");
    app.add_option("--layers", o.layers, "qaoa layer count p")->check(CLI::PositiveNumber);
    app.add_option("--secret", o.secret, "bv secret bitstring (default alternating 101...)");
    app.add_option("--seed", o.seed, "seed for generated circuit angles");
}

void add_sim_options(CLI::App& app, Options& o) {
    app.add_option("--block-bits", o.block_bits, "local index bits b (block holds 2^b amplitudes)")
        ->required();
    app.add_option("--inner-size", o.inner_size, "inner index budget per stage");
    app.add_option("--error-bound", o.error_bound, "point-wise relative error bound")
        ->check(CLI::PositiveNumber);
    app.add_option("--mem-budget", o.mem_budget, "resident payload budget in bytes");
    app.add_option("--spill-dir", o.spill_dir, "directory for the spill file");
    app.add_option("--workers", o.workers, "parallel group tasks")->check(CLI::PositiveNumber);
    app.add_flag("--no-compress", o.no_compress, "store raw amplitude bytes");
    app.add_option("--report", o.report_path, "write the JSON report here instead of stdout");
}

cbq::Circuit load_circuit(const Options& o) {
    const bool from_file = !o.circuit_file.empty();
    const bool from_bench = !o.bench.empty();
    if (from_file == from_bench) {
        throw UsageError("exactly one of --circuit and --bench is required");
    }
    if (from_file) {
        std::ifstream in(o.circuit_file);
        if (!in) {
            throw UsageError("cannot read circuit file '" + o.circuit_file + "'");
        }
        std::ostringstream text;
        text << in.rdbuf();
        std::vector<std::string> warnings;
        try {
            cbq::Circuit c = cbq::parse_qasm(text.str(), &warnings);
            for (const std::string& w : warnings) {
                std::cerr << "warning: " << o.circuit_file << ": " << w << "\n";
            }
            return c;
        } catch (const cbq::QasmError& e) {
            throw UsageError(o.circuit_file + ": " + e.what());
        }
    }
    if (o.qubits == 0) {
        throw UsageError("--bench requires --qubits");
    }
    cbq::BenchmarkParams params;
    params.layers = o.layers;
    params.seed = o.seed;
    if (!o.secret.empty()) {
        params.secret = o.secret;
    }
    try {
        return cbq::generate_benchmark(cbq::benchmark_from_name(o.bench), o.qubits, params);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

cbq::Config make_config(const Options& o, std::uint32_t n) {
    if (o.block_bits < 1 || o.block_bits > n) {
        throw UsageError("--block-bits must be in [1, " + std::to_string(n) + "]");
    }
    cbq::Config cfg;
    cfg.block_bits = o.block_bits;
    cfg.inner_size = o.inner_size;
    cfg.error_bound = o.error_bound;
    cfg.memory_budget = o.mem_budget;
    if (!o.spill_dir.empty()) {
        cfg.spill_dir = o.spill_dir;
    }
    cfg.workers = o.workers;
    cfg.compress = !o.no_compress;
    return cfg;
}

void write_output(const nlohmann::ordered_json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write report to '" + path + "'");
    }
    out << j.dump(2) << "\n";
}

int cmd_run(const Options& o, bool with_fidelity) {
    const cbq::Circuit circuit = load_circuit(o);
    const cbq::Config config = make_config(o, circuit.num_qubits);
    if (with_fidelity && circuit.num_qubits > config.verify_cap_qubits) {
        throw UsageError("verify supports at most " +
                         std::to_string(config.verify_cap_qubits) + " qubits");
    }

    cbq::Simulator sim(circuit, config);
    cbq::SimulationReport report = sim.run();
    if (with_fidelity) {
        const auto ideal = cbq::dense_reference(circuit, config.verify_cap_qubits);
        const auto simulated = sim.extract_state();
        report.fidelity = cbq::fidelity(ideal, simulated);
    }

    write_output(cbq::report_to_json(report), o.report_path);

    std::cerr << "qubits=" << report.qubits << " gates=" << report.gate_count
              << " stages=" << report.stage_count << " footprint=" << report.max_footprint_bytes
              << "B ratio=" << report.compression_ratio << " spilled=" << report.spilled_blocks
              << " norm=" << report.final_norm;
    if (report.fidelity) {
        std::cerr << " fidelity=" << *report.fidelity;
    }
    std::cerr << " wall_ms=" << report.wall_ms << "\n";
    return 0;
}

int cmd_partition(const Options& o) {
    const cbq::Circuit circuit = load_circuit(o);
    if (o.block_bits < 1 || o.block_bits > circuit.num_qubits) {
        throw UsageError("--block-bits must be in [1, " + std::to_string(circuit.num_qubits) +
                         "]");
    }
    const cbq::PartitionPlan plan =
        cbq::partition_circuit(circuit, o.block_bits, o.inner_size);

    write_output(cbq::plan_to_json(plan), o.report_path);

    std::cerr << "stage  gates        inner              groups\n";
    for (std::size_t s = 0; s < plan.stages.size(); ++s) {
        const cbq::Stage& st = plan.stages[s];
        std::string inner = "{";
        for (std::size_t i = 0; i < st.inner.size(); ++i) {
            inner += (i ? "," : "") + std::to_string(st.inner[i]);
        }
        inner += "}";
        std::cerr << s << "\t[" << st.gate_begin << "," << st.gate_end << ")\t" << inner << "\t"
                  << (1ull << (plan.layout.c - st.inner.size())) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compressed-block state-vector quantum circuit simulator"};
    app.require_subcommand(1);

    Options run_opts, verify_opts, part_opts;
    CLI::App* run_cmd = app.add_subcommand("run", "simulate and emit a JSON report");
    add_source_options(*run_cmd, run_opts);
    add_sim_options(*run_cmd, run_opts);

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run plus dense-reference fidelity check");
    add_source_options(*verify_cmd, verify_opts);
    add_sim_options(*verify_cmd, verify_opts);

    CLI::App* part_cmd = app.add_subcommand("partition", "print the stage table");
    add_source_options(*part_cmd, part_opts);
    part_cmd->add_option("--block-bits", part_opts.block_bits, "local index bits b")->required();
    part_cmd->add_option("--inner-size", part_opts.inner_size, "inner index budget per stage");
    part_cmd->add_option("--report", part_opts.report_path, "write the stage table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run_cmd->parsed()) {
            return cmd_run(run_opts, false);
        }
        if (verify_cmd->parsed()) {
            return cmd_run(verify_opts, true);
        }
        return cmd_partition(part_opts);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
