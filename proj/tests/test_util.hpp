#pragma once

#include <array>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "cbq/circuit.hpp"

namespace cbq::test {

// Independent gate-application oracle: builds the output state by routing
// each input basis amplitude through the unitary's columns, which is a
// different formulation from the in-place pair updates used by the kernel.
inline std::vector<Complex> naive_apply(const std::vector<Complex>& in, const Gate& g) {
    std::vector<Complex> out(in.size(), Complex(0.0));
    if (is_two_qubit(g.kind)) {
        const Mat4 u = unitary4(g);
        const std::uint64_t mh = 1ull << g.q0;
        const std::uint64_t ml = 1ull << g.q1;
        for (std::uint64_t i = 0; i < in.size(); ++i) {
            const unsigned col = ((i & mh) ? 2u : 0u) | ((i & ml) ? 1u : 0u);
            const std::uint64_t base = i & ~(mh | ml);
            for (unsigned row = 0; row < 4; ++row) {
                const std::uint64_t j =
                    base | ((row & 2u) ? mh : 0ull) | ((row & 1u) ? ml : 0ull);
                out[j] += u[row * 4 + col] * in[i];
            }
        }
    } else {
        const Mat2 u = unitary2(g);
        const std::uint64_t m = 1ull << g.q0;
        for (std::uint64_t i = 0; i < in.size(); ++i) {
            const unsigned col = (i & m) ? 1u : 0u;
            const std::uint64_t base = i & ~m;
            out[base] += u[0 * 2 + col] * in[i];
            out[base | m] += u[1 * 2 + col] * in[i];
        }
    }
    return out;
}

inline std::vector<Complex> naive_simulate(const Circuit& c) {
    std::vector<Complex> state(1ull << c.num_qubits, Complex(0.0));
    state[0] = Complex(1.0);
    for (const Gate& g : c.gates) {
        state = naive_apply(state, g);
    }
    return state;
}

inline double max_deviation(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double worst = a.size() == b.size() ? 0.0 : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

inline Gate random_gate(std::mt19937_64& rng, std::uint32_t n) {
    static constexpr std::array<GateKind, 15> kinds = {
        GateKind::H,  GateKind::X,   GateKind::Y,  GateKind::Z,  GateKind::S,
        GateKind::Sdg, GateKind::T,  GateKind::Tdg, GateKind::RX, GateKind::RY,
        GateKind::RZ, GateKind::P,   GateKind::CX, GateKind::CZ, GateKind::CP,
    };
    std::uniform_int_distribution<std::size_t> pick_kind(0, kinds.size() - 1);
    std::uniform_int_distribution<std::uint32_t> pick_qubit(0, n - 1);
    std::uniform_real_distribution<double> pick_angle(0.0, 6.283185307179586);

    const GateKind kind = kinds[pick_kind(rng)];
    const std::uint32_t q0 = pick_qubit(rng);
    std::uint32_t q1 = q0;
    if (is_two_qubit(kind)) {
        while (q1 == q0) {
            q1 = pick_qubit(rng);
        }
    }
    const double angle = is_parameterized(kind) ? pick_angle(rng) : 0.0;
    return Gate{kind, q0, is_two_qubit(kind) ? q1 : 0, angle};
}

inline Circuit random_circuit(std::mt19937_64& rng, std::uint32_t n, std::size_t gate_count) {
    Circuit c(n);
    for (std::size_t i = 0; i < gate_count; ++i) {
        c.add(random_gate(rng, n));
    }
    return c;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;    // stdout only
};

// Run the cbqsim binary (path from CBQSIM_BIN) with stderr dropped.
inline CommandResult run_cli(const std::string& args) {
    const char* bin = std::getenv("CBQSIM_BIN");
    if (!bin) {
        return {};
    }
    const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        return {};
    }
    CommandResult res;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
        res.output.append(buf, got);
    }
    const int status = ::pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

} // namespace cbq::test
