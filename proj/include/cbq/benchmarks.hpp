#pragma once

#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "cbq/circuit.hpp"

namespace cbq {

enum class Benchmark { Ghz, CatState, Bv, Qft, Qaoa };

struct BenchmarkParams {
    std::uint32_t layers = 1;                  // qaoa layer count p
    std::optional<std::string> secret;         // bv secret; default alternating 101...
    std::uint64_t seed = 1;                    // qaoa angle seed
};

inline Benchmark benchmark_from_name(std::string_view name) {
    if (name == "ghz") return Benchmark::Ghz;
    if (name == "cat_state") return Benchmark::CatState;
    if (name == "bv") return Benchmark::Bv;
    if (name == "qft") return Benchmark::Qft;
    if (name == "qaoa") return Benchmark::Qaoa;
    throw std::invalid_argument("unknown benchmark '" + std::string(name) + "'");
}

inline const char* benchmark_name(Benchmark b) {
    switch (b) {
    case Benchmark::Ghz:      return "ghz";
    case Benchmark::CatState: return "cat_state";
    case Benchmark::Bv:       return "bv";
    case Benchmark::Qft:      return "qft";
    case Benchmark::Qaoa:     return "qaoa";
    }
    return "?";
}

namespace detail {

// Entangler chain shared by ghz and cat_state.
inline Circuit make_ghz(std::uint32_t n) {
    Circuit c(n);
    c.add(gates::h(0));
    for (std::uint32_t i = 0; i + 1 < n; ++i) {
        c.add(gates::cx(i, i + 1));
    }
    return c;
}

// Bernstein-Vazirani: data qubits 0..n-2, ancilla n-1 prepared in |-> so the
// oracle CXs kick the secret into the data-qubit phases. secret[i] is the
// bit for data qubit i.
inline Circuit make_bv(std::uint32_t n, const std::optional<std::string>& secret_opt) {
    std::string secret;
    if (secret_opt) {
        secret = *secret_opt;
        if (secret.empty()) {
            throw std::invalid_argument("bv secret must not be empty");
        }
    } else {
        for (std::uint32_t i = 0; i + 1 < n; ++i) {
            secret += (i % 2 == 0) ? '1' : '0';
        }
    }
    if (secret.size() > n - 1) {
        throw std::invalid_argument("bv secret longer than the " + std::to_string(n - 1) +
                                    " data qubits");
    }
    for (char ch : secret) {
        if (ch != '0' && ch != '1') {
            throw std::invalid_argument("bv secret must contain only '0' and '1'");
        }
    }

    Circuit c(n);
    const std::uint32_t ancilla = n - 1;
    c.add(gates::x(ancilla));
    for (std::uint32_t q = 0; q < n; ++q) {
        c.add(gates::h(q));
    }
    for (std::uint32_t i = 0; i < secret.size(); ++i) {
        if (secret[i] == '1') {
            c.add(gates::cx(i, ancilla));
        }
    }
    for (std::uint32_t q = 0; q < n; ++q) {
        c.add(gates::h(q));
    }
    return c;
}

// Standard QFT with final bit-reversal swaps (lowered to CX triples) so the
// dense action equals the DFT matrix over index order.
inline Circuit make_qft(std::uint32_t n) {
    constexpr double pi = std::numbers::pi;
    Circuit c(n);
    for (std::uint32_t i = n; i-- > 0;) {
        c.add(gates::h(i));
        for (std::uint32_t j = i; j-- > 0;) {
            const double angle = pi / static_cast<double>(1ull << (i - j));
            c.add(gates::cp(j, i, angle));
        }
    }
    for (std::uint32_t i = 0; i < n / 2; ++i) {
        const std::uint32_t j = n - 1 - i;
        c.add(gates::cx(i, j));
        c.add(gates::cx(j, i));
        c.add(gates::cx(i, j));
    }
    return c;
}

// QAOA over ring ZZ couplings with an RX mixer; angles drawn per layer from
// the seeded generator (bit-reproducible across platforms).
inline Circuit make_qaoa(std::uint32_t n, std::uint32_t layers, std::uint64_t seed) {
    if (layers < 1) {
        throw std::invalid_argument("qaoa requires at least one layer");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::mt19937_64 rng(seed);
    const auto draw_angle = [&rng] {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53 * two_pi;
    };

    Circuit c(n);
    for (std::uint32_t layer = 0; layer < layers; ++layer) {
        const double gamma = draw_angle();
        const double beta = draw_angle();
        for (std::uint32_t i = 0; i < n; ++i) {
            const std::uint32_t j = (i + 1) % n;
            c.add(gates::cx(i, j));
            c.add(gates::rz(j, gamma));
            c.add(gates::cx(i, j));
        }
        for (std::uint32_t q = 0; q < n; ++q) {
            c.add(gates::rx(q, beta));
        }
    }
    return c;
}

} // namespace detail

/// Deterministic benchmark circuit generators for the evaluation workloads.
inline Circuit generate_benchmark(Benchmark bench, std::uint32_t n,
                                  const BenchmarkParams& params = {}) {
    if (n < 2) {
        throw std::invalid_argument(std::string(benchmark_name(bench)) +
                                    " requires at least 2 qubits");
    }
    switch (bench) {
    case Benchmark::Ghz:
    case Benchmark::CatState:
        return detail::make_ghz(n);
    case Benchmark::Bv:
        return detail::make_bv(n, params.secret);
    case Benchmark::Qft:
        return detail::make_qft(n);
    case Benchmark::Qaoa:
        return detail::make_qaoa(n, params.layers, params.seed);
    }
    throw std::logic_error("unreachable");
}

} // namespace cbq
