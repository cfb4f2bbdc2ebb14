#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbq {

using Complex = std::complex<double>;

/// Row-major 2x2 / 4x4 complex matrices used for gate unitaries.
using Mat2 = std::array<Complex, 4>;
using Mat4 = std::array<Complex, 16>;

enum class GateKind : std::uint8_t {
    H, X, Y, Z, S, Sdg, T, Tdg, RX, RY, RZ, P, CX, CZ, CP,
};

constexpr bool is_two_qubit(GateKind k) {
    return k == GateKind::CX || k == GateKind::CZ || k == GateKind::CP;
}

constexpr bool is_parameterized(GateKind k) {
    switch (k) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::P:
    case GateKind::CP:
        return true;
    default:
        return false;
    }
}

constexpr const char* gate_name(GateKind k) {
    switch (k) {
    case GateKind::H:   return "h";
    case GateKind::X:   return "x";
    case GateKind::Y:   return "y";
    case GateKind::Z:   return "z";
    case GateKind::S:   return "s";
    case GateKind::Sdg: return "sdg";
    case GateKind::T:   return "t";
    case GateKind::Tdg: return "tdg";
    case GateKind::RX:  return "rx";
    case GateKind::RY:  return "ry";
    case GateKind::RZ:  return "rz";
    case GateKind::P:   return "p";
    case GateKind::CX:  return "cx";
    case GateKind::CZ:  return "cz";
    case GateKind::CP:  return "cp";
    }
    return "?";
}

/// One gate application. Qubit 0 is the least-significant index bit.
/// For two-qubit gates, q0 is the first operand and selects the
/// higher-order bit of the 2-bit sub-index (for CX, q0 is the control).
struct Gate {
    GateKind kind{};
    std::uint32_t q0 = 0;
    std::uint32_t q1 = 0;    // meaningful only for two-qubit kinds
    double angle = 0.0;      // radians; meaningful only for parameterized kinds

    bool operator==(const Gate&) const = default;
};

namespace gates {

inline Gate h(std::uint32_t q) { return {GateKind::H, q, 0, 0.0}; }
inline Gate x(std::uint32_t q) { return {GateKind::X, q, 0, 0.0}; }
inline Gate y(std::uint32_t q) { return {GateKind::Y, q, 0, 0.0}; }
inline Gate z(std::uint32_t q) { return {GateKind::Z, q, 0, 0.0}; }
inline Gate s(std::uint32_t q) { return {GateKind::S, q, 0, 0.0}; }
inline Gate sdg(std::uint32_t q) { return {GateKind::Sdg, q, 0, 0.0}; }
inline Gate t(std::uint32_t q) { return {GateKind::T, q, 0, 0.0}; }
inline Gate tdg(std::uint32_t q) { return {GateKind::Tdg, q, 0, 0.0}; }
inline Gate rx(std::uint32_t q, double a) { return {GateKind::RX, q, 0, a}; }
inline Gate ry(std::uint32_t q, double a) { return {GateKind::RY, q, 0, a}; }
inline Gate rz(std::uint32_t q, double a) { return {GateKind::RZ, q, 0, a}; }
inline Gate p(std::uint32_t q, double a) { return {GateKind::P, q, 0, a}; }
inline Gate cx(std::uint32_t c, std::uint32_t t) { return {GateKind::CX, c, t, 0.0}; }
inline Gate cz(std::uint32_t a, std::uint32_t b) { return {GateKind::CZ, a, b, 0.0}; }
inline Gate cp(std::uint32_t a, std::uint32_t b, double ang) { return {GateKind::CP, a, b, ang}; }

} // namespace gates

/// An ordered list of gates over num_qubits qubits. Index arithmetic over
/// the full amplitude space must fit a 64-bit unsigned integer, hence the
/// 62-qubit cap.
struct Circuit {
    std::uint32_t num_qubits = 1;
    std::vector<Gate> gates;

    Circuit() = default;

    explicit Circuit(std::uint32_t n) : num_qubits(n) {
        if (n < 1 || n > 62) {
            throw std::invalid_argument("qubit count must be in [1, 62], got " +
                                        std::to_string(n));
        }
    }

    void add(const Gate& g) {
        if (g.q0 >= num_qubits) {
            throw std::invalid_argument("gate operand " + std::to_string(g.q0) +
                                        " out of range for " + std::to_string(num_qubits) +
                                        " qubits");
        }
        if (is_two_qubit(g.kind)) {
            if (g.q1 >= num_qubits) {
                throw std::invalid_argument("gate operand " + std::to_string(g.q1) +
                                            " out of range for " + std::to_string(num_qubits) +
                                            " qubits");
            }
            if (g.q0 == g.q1) {
                throw std::invalid_argument("two-qubit gate operands must be distinct");
            }
        }
        gates.push_back(g);
    }

    bool operator==(const Circuit&) const = default;
};

/// 2x2 unitary of a single-qubit gate.
inline Mat2 unitary2(const Gate& g) {
    constexpr double pi = std::numbers::pi;
    const double a = g.angle;
    switch (g.kind) {
    case GateKind::H: {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        return {Complex(inv_sqrt2), Complex(inv_sqrt2), Complex(inv_sqrt2), Complex(-inv_sqrt2)};
    }
    case GateKind::X:
        return {Complex(0), Complex(1), Complex(1), Complex(0)};
    case GateKind::Y:
        return {Complex(0), Complex(0, -1), Complex(0, 1), Complex(0)};
    case GateKind::Z:
        return {Complex(1), Complex(0), Complex(0), Complex(-1)};
    case GateKind::S:
        return {Complex(1), Complex(0), Complex(0), Complex(0, 1)};
    case GateKind::Sdg:
        return {Complex(1), Complex(0), Complex(0), Complex(0, -1)};
    case GateKind::T:
        return {Complex(1), Complex(0), Complex(0), std::polar(1.0, pi / 4)};
    case GateKind::Tdg:
        return {Complex(1), Complex(0), Complex(0), std::polar(1.0, -pi / 4)};
    case GateKind::RX: {
        const double c = std::cos(a / 2), s = std::sin(a / 2);
        return {Complex(c), Complex(0, -s), Complex(0, -s), Complex(c)};
    }
    case GateKind::RY: {
        const double c = std::cos(a / 2), s = std::sin(a / 2);
        return {Complex(c), Complex(-s), Complex(s), Complex(c)};
    }
    case GateKind::RZ:
        return {std::polar(1.0, -a / 2), Complex(0), Complex(0), std::polar(1.0, a / 2)};
    case GateKind::P:
        return {Complex(1), Complex(0), Complex(0), std::polar(1.0, a)};
    default:
        throw std::logic_error("unitary2 called on a two-qubit gate");
    }
}

/// 4x4 unitary of a two-qubit gate. Basis order of the 2-bit sub-index is
/// (q0, q1) = 00, 01, 10, 11 with q0 the high bit.
inline Mat4 unitary4(const Gate& g) {
    Mat4 u{};
    switch (g.kind) {
    case GateKind::CX:
        u[0 * 4 + 0] = 1;
        u[1 * 4 + 1] = 1;
        u[2 * 4 + 3] = 1;    // |10> -> |11>
        u[3 * 4 + 2] = 1;    // |11> -> |10>
        return u;
    case GateKind::CZ:
        u[0 * 4 + 0] = 1;
        u[1 * 4 + 1] = 1;
        u[2 * 4 + 2] = 1;
        u[3 * 4 + 3] = -1;
        return u;
    case GateKind::CP:
        u[0 * 4 + 0] = 1;
        u[1 * 4 + 1] = 1;
        u[2 * 4 + 2] = 1;
        u[3 * 4 + 3] = std::polar(1.0, g.angle);
        return u;
    default:
        throw std::logic_error("unitary4 called on a single-qubit gate");
    }
}

} // namespace cbq
