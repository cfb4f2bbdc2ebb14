#pragma once

#include <cctype>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cbq/circuit.hpp"

namespace cbq {

/// Parse failure with source position (1-based line and column).
class QasmError : public std::runtime_error {
public:
    QasmError(int line, int col, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ", col " +
                             std::to_string(col) + ": " + msg),
          line_(line),
          col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

namespace detail {

struct Token {
    enum Type { Ident, Number, String, Symbol, Arrow, End } type = End;
    std::string text;
    double value = 0.0;
    int line = 1;
    int col = 1;
};

class QasmLexer {
public:
    explicit QasmLexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws_and_comments();
        Token tok;
        tok.line = line_;
        tok.col = col_;
        if (pos_ >= src_.size()) {
            tok.type = Token::End;
            return tok;
        }
        const char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            tok.type = Token::Ident;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                tok.text += advance();
            }
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            tok.type = Token::Number;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.' ||
                    src_[pos_] == 'e' || src_[pos_] == 'E' ||
                    ((src_[pos_] == '+' || src_[pos_] == '-') && !tok.text.empty() &&
                     (tok.text.back() == 'e' || tok.text.back() == 'E')))) {
                tok.text += advance();
            }
            try {
                tok.value = std::stod(tok.text);
            } catch (const std::exception&) {
                throw QasmError(tok.line, tok.col, "malformed number '" + tok.text + "'");
            }
            return tok;
        }
        if (c == '"') {
            tok.type = Token::String;
            advance();
            while (pos_ < src_.size() && src_[pos_] != '"') {
                tok.text += advance();
            }
            if (pos_ >= src_.size()) {
                throw QasmError(tok.line, tok.col, "unterminated string literal");
            }
            advance();
            return tok;
        }
        if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
            tok.type = Token::Arrow;
            tok.text = "->";
            advance();
            advance();
            return tok;
        }
        if (std::string_view("()[]{},;+-*/").find(c) != std::string_view::npos) {
            tok.type = Token::Symbol;
            tok.text = advance();
            return tok;
        }
        throw QasmError(line_, col_, std::string("unexpected character '") + c + "'");
    }

private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws_and_comments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    advance();
                }
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class QasmParser {
public:
    QasmParser(std::string_view src, std::vector<std::string>* warnings)
        : lexer_(src), warnings_(warnings) {
        cur_ = lexer_.next();
    }

    Circuit parse() {
        if (cur_.type == Token::Ident && cur_.text == "OPENQASM") {
            consume();
            expect(Token::Number, "version number");
            expect_symbol(";");
        }
        while (cur_.type != Token::End) {
            statement();
        }
        if (!circuit_) {
            throw QasmError(1, 1, "no qreg declaration found");
        }
        return std::move(*circuit_);
    }

private:
    void statement() {
        if (cur_.type != Token::Ident) {
            throw QasmError(cur_.line, cur_.col, "expected a statement, got '" + cur_.text + "'");
        }
        const Token head = cur_;
        consume();
        if (head.text == "include") {
            expect(Token::String, "include file name");
            expect_symbol(";");
        } else if (head.text == "qreg") {
            declare_qreg(head);
        } else if (head.text == "creg") {
            expect(Token::Ident, "register name");
            expect_symbol("[");
            expect(Token::Number, "register size");
            expect_symbol("]");
            expect_symbol(";");
        } else if (head.text == "barrier") {
            while (cur_.type != Token::End && !(cur_.type == Token::Symbol && cur_.text == ";")) {
                consume();
            }
            expect_symbol(";");
        } else if (head.text == "measure") {
            while (cur_.type != Token::End && !(cur_.type == Token::Symbol && cur_.text == ";")) {
                consume();
            }
            expect_symbol(";");
            warn("measure ignored (simulator produces the final state vector)");
        } else {
            gate_statement(head);
        }
    }

    void declare_qreg(const Token& head) {
        if (circuit_) {
            throw QasmError(head.line, head.col, "multiple qreg declarations are not supported");
        }
        const Token name = expect(Token::Ident, "register name");
        expect_symbol("[");
        const Token size = expect(Token::Number, "register size");
        expect_symbol("]");
        expect_symbol(";");
        const double n = size.value;
        if (n < 1 || n > 62 || n != static_cast<double>(static_cast<std::uint32_t>(n))) {
            throw QasmError(size.line, size.col, "qreg size must be an integer in [1, 62]");
        }
        qreg_name_ = name.text;
        circuit_.emplace(static_cast<std::uint32_t>(n));
    }

    void gate_statement(const Token& head) {
        static const std::unordered_map<std::string, GateKind> kinds = {
            {"h", GateKind::H},     {"x", GateKind::X},     {"y", GateKind::Y},
            {"z", GateKind::Z},     {"s", GateKind::S},     {"sdg", GateKind::Sdg},
            {"t", GateKind::T},     {"tdg", GateKind::Tdg}, {"rx", GateKind::RX},
            {"ry", GateKind::RY},   {"rz", GateKind::RZ},   {"p", GateKind::P},
            {"u1", GateKind::P},    {"cx", GateKind::CX},   {"CX", GateKind::CX},
            {"cz", GateKind::CZ},   {"cp", GateKind::CP},   {"cu1", GateKind::CP},
        };
        if (!circuit_) {
            throw QasmError(head.line, head.col, "gate application before qreg declaration");
        }

        const bool is_swap = (head.text == "swap");
        GateKind kind{};
        if (!is_swap) {
            const auto it = kinds.find(head.text);
            if (it == kinds.end()) {
                throw QasmError(head.line, head.col, "unsupported gate \"" + head.text + "\"");
            }
            kind = it->second;
        }

        double angle = 0.0;
        if (cur_.type == Token::Symbol && cur_.text == "(") {
            if (is_swap || !is_parameterized(kind)) {
                throw QasmError(cur_.line, cur_.col,
                                "gate '" + head.text + "' takes no parameters");
            }
            consume();
            angle = expression();
            expect_symbol(")");
        } else if (!is_swap && is_parameterized(kind)) {
            throw QasmError(cur_.line, cur_.col, "gate '" + head.text + "' requires a parameter");
        }

        std::vector<std::uint32_t> operands;
        operands.push_back(qubit_operand());
        while (cur_.type == Token::Symbol && cur_.text == ",") {
            consume();
            operands.push_back(qubit_operand());
        }
        expect_symbol(";");

        const std::size_t want = (is_swap || is_two_qubit(kind)) ? 2 : 1;
        if (operands.size() != want) {
            throw QasmError(head.line, head.col,
                            "gate '" + head.text + "' expects " + std::to_string(want) +
                                " operand(s), got " + std::to_string(operands.size()));
        }
        if (want == 2 && operands[0] == operands[1]) {
            throw QasmError(head.line, head.col, "gate operands must be distinct");
        }

        if (is_swap) {
            circuit_->add(gates::cx(operands[0], operands[1]));
            circuit_->add(gates::cx(operands[1], operands[0]));
            circuit_->add(gates::cx(operands[0], operands[1]));
        } else if (want == 2) {
            circuit_->add(Gate{kind, operands[0], operands[1], angle});
        } else {
            circuit_->add(Gate{kind, operands[0], 0, angle});
        }
    }

    std::uint32_t qubit_operand() {
        const Token name = expect(Token::Ident, "qubit reference");
        if (name.text != qreg_name_) {
            throw QasmError(name.line, name.col, "unknown register '" + name.text + "'");
        }
        expect_symbol("[");
        const Token idx = expect(Token::Number, "qubit index");
        expect_symbol("]");
        const double v = idx.value;
        if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v)) ||
            v >= circuit_->num_qubits) {
            throw QasmError(idx.line, idx.col,
                            "qubit index out of range for " + qreg_name_ + "[" +
                                std::to_string(circuit_->num_qubits) + "]");
        }
        return static_cast<std::uint32_t>(v);
    }

    // expr := term (('+'|'-') term)*
    double expression() {
        double v = term();
        while (cur_.type == Token::Symbol && (cur_.text == "+" || cur_.text == "-")) {
            const bool plus = cur_.text == "+";
            consume();
            const double rhs = term();
            v = plus ? v + rhs : v - rhs;
        }
        return v;
    }

    // term := factor (('*'|'/') factor)*
    double term() {
        double v = factor();
        while (cur_.type == Token::Symbol && (cur_.text == "*" || cur_.text == "/")) {
            const bool mul = cur_.text == "*";
            consume();
            const double rhs = factor();
            if (!mul && rhs == 0.0) {
                throw QasmError(cur_.line, cur_.col, "division by zero in gate parameter");
            }
            v = mul ? v * rhs : v / rhs;
        }
        return v;
    }

    // factor := ('-'|'+')? (number | 'pi' | '(' expr ')')
    double factor() {
        if (cur_.type == Token::Symbol && (cur_.text == "-" || cur_.text == "+")) {
            const bool neg = cur_.text == "-";
            consume();
            const double v = factor();
            return neg ? -v : v;
        }
        if (cur_.type == Token::Number) {
            const double v = cur_.value;
            consume();
            return v;
        }
        if (cur_.type == Token::Ident && cur_.text == "pi") {
            consume();
            return std::numbers::pi;
        }
        if (cur_.type == Token::Symbol && cur_.text == "(") {
            consume();
            const double v = expression();
            expect_symbol(")");
            return v;
        }
        throw QasmError(cur_.line, cur_.col, "expected a parameter expression");
    }

    Token expect(Token::Type type, const std::string& what) {
        if (cur_.type != type) {
            throw QasmError(cur_.line, cur_.col, "expected " + what + ", got '" + cur_.text + "'");
        }
        Token tok = cur_;
        consume();
        return tok;
    }

    void expect_symbol(const std::string& sym) {
        if (cur_.type != Token::Symbol || cur_.text != sym) {
            throw QasmError(cur_.line, cur_.col,
                            "expected '" + sym + "', got '" + cur_.text + "'");
        }
        consume();
    }

    void consume() { cur_ = lexer_.next(); }

    void warn(const std::string& msg) {
        if (warnings_) {
            warnings_->push_back(msg);
        }
    }

    QasmLexer lexer_;
    Token cur_;
    std::vector<std::string>* warnings_;
    std::optional<Circuit> circuit_;
    std::string qreg_name_;
};

} // namespace detail

/// Parse an OPENQASM 2.0 subset: one qreg, the supported gate set plus swap
/// (lowered to 3 CX) and u1/cu1 aliases, barrier ignored, measure ignored
/// with a warning appended to *warnings.
inline Circuit parse_qasm(std::string_view text, std::vector<std::string>* warnings = nullptr) {
    return detail::QasmParser(text, warnings).parse();
}

/// Emit the supported subset; parse_qasm(emit_qasm(c)) reproduces c exactly.
inline std::string emit_qasm(const Circuit& circuit) {
    std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[" +
                      std::to_string(circuit.num_qubits) + "];\n";
    char buf[64];
    for (const Gate& g : circuit.gates) {
        out += gate_name(g.kind);
        if (is_parameterized(g.kind)) {
            std::snprintf(buf, sizeof(buf), "%.17g", g.angle);
            out += "(";
            out += buf;
            out += ")";
        }
        out += " q[" + std::to_string(g.q0) + "]";
        if (is_two_qubit(g.kind)) {
            out += ",q[" + std::to_string(g.q1) + "]";
        }
        out += ";\n";
    }
    return out;
}

} // namespace cbq
