// Copyright 2026 The usynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "usynth/qasm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "usynth/io.hpp"

namespace usynth {

namespace {

std::string angle(double v) {
    return format_double(v);
}

void emit_u3(std::ostringstream& os, double t, double p, double l, int q) {
    os << "u3(" << angle(t) << ',' << angle(p) << ',' << angle(l) << ") q[" << q << "];\n";
}

void emit_two(std::ostringstream& os, GateKind kind, int c, int t, const QasmOptions& options) {
    if (kind == GateKind::CH && options.strict_qelib1) {
        // qelib1.inc: gate ch a,b { h b; sdg b; cx a,b; h b; t b; cx a,b; t b; h b; s b; x b; s a; }
        const std::string a = "q[" + std::to_string(c) + "]";
        const std::string b = "q[" + std::to_string(t) + "]";
        os << "h " << b << ";\nsdg " << b << ";\ncx " << a << ',' << b << ";\nh " << b << ";\nt " << b
           << ";\ncx " << a << ',' << b << ";\nt " << b << ";\nh " << b << ";\ns " << b << ";\nx " << b
           << ";\ns " << a << ";\n";
        return;
    }
    os << gate_kind_name(kind) << " q[" << c << "],q[" << t << "];\n";
}

}  // namespace

std::string to_qasm(const GateStructure& structure, std::span<const double> params, const QasmOptions& options) {
    if (params.size() != structure.total_params) {
        throw std::invalid_argument("to_qasm: parameter count does not match the structure");
    }
    std::vector<int> phys(static_cast<std::size_t>(structure.n_qubits));
    for (int q = 0; q < structure.n_qubits; ++q) {
        phys[static_cast<std::size_t>(q)] = structure.topology ? structure.topology->relabel[static_cast<std::size_t>(q)] : q;
    }
    const int reg = structure.topology ? structure.topology->n_physical : structure.n_qubits;
    std::ostringstream os;
    os << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    if (structure.topology) {
        os << "// layout:";
        for (int q = 0; q < structure.n_qubits; ++q) {
            os << ' ' << q << "->" << phys[static_cast<std::size_t>(q)];
        }
        os << '\n';
    }
    os << "qreg q[" << reg << "];\n";
    const auto p = [&](int q) { return phys[static_cast<std::size_t>(q)]; };
    for (const Stage& stage : structure.stages) {
        for (const Layer& layer : stage.layers) {
            const double* x = params.data() + layer.param_offset();
            emit_u3(os, x[0], 0.0, x[1], p(layer.qubit_a));
            emit_u3(os, x[2], 0.0, x[3], p(layer.qubit_b));
            emit_two(os, layer.entangler.kind, p(*layer.entangler.control), p(layer.entangler.target), options);
        }
    }
    for (const Gate& g : structure.closing_rotations) {
        const double* x = params.data() + g.param_offset;
        emit_u3(os, x[0], x[1], x[2], p(g.target));
    }
    return os.str();
}

namespace {

class ExprParser {
  public:
    explicit ExprParser(std::string_view text) : s_(text) {}

    double parse() {
        const double v = expr();
        skip();
        if (pos_ != s_.size()) {
            fail("unexpected '" + std::string(s_.substr(pos_)) + "'");
        }
        return v;
    }

  private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError("qasm: bad angle expression '" + std::string(s_) + "': " + why);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double expr() {
        double v = term();
        for (;;) {
            if (eat('+')) {
                v += term();
            } else if (eat('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    double term() {
        double v = factor();
        for (;;) {
            if (eat('*')) {
                v *= factor();
            } else if (eat('/')) {
                v /= factor();
            } else {
                return v;
            }
        }
    }

    double factor() {
        if (eat('-')) {
            return -factor();
        }
        if (eat('+')) {
            return factor();
        }
        if (eat('(')) {
            const double v = expr();
            if (!eat(')')) {
                fail("missing ')'");
            }
            return v;
        }
        skip();
        if (s_.substr(pos_, 2) == "pi") {
            pos_ += 2;
            return std::numbers::pi;
        }
        const std::size_t start = pos_;
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            const bool exp_sign = (c == '+' || c == '-') && pos_ > start && (s_[pos_ - 1] == 'e' || s_[pos_ - 1] == 'E');
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || exp_sign) {
                ++pos_;
            } else {
                break;
            }
        }
        if (start == pos_) {
            fail("expected a number");
        }
        return parse_double(s_.substr(start, pos_ - start));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) {
        ++a;
    }
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
        --b;
    }
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_top_level(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') {
            ++depth;
        } else if (c == ')') {
            --depth;
        }
        if (c == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

struct GateSpec {
    const char* name;
    int n_params;
    int n_qubits;
};

constexpr GateSpec kGates[] = {
    {"u3", 3, 1}, {"u2", 2, 1}, {"u1", 1, 1}, {"cx", 0, 2}, {"cz", 0, 2}, {"ch", 0, 2},
    {"h", 0, 1},  {"x", 0, 1},  {"s", 0, 1},  {"sdg", 0, 1}, {"t", 0, 1}, {"tdg", 0, 1},
};

std::vector<int> parse_layout(const std::string& body) {
    std::vector<std::pair<int, int>> pairs;
    std::istringstream is(body);
    std::string tok;
    while (is >> tok) {
        const auto arrow = tok.find("->");
        if (arrow == std::string::npos) {
            throw ParseError("qasm: malformed layout entry '" + tok + "'");
        }
        pairs.emplace_back(static_cast<int>(parse_double(tok.substr(0, arrow))),
                           static_cast<int>(parse_double(tok.substr(arrow + 2))));
    }
    std::vector<int> layout(pairs.size(), -1);
    for (const auto& [local, phys] : pairs) {
        if (local < 0 || local >= static_cast<int>(layout.size()) || layout[static_cast<std::size_t>(local)] != -1) {
            throw ParseError("qasm: layout must map 0..n-1 exactly once");
        }
        layout[static_cast<std::size_t>(local)] = phys;
    }
    return layout;
}

}  // namespace

QasmCircuit parse_qasm(std::string_view text) {
    QasmCircuit circuit;
    // Strip comments, remembering a layout annotation if present.
    std::string code;
    {
        std::istringstream lines{std::string(text)};
        std::string line;
        while (std::getline(lines, line)) {
            const auto c = line.find("//");
            if (c != std::string::npos) {
                const std::string comment = trim(std::string_view(line).substr(c + 2));
                if (comment.rfind("layout:", 0) == 0) {
                    circuit.layout = parse_layout(comment.substr(7));
                }
                line.erase(c);
            }
            code += line;
            code += '\n';
        }
    }
    std::string reg_name;
    bool header = false;
    for (const std::string& raw : split_top_level(code, ';')) {
        const std::string stmt = trim(raw);
        if (stmt.empty()) {
            continue;
        }
        if (stmt.rfind("OPENQASM", 0) == 0) {
            if (trim(std::string_view(stmt).substr(8)) != "2.0") {
                throw ParseError("qasm: only OPENQASM 2.0 is supported");
            }
            header = true;
            continue;
        }
        if (stmt.rfind("include", 0) == 0) {
            continue;
        }
        if (stmt.rfind("qreg", 0) == 0) {
            if (!reg_name.empty()) {
                throw ParseError("qasm: only a single qreg is supported");
            }
            const std::string decl = trim(std::string_view(stmt).substr(4));
            const auto lb = decl.find('[');
            const auto rb = decl.find(']');
            if (lb == std::string::npos || rb == std::string::npos || rb < lb) {
                throw ParseError("qasm: malformed qreg '" + stmt + "'");
            }
            reg_name = trim(std::string_view(decl).substr(0, lb));
            circuit.register_size = static_cast<int>(parse_double(trim(std::string_view(decl).substr(lb + 1, rb - lb - 1))));
            if (circuit.register_size < 1 || circuit.register_size > 16) {
                throw ParseError("qasm: unsupported register size");
            }
            continue;
        }
        // gate statement: name[(args)] operands
        std::size_t i = 0;
        while (i < stmt.size() && (std::isalnum(static_cast<unsigned char>(stmt[i])) || stmt[i] == '_')) {
            ++i;
        }
        const std::string name = stmt.substr(0, i);
        const GateSpec* spec = nullptr;
        for (const auto& g : kGates) {
            if (name == g.name) {
                spec = &g;
            }
        }
        if (!spec) {
            throw ParseError("qasm: unsupported statement or gate '" + name + "'");
        }
        if (reg_name.empty()) {
            throw ParseError("qasm: gate before qreg declaration");
        }
        QasmGate gate;
        gate.name = name;
        std::string rest = trim(std::string_view(stmt).substr(i));
        if (!rest.empty() && rest[0] == '(') {
            int depth = 0;
            std::size_t close = std::string::npos;
            for (std::size_t k = 0; k < rest.size(); ++k) {
                if (rest[k] == '(') {
                    ++depth;
                } else if (rest[k] == ')' && --depth == 0) {
                    close = k;
                    break;
                }
            }
            if (close == std::string::npos) {
                throw ParseError("qasm: unbalanced parentheses in '" + stmt + "'");
            }
            for (const std::string& arg : split_top_level(rest.substr(1, close - 1), ',')) {
                gate.params.push_back(ExprParser(arg).parse());
            }
            rest = trim(std::string_view(rest).substr(close + 1));
        }
        if (static_cast<int>(gate.params.size()) != spec->n_params) {
            throw ParseError("qasm: gate '" + name + "' expects " + std::to_string(spec->n_params) + " parameters");
        }
        for (const std::string& operand : split_top_level(rest, ',')) {
            const auto lb = operand.find('[');
            const auto rb = operand.find(']');
            if (lb == std::string::npos || rb == std::string::npos || trim(std::string_view(operand).substr(0, lb)) != reg_name) {
                throw ParseError("qasm: bad operand '" + operand + "'");
            }
            const int q = static_cast<int>(parse_double(trim(std::string_view(operand).substr(lb + 1, rb - lb - 1))));
            if (q < 0 || q >= circuit.register_size) {
                throw ParseError("qasm: qubit index out of range in '" + stmt + "'");
            }
            gate.qubits.push_back(q);
        }
        if (static_cast<int>(gate.qubits.size()) != spec->n_qubits ||
            (spec->n_qubits == 2 && gate.qubits[0] == gate.qubits[1])) {
            throw ParseError("qasm: gate '" + name + "' has wrong operands");
        }
        circuit.gates.push_back(std::move(gate));
    }
    if (!header) {
        throw ParseError("qasm: missing OPENQASM header");
    }
    if (reg_name.empty()) {
        throw ParseError("qasm: missing qreg declaration");
    }
    for (int phys : circuit.layout) {
        if (phys < 0 || phys >= circuit.register_size) {
            throw ParseError("qasm: layout refers to a qubit outside the register");
        }
    }
    return circuit;
}

ComplexMatrix qasm_matrix(const QasmCircuit& circuit) {
    const int n = circuit.logical_qubits();
    std::vector<int> local_of(static_cast<std::size_t>(circuit.register_size), -1);
    for (int q = 0; q < n; ++q) {
        local_of[static_cast<std::size_t>(circuit.layout.empty() ? q : circuit.layout[static_cast<std::size_t>(q)])] = q;
    }
    const auto local = [&](int reg) {
        const int q = local_of[static_cast<std::size_t>(reg)];
        if (q < 0) {
            throw ParseError("qasm: gate acts on register qubit " + std::to_string(reg) + " outside the layout");
        }
        return q;
    };
    const double pi = std::numbers::pi;
    ComplexMatrix m = identity(Eigen::Index{1} << n);
    for (const QasmGate& g : circuit.gates) {
        if (g.qubits.size() == 2) {
            const GateKind kind = g.name == "cx" ? GateKind::CNOT : (g.name == "cz" ? GateKind::CZ : GateKind::CH);
            apply_left(m, LocalOp::two(local(g.qubits[0]), local(g.qubits[1]), two_qubit_kernel4(kind)));
            continue;
        }
        Mat2 k;
        if (g.name == "u3") {
            k = u3_kernel(g.params[0], g.params[1], g.params[2]);
        } else if (g.name == "u2") {
            k = u3_kernel(pi / 2.0, g.params[0], g.params[1]);
        } else if (g.name == "u1") {
            k = u3_kernel(0.0, 0.0, g.params[0]);
        } else if (g.name == "h") {
            k = hadamard_kernel();
        } else if (g.name == "x") {
            k << 0.0, 1.0, 1.0, 0.0;
        } else {
            const double phase = g.name == "s" ? pi / 2 : g.name == "sdg" ? -pi / 2 : g.name == "t" ? pi / 4 : -pi / 4;
            k << 1.0, 0.0, 0.0, std::polar(1.0, phase);
        }
        apply_left(m, LocalOp::one(local(g.qubits[0]), k));
    }
    return m;
}

}  // namespace usynth
