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

#include "usynth/gates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace usynth {

namespace {

constexpr Complex kI(0.0, 1.0);

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r < 0.0) {
        r += two_pi;
    }
    if (r >= two_pi) {
        r -= two_pi;
    }
    return r;
}

}  // namespace

bool is_two_qubit(GateKind kind) {
    return kind == GateKind::CNOT || kind == GateKind::CZ || kind == GateKind::CH;
}

std::string_view gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::U3: return "u3";
        case GateKind::H: return "h";
        case GateKind::CNOT: return "cx";
        case GateKind::CZ: return "cz";
        case GateKind::CH: return "ch";
    }
    return "?";
}

GateKind parse_entangler(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "cnot" || lower == "cx") {
        return GateKind::CNOT;
    }
    if (lower == "cz") {
        return GateKind::CZ;
    }
    if (lower == "ch") {
        return GateKind::CH;
    }
    throw std::invalid_argument("unknown entangler '" + std::string(name) + "' (expected cnot, cz or ch)");
}

Gate Gate::u3(int target, std::size_t offset, int count) {
    Gate g;
    g.kind = GateKind::U3;
    g.target = target;
    g.param_offset = offset;
    g.param_count = count;
    return g;
}

Gate Gate::fixed(GateKind kind, int target, std::optional<int> control) {
    Gate g;
    g.kind = kind;
    g.target = target;
    g.control = control;
    return g;
}

void check_gate(const Gate& gate) {
    if (is_two_qubit(gate.kind)) {
        if (!gate.control) {
            throw std::invalid_argument("two-qubit gate without a control qubit");
        }
        if (*gate.control == gate.target) {
            throw std::invalid_argument("control and target coincide");
        }
        if (gate.param_count != 0) {
            throw std::invalid_argument("fixed gates take no parameters");
        }
    } else {
        if (gate.control) {
            throw std::invalid_argument("single-qubit gate with a control qubit");
        }
        if (gate.kind == GateKind::U3 && gate.param_count != 2 && gate.param_count != 3) {
            throw std::invalid_argument("U3 gates take 2 or 3 parameters");
        }
        if (gate.kind == GateKind::H && gate.param_count != 0) {
            throw std::invalid_argument("fixed gates take no parameters");
        }
    }
    if (gate.target < 0 || (gate.control && *gate.control < 0)) {
        throw std::invalid_argument("negative qubit index");
    }
}

Mat2 u3_kernel(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Mat2 m;
    m(0, 0) = c;
    m(0, 1) = -std::polar(s, lambda);
    m(1, 0) = std::polar(s, phi);
    m(1, 1) = std::polar(c, phi + lambda);
    return m;
}

Mat2 u3_kernel_derivative(double theta, double phi, double lambda, U3Param which) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Mat2 m = Mat2::Zero();
    switch (which) {
        case U3Param::Theta:
            m(0, 0) = -0.5 * s;
            m(0, 1) = -std::polar(0.5 * c, lambda);
            m(1, 0) = std::polar(0.5 * c, phi);
            m(1, 1) = -std::polar(0.5 * s, phi + lambda);
            return m;
        case U3Param::Phi:
            m(1, 0) = kI * std::polar(s, phi);
            m(1, 1) = kI * std::polar(c, phi + lambda);
            return m;
        case U3Param::Lambda:
            m(0, 1) = -kI * std::polar(s, lambda);
            m(1, 1) = kI * std::polar(c, phi + lambda);
            return m;
    }
    throw std::invalid_argument("u3_derivative: invalid parameter selector");
}

ComplexMatrix u3_matrix(double theta, double phi, double lambda) {
    return u3_kernel(theta, phi, lambda);
}

ComplexMatrix u3_derivative(double theta, double phi, double lambda, U3Param which) {
    return u3_kernel_derivative(theta, phi, lambda, which);
}

Mat2 hadamard_kernel() {
    const double r = std::numbers::sqrt2 / 2.0;
    Mat2 h;
    h << r, r, r, -r;
    return h;
}

Mat4 two_qubit_kernel4(GateKind kind) {
    Mat4 m = Mat4::Identity();
    switch (kind) {
        case GateKind::CNOT:
            m(2, 2) = 0.0;
            m(3, 3) = 0.0;
            m(2, 3) = 1.0;
            m(3, 2) = 1.0;
            return m;
        case GateKind::CZ:
            m(3, 3) = -1.0;
            return m;
        case GateKind::CH:
            m.block<2, 2>(2, 2) = hadamard_kernel();
            return m;
        default:
            break;
    }
    throw std::invalid_argument("two_qubit_kernel: '" + std::string(gate_kind_name(kind)) +
                                "' is not a two-qubit gate");
}

ComplexMatrix two_qubit_kernel(GateKind kind) {
    return two_qubit_kernel4(kind);
}

Mat4 kron2(const Mat2& hi, const Mat2& lo) {
    Mat4 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = hi(i, j) * lo;
        }
    }
    return out;
}

namespace {

Mat2 u3_from_params(const Gate& gate, std::span<const double> params) {
    if (gate.param_offset + static_cast<std::size_t>(gate.param_count) > params.size()) {
        throw std::out_of_range("gate parameters outside the parameter vector");
    }
    const double* p = params.data() + gate.param_offset;
    if (gate.param_count == 2) {
        return u3_kernel(p[0], 0.0, p[1]);
    }
    return u3_kernel(p[0], p[1], p[2]);
}

}  // namespace

ComplexMatrix gate_local_matrix(const Gate& gate, std::span<const double> params) {
    check_gate(gate);
    switch (gate.kind) {
        case GateKind::U3: return u3_from_params(gate, params);
        case GateKind::H: return hadamard_kernel();
        default: return two_qubit_kernel4(gate.kind);
    }
}

ComplexMatrix embed_gate(const Gate& gate, std::span<const double> params, int n_qubits) {
    check_gate(gate);
    if (gate.target >= n_qubits || (gate.control && *gate.control >= n_qubits)) {
        throw std::out_of_range("embed_gate: qubit index out of range for " + std::to_string(n_qubits) +
                                " qubits");
    }
    if (is_two_qubit(gate.kind)) {
        return embed_local(LocalOp::two(*gate.control, gate.target, two_qubit_kernel4(gate.kind)),
                           n_qubits);
    }
    const Mat2 k = gate.kind == GateKind::U3 ? u3_from_params(gate, params) : hadamard_kernel();
    return embed_local(LocalOp::one(gate.target, k), n_qubits);
}

U3Angles u3_params_from_2x2(const ComplexMatrix& u) {
    if (u.rows() != 2 || u.cols() != 2) {
        throw std::invalid_argument("u3_params_from_2x2: expected a 2x2 matrix");
    }
    if (unitarity_defect(u) > 1e-8) {
        throw std::invalid_argument("u3_params_from_2x2: matrix is not unitary");
    }
    constexpr double kDegenerate = 1e-12;
    const double c = std::abs(u(0, 0));
    const double s = std::abs(u(1, 0));
    U3Angles out;
    out.theta = 2.0 * std::atan2(s, c);
    if (s <= kDegenerate) {
        out.global_phase = std::arg(u(0, 0));
        out.phi = 0.0;
        out.lambda = std::arg(u(1, 1)) - out.global_phase;
    } else if (c <= kDegenerate) {
        out.global_phase = std::arg(u(1, 0));
        out.phi = 0.0;
        out.lambda = std::arg(-u(0, 1)) - out.global_phase;
    } else {
        out.global_phase = std::arg(u(0, 0));
        out.phi = std::arg(u(1, 0)) - out.global_phase;
        out.lambda = std::arg(-u(0, 1)) - out.global_phase;
    }
    out.phi = wrap_angle(out.phi);
    out.lambda = wrap_angle(out.lambda);
    out.global_phase = wrap_angle(out.global_phase);
    return out;
}

// ---------------------------------------------------------------------------

LocalOp LocalOp::one(int qubit, const Mat2& m) {
    LocalOp op;
    op.arity = 1;
    op.qubits = {qubit, qubit};
    op.matrix = Mat4::Identity();
    op.matrix.block<2, 2>(0, 0) = m;
    return op;
}

LocalOp LocalOp::two(int high, int low, const Mat4& m) {
    if (high == low) {
        throw std::invalid_argument("two-qubit operator on a single qubit");
    }
    LocalOp op;
    op.arity = 2;
    op.qubits = {high, low};
    op.matrix = m;
    return op;
}

namespace {

// Register offsets of the local basis states of `op`, relative to a base
// index whose op bits are zero.
struct LocalIndex {
    int dim = 2;
    std::array<Eigen::Index, 4> offset{};
    Eigen::Index mask = 0;
};

LocalIndex local_index(const LocalOp& op, Eigen::Index dim) {
    LocalIndex li;
    const Eigen::Index hi = Eigen::Index{1} << op.qubits[0];
    if (hi >= dim) {
        throw std::out_of_range("local operator qubit outside the register");
    }
    if (op.arity == 1) {
        li.dim = 2;
        li.offset = {0, hi, 0, 0};
        li.mask = hi;
        return li;
    }
    const Eigen::Index lo = Eigen::Index{1} << op.qubits[1];
    if (lo >= dim) {
        throw std::out_of_range("local operator qubit outside the register");
    }
    li.dim = 4;
    li.offset = {0, lo, hi, hi | lo};
    li.mask = hi | lo;
    return li;
}

}  // namespace

namespace {

template <int D>
void apply_left_impl(ComplexMatrix& m, const LocalOp& op, const LocalIndex& li) {
    const Eigen::Index dim = m.rows();
    const Eigen::Index cols = m.cols();
    Complex k[D][D];
    for (int l = 0; l < D; ++l) {
        for (int j = 0; j < D; ++j) {
            k[l][j] = op.matrix(l, j);
        }
    }
    Complex* data = m.data();
    for (Eigen::Index base = 0; base < dim; ++base) {
        if (base & li.mask) {
            continue;
        }
        Complex* row[D];
        for (int l = 0; l < D; ++l) {
            row[l] = data + (base + li.offset[static_cast<std::size_t>(l)]) * cols;
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            Complex v[D];
            for (int l = 0; l < D; ++l) {
                v[l] = row[l][c];
            }
            for (int l = 0; l < D; ++l) {
                Complex acc = k[l][0] * v[0];
                for (int j = 1; j < D; ++j) {
                    acc += k[l][j] * v[j];
                }
                row[l][c] = acc;
            }
        }
    }
}

// m <- m * K for the local kernel K (already adjointed if requested).
template <int D>
void apply_right_kernel(ComplexMatrix& m, const Mat4& kernel, const LocalIndex& li) {
    const Eigen::Index dim = m.cols();
    Complex k[D][D];
    for (int l = 0; l < D; ++l) {
        for (int j = 0; j < D; ++j) {
            k[l][j] = kernel(l, j);
        }
    }
    Complex* data = m.data();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Complex* row = data + r * dim;
        for (Eigen::Index base = 0; base < dim; ++base) {
            if (base & li.mask) {
                continue;
            }
            Complex v[D];
            for (int l = 0; l < D; ++l) {
                v[l] = row[base + li.offset[static_cast<std::size_t>(l)]];
            }
            for (int j = 0; j < D; ++j) {
                Complex acc = v[0] * k[0][j];
                for (int l = 1; l < D; ++l) {
                    acc += v[l] * k[l][j];
                }
                row[base + li.offset[static_cast<std::size_t>(j)]] = acc;
            }
        }
    }
}

template <bool Adjoint>
void apply_right_impl(ComplexMatrix& m, const LocalOp& op) {
    const LocalIndex li = local_index(op, m.cols());
    const Mat4 k = Adjoint ? Mat4(op.matrix.adjoint()) : op.matrix;
    if (li.dim == 4) {
        apply_right_kernel<4>(m, k, li);
    } else {
        apply_right_kernel<2>(m, k, li);
    }
}

template <int D>
Mat4 partial_trace_impl(const ComplexMatrix& p, const ComplexMatrix& a, const LocalIndex& li) {
    const Eigen::Index dim = p.rows();
    const Eigen::Index inner = p.cols();
    Complex t[D][D] = {};
    const Complex* pd = p.data();
    const Complex* ad = a.data();
    for (Eigen::Index base = 0; base < dim; ++base) {
        if (base & li.mask) {
            continue;
        }
        const Complex* prow[D];
        for (int l = 0; l < D; ++l) {
            prow[l] = pd + (base + li.offset[static_cast<std::size_t>(l)]) * inner;
        }
        for (Eigen::Index z = 0; z < inner; ++z) {
            const Complex* arow = ad + z * dim + base;
            Complex av[D];
            for (int k = 0; k < D; ++k) {
                av[k] = arow[li.offset[static_cast<std::size_t>(k)]];
            }
            for (int l = 0; l < D; ++l) {
                const Complex pv = prow[l][z];
                for (int k = 0; k < D; ++k) {
                    t[l][k] += pv * av[k];
                }
            }
        }
    }
    Mat4 out = Mat4::Zero();
    for (int l = 0; l < D; ++l) {
        for (int k = 0; k < D; ++k) {
            out(l, k) = t[l][k];
        }
    }
    return out;
}

}  // namespace

void apply_left(ComplexMatrix& m, const LocalOp& op) {
    const LocalIndex li = local_index(op, m.rows());
    if (li.dim == 4) {
        apply_left_impl<4>(m, op, li);
    } else {
        apply_left_impl<2>(m, op, li);
    }
}

void apply_right(ComplexMatrix& m, const LocalOp& op) {
    apply_right_impl<false>(m, op);
}

void apply_right_adjoint(ComplexMatrix& m, const LocalOp& op) {
    apply_right_impl<true>(m, op);
}

Mat4 partial_trace_product(const ComplexMatrix& p, const ComplexMatrix& a, const LocalOp& shape) {
    const Eigen::Index dim = p.rows();
    if (p.cols() != a.rows() || a.cols() != dim) {
        throw std::invalid_argument("partial_trace_product: shape mismatch");
    }
    const LocalIndex li = local_index(shape, dim);
    return li.dim == 4 ? partial_trace_impl<4>(p, a, li) : partial_trace_impl<2>(p, a, li);
}

Complex local_trace(const Mat4& t, const Mat4& k, int arity) {
    const int n = arity == 1 ? 2 : 4;
    Complex acc = 0.0;
    for (int l = 0; l < n; ++l) {
        for (int j = 0; j < n; ++j) {
            acc += t(l, j) * k(j, l);
        }
    }
    return acc;
}

ComplexMatrix embed_local(const LocalOp& op, int n_qubits) {
    ComplexMatrix m = identity(Eigen::Index{1} << n_qubits);
    apply_left(m, op);
    return m;
}

}  // namespace usynth
