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

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "usynth/numerics.hpp"

namespace usynth {

enum class GateKind { U3, H, CNOT, CZ, CH };

bool is_two_qubit(GateKind kind);
std::string_view gate_kind_name(GateKind kind);

/// Parses "cnot"/"cx", "cz", "ch" (case insensitive) into a two-qubit kind.
GateKind parse_entangler(std::string_view name);

/// Placement of a gate in a circuit template.
///
/// U3 gates read their angles from a flat parameter vector starting at
/// param_offset: two values (theta, lambda with phi fixed to 0) for the
/// rotations inside a layer, three (theta, phi, lambda) for the closing
/// rotations. Fixed gates carry no parameters.
struct Gate {
    GateKind kind = GateKind::U3;
    int target = 0;
    std::optional<int> control;
    std::size_t param_offset = 0;
    int param_count = 0;

    static Gate u3(int target, std::size_t offset, int count);
    static Gate fixed(GateKind kind, int target, std::optional<int> control = std::nullopt);
};

/// Throws std::invalid_argument if the gate violates its own invariants.
void check_gate(const Gate& gate);

enum class U3Param { Theta = 0, Phi = 1, Lambda = 2 };

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

/// OpenQASM 2.0 u3:
///   [[cos(t/2), -e^{il} sin(t/2)], [e^{ip} sin(t/2), e^{i(p+l)} cos(t/2)]]
Mat2 u3_kernel(double theta, double phi, double lambda);
Mat2 u3_kernel_derivative(double theta, double phi, double lambda, U3Param which);

ComplexMatrix u3_matrix(double theta, double phi, double lambda);

/// Elementwise partial derivative of u3_matrix; throws on an invalid selector.
ComplexMatrix u3_derivative(double theta, double phi, double lambda, U3Param which);

Mat2 hadamard_kernel();

/// 4x4 kernel in the |control, target> basis (control is the high bit).
Mat4 two_qubit_kernel4(GateKind kind);
ComplexMatrix two_qubit_kernel(GateKind kind);

/// hi ⊗ lo for 2x2 factors.
Mat4 kron2(const Mat2& hi, const Mat2& lo);

/// Matrix of a single gate on its own qubits: 2x2 for U3/H, 4x4 in the
/// |control, target> basis for two-qubit kinds.
ComplexMatrix gate_local_matrix(const Gate& gate, std::span<const double> params);

/// Full 2^n x 2^n operator; qubit q_{n-1} is the most significant bit.
ComplexMatrix embed_gate(const Gate& gate, std::span<const double> params, int n_qubits);

struct U3Angles {
    double theta = 0.0;
    double phi = 0.0;
    double lambda = 0.0;
    double global_phase = 0.0;
};

/// Inverts u3_matrix: e^{i global_phase} u3(theta, phi, lambda) == u.
/// theta is in [0, pi], phi and lambda in [0, 2 pi). At theta = 0 or pi the
/// (phi, lambda) gauge is fixed by phi = 0. Throws std::invalid_argument if u
/// is not a 2x2 unitary (tolerance 1e-8).
U3Angles u3_params_from_2x2(const ComplexMatrix& u);

// ---------------------------------------------------------------------------
// Register kernels. A LocalOp is a one- or two-qubit operator; for two qubits
// qubits[0] is the high bit of the local 4x4 index. One-qubit operators use
// the top-left 2x2 block of `matrix`.

struct LocalOp {
    int arity = 1;
    std::array<int, 2> qubits{0, 0};
    Mat4 matrix = Mat4::Identity();

    static LocalOp one(int qubit, const Mat2& m);
    static LocalOp two(int high, int low, const Mat4& m);
};

/// m <- E(op) * m
void apply_left(ComplexMatrix& m, const LocalOp& op);

/// m <- m * E(op)
void apply_right(ComplexMatrix& m, const LocalOp& op);

/// m <- m * E(op)^†
void apply_right_adjoint(ComplexMatrix& m, const LocalOp& op);

/// Local reduction of a product: T[l][k] = sum_r (p a)[(l, r), (k, r)] where
/// r runs over the bits outside op's qubits. Then Tr(p a E(K)) = Tr(T K) for
/// any local operator K of the same shape. The product is not formed.
Mat4 partial_trace_product(const ComplexMatrix& p, const ComplexMatrix& a, const LocalOp& shape);

/// Tr(t k) restricted to the op's arity.
Complex local_trace(const Mat4& t, const Mat4& k, int arity);

ComplexMatrix embed_local(const LocalOp& op, int n_qubits);

}  // namespace usynth
