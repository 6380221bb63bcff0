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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

namespace usynth {
namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix fd_u3(double t, double p, double l, U3Param which, double h) {
    double plus[3] = {t, p, l};
    double minus[3] = {t, p, l};
    plus[static_cast<int>(which)] += h;
    minus[static_cast<int>(which)] -= h;
    return (u3_matrix(plus[0], plus[1], plus[2]) - u3_matrix(minus[0], minus[1], minus[2])) / (2 * h);
}

TEST(U3, IdentityAndX) {
    EXPECT_EQ(max_abs_diff(u3_matrix(0, 0, 0), identity(2)), 0.0);
    EXPECT_LE(max_abs_diff(u3_matrix(kPi, 0, kPi), testing::pauli_x()), 1e-15);
}

TEST(U3, MatchesConventionElementwise) {
    const double t = 0.3;
    const double p = 1.1;
    const double l = -2.2;
    const ComplexMatrix m = u3_matrix(t, p, l);
    EXPECT_NEAR(std::abs(m(0, 0) - std::cos(t / 2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m(0, 1) + std::polar(1.0, l) * std::sin(t / 2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m(1, 0) - std::polar(1.0, p) * std::sin(t / 2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m(1, 1) - std::polar(1.0, p + l) * std::cos(t / 2)), 0.0, 1e-15);
}

TEST(U3, UnitaryForRandomParameters) {
    RandomSource rng(1);
    for (int i = 0; i < 10000; ++i) {
        const ComplexMatrix m = u3_matrix(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
        ASSERT_LE(unitarity_defect(m), 1e-14);
    }
}

TEST(U3Derivative, ThetaAtZero) {
    ComplexMatrix expected(2, 2);
    expected << 0.0, -0.5, 0.5, 0.0;
    EXPECT_LE(max_abs_diff(u3_derivative(0, 0, 0, U3Param::Theta), expected), 1e-15);
}

TEST(U3Derivative, PhiAtThetaZeroOnlyTouchesCorner) {
    const double l = 0.4;
    const double p = 1.3;
    const ComplexMatrix d = u3_derivative(0, p, l, U3Param::Phi);
    EXPECT_EQ(d(0, 0), Complex(0.0));
    EXPECT_EQ(std::abs(d(0, 1)), 0.0);
    EXPECT_NEAR(std::abs(d(1, 1) - Complex(0, 1) * std::polar(1.0, p + l)), 0.0, 1e-15);
    EXPECT_LE(max_abs_diff(d, fd_u3(0, p, l, U3Param::Phi, 1e-6)), 1e-8);
}

TEST(U3Derivative, MatchesFiniteDifferences) {
    RandomSource rng(2);
    for (int i = 0; i < 200; ++i) {
        const double t = rng.uniform(-7, 7);
        const double p = rng.uniform(-7, 7);
        const double l = rng.uniform(-7, 7);
        for (U3Param w : {U3Param::Theta, U3Param::Phi, U3Param::Lambda}) {
            const ComplexMatrix a = u3_derivative(t, p, l, w);
            const ComplexMatrix f = fd_u3(t, p, l, w, 1e-6);
            ASSERT_LE(max_abs_diff(a, f), 1e-8);
            ASSERT_LE((a - f).norm(), 1e-6 * std::max(1.0, a.norm()));
        }
    }
}

TEST(U3Derivative, InvalidSelectorThrows) {
    EXPECT_THROW(u3_derivative(0, 0, 0, static_cast<U3Param>(7)), std::invalid_argument);
}

TEST(TwoQubit, Kernels) {
    const ComplexMatrix cx = two_qubit_kernel(GateKind::CNOT);
    EXPECT_EQ(max_abs_diff(cx * cx, identity(4)), 0.0);
    const ComplexMatrix cz = two_qubit_kernel(GateKind::CZ);
    ComplexMatrix expected = identity(4);
    expected(3, 3) = -1.0;
    EXPECT_EQ(max_abs_diff(cz, expected), 0.0);
    const ComplexMatrix ch = two_qubit_kernel(GateKind::CH);
    EXPECT_EQ(max_abs_diff(ch.topLeftCorner(2, 2), identity(2)), 0.0);
    EXPECT_NEAR(std::abs(ch(2, 2) - 1 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(ch(3, 3) + 1 / std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_THROW(two_qubit_kernel(GateKind::U3), std::invalid_argument);
    EXPECT_THROW(two_qubit_kernel(GateKind::H), std::invalid_argument);
}

TEST(TwoQubit, ReversedCnotIsHadamardConjugated) {
    const ComplexMatrix h = ComplexMatrix(hadamard_kernel());
    const ComplexMatrix hh = kron(h, h);
    Gate reversed = Gate::fixed(GateKind::CNOT, 1, 0);
    const ComplexMatrix rev = embed_gate(reversed, {}, 2);
    const ComplexMatrix lhs = hh * two_qubit_kernel(GateKind::CNOT) * hh;
    EXPECT_LE(max_abs_diff(lhs, rev), 1e-14);
}

TEST(TwoQubit, EveryGateUnitary) {
    for (GateKind k : {GateKind::CNOT, GateKind::CZ, GateKind::CH}) {
        EXPECT_LE(unitarity_defect(two_qubit_kernel(k)), 1e-15);
    }
    EXPECT_LE(unitarity_defect(ComplexMatrix(hadamard_kernel())), 1e-15);
}

TEST(Embed, IdentityU3AnywhereIsIdentity) {
    const std::vector<double> zeros(3, 0.0);
    for (int q = 0; q < 3; ++q) {
        EXPECT_EQ(max_abs_diff(embed_gate(Gate::u3(q, 0, 3), zeros, 3), identity(8)), 0.0);
    }
}

TEST(Embed, CnotBasisEnumeration) {
    const ComplexMatrix m = embed_gate(Gate::fixed(GateKind::CNOT, 0, 1), {}, 2);
    for (int in = 0; in < 4; ++in) {
        const int c = (in >> 1) & 1;
        const int t = in & 1;
        const int out = (c << 1) | (t ^ c);
        for (int row = 0; row < 4; ++row) {
            EXPECT_EQ(m(row, in), Complex(row == out ? 1.0 : 0.0)) << in << " " << row;
        }
    }
}

TEST(Embed, MatchesKroneckerOnThreeQubits) {
    RandomSource rng(3);
    const std::vector<double> p = testing::random_angles(3, rng);
    const ComplexMatrix u = u3_matrix(p[0], p[1], p[2]);
    EXPECT_LE(max_abs_diff(embed_gate(Gate::u3(2, 0, 3), p, 3), kron(u, identity(4))), 1e-15);
    EXPECT_LE(max_abs_diff(embed_gate(Gate::u3(1, 0, 3), p, 3), kron(kron(identity(2), u), identity(2))), 1e-15);
    EXPECT_LE(max_abs_diff(embed_gate(Gate::u3(0, 0, 3), p, 3), kron(identity(4), u)), 1e-15);
}

TEST(Embed, TwoParameterU3HasZeroPhi) {
    const std::vector<double> p = {0.7, -1.2};
    const ComplexMatrix m = embed_gate(Gate::u3(0, 0, 2), p, 1);
    EXPECT_LE(max_abs_diff(m, u3_matrix(0.7, 0.0, -1.2)), 1e-15);
}

TEST(Embed, OutOfRangeThrows) {
    EXPECT_THROW(embed_gate(Gate::u3(3, 0, 3), std::vector<double>(3), 3), std::out_of_range);
    EXPECT_THROW(embed_gate(Gate::fixed(GateKind::CZ, 0, 5), {}, 3), std::out_of_range);
}

TEST(Embed, UnitaryForRandomParameters) {
    RandomSource rng(4);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> p = testing::random_angles(3, rng);
        const int q = static_cast<int>(rng.next_u64() % 4);
        ASSERT_LE(unitarity_defect(embed_gate(Gate::u3(q, 0, 3), p, 4)), 1e-13);
    }
}

TEST(Embed, DisjointPairsCommuteWithMultiplication) {
    // Gates on {2,1} and {0} commute, and their product equals the kernel
    // product embedded at once.
    RandomSource rng(5);
    const std::vector<double> p = testing::random_angles(3, rng);
    const ComplexMatrix a = embed_gate(Gate::fixed(GateKind::CH, 1, 2), {}, 3);
    const ComplexMatrix b = embed_gate(Gate::u3(0, 0, 3), p, 3);
    EXPECT_LE(max_abs_diff(a * b, b * a), 1e-15);
    const ComplexMatrix joint = kron(two_qubit_kernel(GateKind::CH), u3_matrix(p[0], p[1], p[2]));
    EXPECT_LE(max_abs_diff(a * b, joint), 1e-15);
}

TEST(GateInvariants, Checked) {
    EXPECT_NO_THROW(check_gate(Gate::u3(0, 0, 2)));
    EXPECT_NO_THROW(check_gate(Gate::fixed(GateKind::CNOT, 0, 1)));
    EXPECT_THROW(check_gate(Gate::u3(0, 0, 4)), std::invalid_argument);
    EXPECT_THROW(check_gate(Gate::fixed(GateKind::CNOT, 1, 1)), std::invalid_argument);
    EXPECT_THROW(check_gate(Gate::fixed(GateKind::CZ, 1)), std::invalid_argument);
    Gate h = Gate::fixed(GateKind::H, 0);
    h.control = 1;
    EXPECT_THROW(check_gate(h), std::invalid_argument);
}

TEST(GateKinds, Names) {
    EXPECT_EQ(parse_entangler("cnot"), GateKind::CNOT);
    EXPECT_EQ(parse_entangler("CX"), GateKind::CNOT);
    EXPECT_EQ(parse_entangler("cz"), GateKind::CZ);
    EXPECT_EQ(parse_entangler("ch"), GateKind::CH);
    EXPECT_THROW(parse_entangler("swap"), std::invalid_argument);
    EXPECT_EQ(gate_kind_name(GateKind::CNOT), "cx");
    EXPECT_TRUE(is_two_qubit(GateKind::CH));
    EXPECT_FALSE(is_two_qubit(GateKind::H));
}

void expect_reconstructs(const ComplexMatrix& u) {
    const U3Angles a = u3_params_from_2x2(u);
    EXPECT_GE(a.theta, 0.0);
    EXPECT_LE(a.theta, kPi);
    EXPECT_GE(a.phi, 0.0);
    EXPECT_LT(a.phi, 2 * kPi);
    EXPECT_GE(a.lambda, 0.0);
    EXPECT_LT(a.lambda, 2 * kPi);
    const ComplexMatrix back = std::polar(1.0, a.global_phase) * u3_matrix(a.theta, a.phi, a.lambda);
    EXPECT_LE(max_abs_diff(back, u), 1e-10);
}

TEST(U3Params, Identity) {
    const U3Angles a = u3_params_from_2x2(identity(2));
    EXPECT_EQ(a.theta, 0.0);
    EXPECT_EQ(a.phi, 0.0);
    EXPECT_EQ(a.lambda, 0.0);
    EXPECT_EQ(a.global_phase, 0.0);
}

TEST(U3Params, PauliX) {
    const U3Angles a = u3_params_from_2x2(testing::pauli_x());
    EXPECT_NEAR(a.theta, kPi, 1e-15);
    EXPECT_EQ(a.phi, 0.0);
    EXPECT_NEAR(a.lambda, kPi, 1e-15);
    EXPECT_NEAR(std::remainder(a.global_phase, 2 * kPi), 0.0, 1e-15);
    expect_reconstructs(testing::pauli_x());
}

TEST(U3Params, DiagonalAndAntiDiagonalGauges) {
    expect_reconstructs(testing::pauli_z());
    ComplexMatrix y(2, 2);
    y << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
    expect_reconstructs(y);
    expect_reconstructs(std::polar(1.0, 2.0) * u3_matrix(0, 1.0, 2.5));
    expect_reconstructs(std::polar(1.0, -1.0) * u3_matrix(kPi, 2.0, 0.5));
}

TEST(U3Params, HaarRoundTrip) {
    RandomSource rng(6);
    for (int i = 0; i < 100; ++i) {
        expect_reconstructs(haar_random_unitary(1, rng));
    }
}

TEST(U3Params, NonUnitaryThrows) {
    EXPECT_THROW(u3_params_from_2x2(identity(2) * 1.1), std::invalid_argument);
    EXPECT_THROW(u3_params_from_2x2(identity(4)), std::invalid_argument);
}

LocalOp random_op(int n, RandomSource& rng) {
    const int a = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    int b = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
    if (b >= a) {
        ++b;
    }
    const ComplexMatrix m = testing::random_matrix(4, 4, rng);
    return LocalOp::two(a, b, Mat4(m));
}

TEST(LocalOps, ApplyMatchesDenseEmbedding) {
    RandomSource rng(7);
    for (int n = 2; n <= 4; ++n) {
        const Eigen::Index d = Eigen::Index{1} << n;
        for (int trial = 0; trial < 10; ++trial) {
            const LocalOp op = random_op(n, rng);
            const ComplexMatrix e = embed_local(op, n);
            const ComplexMatrix m = testing::random_matrix(d, d, rng);
            ComplexMatrix left = m;
            apply_left(left, op);
            EXPECT_LE(max_abs_diff(left, testing::naive_matmul(e, m)), 1e-12);
            ComplexMatrix right = m;
            apply_right(right, op);
            EXPECT_LE(max_abs_diff(right, testing::naive_matmul(m, e)), 1e-12);
            ComplexMatrix radj = m;
            apply_right_adjoint(radj, op);
            EXPECT_LE(max_abs_diff(radj, testing::naive_matmul(m, testing::naive_dagger(e))), 1e-12);
        }
    }
}

TEST(LocalOps, TwoQubitEmbeddingMatchesGate) {
    const LocalOp op = LocalOp::two(0, 2, two_qubit_kernel4(GateKind::CNOT));
    EXPECT_EQ(max_abs_diff(embed_local(op, 3), embed_gate(Gate::fixed(GateKind::CNOT, 2, 0), {}, 3)), 0.0);
    const Mat2 u = u3_kernel(0.4, 0.1, 0.9);
    const LocalOp one = LocalOp::one(1, u);
    EXPECT_LE(max_abs_diff(embed_local(one, 3), kron(kron(identity(2), ComplexMatrix(u)), identity(2))), 1e-15);
}

TEST(LocalOps, PartialTraceProductOracle) {
    RandomSource rng(8);
    for (int n = 2; n <= 4; ++n) {
        const Eigen::Index d = Eigen::Index{1} << n;
        for (int trial = 0; trial < 10; ++trial) {
            const LocalOp shape = random_op(n, rng);
            const ComplexMatrix p = testing::random_matrix(d, d, rng);
            const ComplexMatrix a = testing::random_matrix(d, d, rng);
            const Mat4 t = partial_trace_product(p, a, shape);
            for (int k = 0; k < 3; ++k) {
                LocalOp probe = shape;
                probe.matrix = Mat4(testing::random_matrix(4, 4, rng));
                const Complex direct = (p * a * embed_local(probe, n)).trace();
                EXPECT_LE(std::abs(local_trace(t, probe.matrix, 2) - direct), 1e-10 * (1 + std::abs(direct)));
            }
            const LocalOp one = LocalOp::one(shape.qubits[0], Mat2(testing::random_matrix(2, 2, rng)));
            const Mat4 t1 = partial_trace_product(p, a, one);
            const Complex direct1 = (p * a * embed_local(one, n)).trace();
            EXPECT_LE(std::abs(local_trace(t1, one.matrix, 1) - direct1), 1e-10 * (1 + std::abs(direct1)));
        }
    }
}

}  // namespace
}  // namespace usynth
