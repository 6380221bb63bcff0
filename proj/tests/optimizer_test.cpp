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

#include "usynth/optimizer.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

namespace usynth {
namespace {

using testing::random_angles;

double rosenbrock(const RealVector& x, RealVector& g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    g.resize(2);
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
}

TEST(Bfgs, Quadratic) {
    Eigen::MatrixXd a(3, 3);
    a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(3, 1.0, 3.0);
    const Objective f = [&](const RealVector& x, RealVector& g) {
        g = a * x - b;
        return 0.5 * x.dot(a * x) - b.dot(x);
    };
    BfgsOptions opt;
    opt.grad_tol = 1e-9;
    const BfgsResult r = bfgs_minimize(f, RealVector::Zero(3), opt);
    EXPECT_EQ(r.status, BfgsStatus::GradientConverged);
    EXPECT_LE((r.x - a.ldlt().solve(b)).norm(), 1e-8);
    EXPECT_LE(r.iterations, 10);
}

TEST(Bfgs, Rosenbrock) {
    RealVector x0(2);
    x0 << -1.2, 1.0;
    BfgsOptions opt;
    opt.max_iter = 500;
    opt.grad_tol = 1e-9;
    const BfgsResult r = bfgs_minimize(rosenbrock, x0, opt);
    EXPECT_EQ(r.status, BfgsStatus::GradientConverged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-6);
    EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}

TEST(Bfgs, StationaryStart) {
    const Objective f = [](const RealVector& x, RealVector& g) {
        g = 2.0 * x;
        return x.squaredNorm();
    };
    const BfgsResult r = bfgs_minimize(f, RealVector::Zero(4), BfgsOptions{});
    EXPECT_EQ(r.status, BfgsStatus::GradientConverged);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.value, 0.0);
}

TEST(Bfgs, ValueTargetStopsEarly) {
    RealVector x0(2);
    x0 << -1.2, 1.0;
    BfgsOptions opt;
    opt.max_iter = 500;
    opt.value_target = 1.0;
    const BfgsResult r = bfgs_minimize(rosenbrock, x0, opt);
    EXPECT_EQ(r.status, BfgsStatus::TargetReached);
    EXPECT_LE(r.value, 1.0);
    EXPECT_GT(r.value, 1e-6);
}

TEST(Bfgs, NeverWorseThanStart) {
    RandomSource rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        RealVector x0(2);
        x0 << rng.uniform(-3, 3), rng.uniform(-3, 3);
        RealVector g;
        const double start = rosenbrock(x0, g);
        BfgsOptions opt;
        opt.max_iter = 1 + trial % 5;
        const BfgsResult r = bfgs_minimize(rosenbrock, x0, opt);
        EXPECT_LE(r.value, start);
        RealVector g2;
        EXPECT_DOUBLE_EQ(rosenbrock(r.x, g2), r.value);
    }
}

TEST(Bfgs, NonFiniteValueThrows) {
    const Objective f = [](const RealVector& x, RealVector& g) {
        g = RealVector::Ones(x.size());
        return x[0] < -0.5 ? std::nan("") : x[0];
    };
    EXPECT_THROW(bfgs_minimize(f, RealVector::Zero(1), BfgsOptions{}), NonFiniteValue);
}

TEST(OptimizerConfigTest, Validate) {
    OptimizerConfig c;
    EXPECT_NO_THROW(c.validate());
    c.wolfe_c1 = 0.95;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = OptimizerConfig{};
    c.epsilon0 = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = OptimizerConfig{};
    c.joint_interval = -1;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(InitialParameters, RangeAndZero) {
    OptimizerConfig c;
    RandomSource rng(4);
    for (double x : initial_parameters(400, c, rng)) {
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 2 * M_PI);
    }
    c.zero_init = true;
    for (double x : initial_parameters(10, c, rng)) {
        EXPECT_EQ(x, 0.0);
    }
}

TEST(OptimizeBlock, OnlyTouchesBlockAndNeverIncreases) {
    RandomSource rng(5);
    const GateStructure s = assemble_structure(3, std::nullopt, {8, 3});
    const LayerSequence seq = stage_sequence(s, 0);
    const ComplexMatrix u = haar_random_unitary(3, rng);
    const OptimizerConfig c;
    std::vector<double> params = random_angles(seq.param_count(), rng);
    for (std::size_t first = 0; first < seq.layers.size(); ++first) {
        const LayerRange block{first, 1};
        const double before = f_sub(sequence_matrix(seq, params) * u);
        const std::vector<double> next = optimize_block(seq, params, block, u, c);
        const double after = f_sub(sequence_matrix(seq, next) * u);
        EXPECT_LE(after, before + 1e-12);
        for (std::size_t k = 0; k < params.size(); ++k) {
            if (k / 4 != first) {
                EXPECT_EQ(next[k], params[k]);
            }
        }
        params = next;
    }
}

TEST(Sweep, HistoryIsMonotone) {
    for (int run = 0; run < 20; ++run) {
        RandomSource rng(derive_seed(100, static_cast<std::uint64_t>(run)));
        const int n = 2 + run % 2;
        const GateStructure s = assemble_structure(n, std::nullopt, n == 2 ? std::vector<int>{3} : std::vector<int>{10, 3});
        const LayerSequence seq = stage_sequence(s, 0);
        const ComplexMatrix u = haar_random_unitary(n, rng);
        OptimizerConfig c;
        c.max_sweeps = 60;
        c.seed = static_cast<std::uint64_t>(run);
        const SweepState st = sequential_sweep(seq, initial_parameters(seq.param_count(), c, rng), u, c, rng);
        ASSERT_FALSE(st.value_history.empty());
        EXPECT_EQ(st.value_history.front().first, 0);
        for (std::size_t i = 1; i < st.value_history.size(); ++i) {
            EXPECT_LE(st.value_history[i].second, st.value_history[i - 1].second);
            EXPECT_GT(st.value_history[i].first, st.value_history[i - 1].first);
        }
        EXPECT_NEAR(f_sub(sequence_matrix(seq, st.params) * u), st.best_value, 1e-10);
        EXPECT_LE(st.sweep_count, c.max_sweeps);
    }
}

TEST(Sweep, Deterministic) {
    auto run = [] {
        RandomSource rng(7);
        const GateStructure s = assemble_structure(3, std::nullopt, {12, 3});
        const LayerSequence seq = stage_sequence(s, 0);
        const ComplexMatrix u = haar_random_unitary(3, rng);
        OptimizerConfig c;
        c.max_sweeps = 30;
        c.shuffle_blocks = true;
        return sequential_sweep(seq, initial_parameters(seq.param_count(), c, rng), u, c, rng);
    };
    const SweepState a = run();
    const SweepState b = run();
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.best_value, b.best_value);
    EXPECT_EQ(a.sweep_count, b.sweep_count);
}

TEST(Sweep, TwoQubitStageConverges) {
    RandomSource rng(8);
    const GateStructure s = assemble_structure(2, std::nullopt, {3});
    const LayerSequence seq = stage_sequence(s, 0);
    const ComplexMatrix u = haar_random_unitary(2, rng);
    OptimizerConfig c;
    const SweepState st = sequential_sweep(seq, initial_parameters(seq.param_count(), c, rng), u, c, rng);
    EXPECT_TRUE(st.converged);
    EXPECT_LE(st.best_value, c.epsilon0);
}

TEST(Sweep, AlreadySeparableStopsImmediately) {
    RandomSource rng(9);
    const GateStructure s = assemble_structure(3, std::nullopt, {4, 3});
    const LayerSequence seq = stage_sequence(s, 0);
    OptimizerConfig c;
    const std::vector<double> p = initial_parameters(seq.param_count(), c, rng);
    const ComplexMatrix u = sequence_matrix(seq, p).adjoint();
    const SweepState st = sequential_sweep(seq, p, u, c, rng);
    EXPECT_TRUE(st.converged);
    EXPECT_EQ(st.sweep_count, 0);
}

TEST(Sweep, RestartBudgetIsRespected) {
    RandomSource rng(10);
    // Too few layers to disentangle a generic 3-qubit unitary.
    const GateStructure s = assemble_structure(3, std::nullopt, {2, 3});
    const LayerSequence seq = stage_sequence(s, 0);
    const ComplexMatrix u = haar_random_unitary(3, rng);
    OptimizerConfig c;
    c.restart_patience = 5;
    c.max_restarts = 2;
    c.max_sweeps = 100000;
    const SweepState st = sequential_sweep(seq, initial_parameters(seq.param_count(), c, rng), u, c, rng);
    EXPECT_FALSE(st.converged);
    EXPECT_EQ(st.restarts_used, 2);
    EXPECT_LT(st.sweep_count, 1000);
}

TEST(Sweep, JointPassAtCriticalLayerCount) {
    // Twelve layers is the smallest count that disentangles a generic
    // 3-qubit unitary; block sweeps alone converge slowly there.
    for (std::uint64_t t = 0; t < 3; ++t) {
        RandomSource rng(derive_seed(12, t));
        const GateStructure s = assemble_structure(3, std::nullopt, {12, 3});
        const LayerSequence seq = stage_sequence(s, 0);
        const ComplexMatrix u = haar_random_unitary(3, rng);
        OptimizerConfig c;
        c.max_sweeps = 200;
        const std::vector<double> init = initial_parameters(seq.param_count(), c, rng);
        const SweepState joint = sequential_sweep(seq, init, u, c, rng);
        EXPECT_TRUE(joint.converged);
        EXPECT_EQ(joint.sweep_count % c.joint_interval, 0);
        c.joint_interval = 0;
        const SweepState blocks = sequential_sweep(seq, init, u, c, rng);
        EXPECT_FALSE(blocks.converged);
        EXPECT_GT(blocks.best_value, joint.best_value);
    }
}

TEST(Sweep, TimeLimit) {
    RandomSource rng(11);
    const GateStructure s = assemble_structure(3, std::nullopt, {2, 3});
    const LayerSequence seq = stage_sequence(s, 0);
    const ComplexMatrix u = haar_random_unitary(3, rng);
    OptimizerConfig c;
    c.time_limit_s = 0.0;
    c.max_restarts = 0;
    c.restart_patience = 1000000;
    const SweepState st = sequential_sweep(seq, initial_parameters(seq.param_count(), c, rng), u, c, rng);
    EXPECT_TRUE(st.timed_out);
    EXPECT_FALSE(st.converged);
}

}  // namespace
}  // namespace usynth
