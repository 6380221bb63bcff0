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

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "usynth/cost.hpp"
#include "usynth/numerics.hpp"

namespace usynth {

struct OptimizerConfig {
    /// A stage stops once f_sub reaches this value.
    double epsilon0 = 1e-8;
    int max_sweeps = 10000;
    /// BFGS iteration cap per block.
    int bfgs_max_iter = 100;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    double grad_tol = 1e-10;
    int block_size_layers = 1;
    /// Sweeps without a relative improvement of more than 1e-3 before the
    /// stage parameters are re-randomized.
    int restart_patience = 200;
    int max_restarts = 5;
    /// Every joint_interval sweeps, all stage parameters are optimized
    /// together with up to joint_max_iter BFGS iterations. Zero disables it.
    int joint_interval = 50;
    int joint_max_iter = 500;
    std::uint64_t seed = 0;
    /// Start stages from all-zero angles instead of uniform random ones.
    bool zero_init = false;
    /// Visit blocks in a random order each sweep.
    bool shuffle_blocks = false;
    /// Wall-clock cap for one sweep run, in seconds.
    std::optional<double> time_limit_s;

    /// Throws std::invalid_argument unless 0 < c1 < c2 < 1, epsilon0 > 0 and
    /// the joint pass settings are non-negative.
    void validate() const;
};

/// Value and gradient at x. Must write a gradient of x's size.
using Objective = std::function<double(const RealVector& x, RealVector& grad)>;

enum class BfgsStatus { GradientConverged, TargetReached, MaxIterations, LineSearchFailed };

struct BfgsOptions {
    int max_iter = 100;
    double grad_tol = 1e-10;
    double c1 = 1e-4;
    double c2 = 0.9;
    /// Stop as soon as the value drops to or below this.
    double value_target = -std::numeric_limits<double>::infinity();
    int max_line_search = 40;
};

struct BfgsResult {
    RealVector x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    BfgsStatus status = BfgsStatus::MaxIterations;
};

/// Raised when the objective returns NaN or infinity.
class NonFiniteValue : public std::runtime_error {
  public:
    NonFiniteValue(const std::string& what, RealVector point)
        : std::runtime_error(what), point_(std::move(point)) {}
    const RealVector& point() const { return point_; }

  private:
    RealVector point_;
};

/// Quasi-Newton minimization with the BFGS inverse-Hessian update and a
/// strong-Wolfe line search. The returned value never exceeds the value at x0.
BfgsResult bfgs_minimize(const Objective& objective, const RealVector& x0, const BfgsOptions& options);

BfgsResult bfgs_minimize(const Objective& objective, const RealVector& x0, const OptimizerConfig& config,
                         int max_iter);

/// BFGS over the parameters of `block` with every other parameter frozen.
/// Returns the updated full parameter vector.
std::vector<double> optimize_block(const LayerSequence& sequence, const std::vector<double>& params,
                                   LayerRange block, const ComplexMatrix& u_initial,
                                   const OptimizerConfig& config);

struct SweepState {
    std::vector<double> params;
    double best_value = std::numeric_limits<double>::infinity();
    int sweep_count = 0;
    /// (sweep, best value so far) after each sweep; sweep 0 is the start.
    std::vector<std::pair<int, double>> value_history;
    int restarts_used = 0;
    bool converged = false;
    bool timed_out = false;
    std::int64_t block_optimizations = 0;
};

/// Uniform [0, 2 pi) or all-zero initial angles, per config.zero_init.
std::vector<double> initial_parameters(std::size_t count, const OptimizerConfig& config, RandomSource& rng);

/// Cyclic block-wise minimization of f_sub over one stage, starting from
/// `initial`. Stops at f_sub <= epsilon0, after max_sweeps, or when the
/// restart budget is spent; reports the best parameters seen.
SweepState sequential_sweep(const LayerSequence& sequence, std::vector<double> initial,
                            const ComplexMatrix& u_initial, const OptimizerConfig& config, RandomSource& rng);

}  // namespace usynth
