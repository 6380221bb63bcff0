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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

namespace usynth {

void OptimizerConfig::validate() const {
    if (!(wolfe_c1 > 0.0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
        throw std::invalid_argument("optimizer: need 0 < wolfe_c1 < wolfe_c2 < 1");
    }
    if (!(epsilon0 > 0.0)) {
        throw std::invalid_argument("optimizer: epsilon0 must be positive");
    }
    if (block_size_layers < 1 || bfgs_max_iter < 1 || max_sweeps < 0 || restart_patience < 1 ||
        max_restarts < 0 || joint_interval < 0 || joint_max_iter < 0) {
        throw std::invalid_argument("optimizer: iteration limits must be positive");
    }
}

namespace {

struct Trial {
    double alpha = 0.0;
    double f = 0.0;
    double slope = 0.0;
    RealVector x;
    RealVector g;
};

class LineSearch {
  public:
    LineSearch(const Objective& objective, const RealVector& x, double f0, const RealVector& g0,
               const RealVector& dir, const BfgsOptions& options, int& evaluations)
        : objective_(objective), x_(x), f0_(f0), dir_(dir), options_(options), evaluations_(evaluations) {
        slope0_ = g0.dot(dir);
    }

    // Strong-Wolfe search (bracketing then zoom). Returns the accepted trial,
    // or the best sufficient-decrease point if the conditions could not be
    // met within the evaluation budget.
    std::optional<Trial> run(double alpha_init) {
        Trial prev;
        prev.alpha = 0.0;
        prev.f = f0_;
        prev.slope = slope0_;
        double alpha = alpha_init;
        for (int i = 0; i < options_.max_line_search; ++i) {
            Trial cur = eval(alpha);
            if (cur.f > f0_ + options_.c1 * alpha * slope0_ || (i > 0 && cur.f >= prev.f)) {
                return zoom(prev, cur);
            }
            if (std::abs(cur.slope) <= -options_.c2 * slope0_) {
                return cur;
            }
            if (cur.slope >= 0.0) {
                return zoom(cur, prev);
            }
            prev = std::move(cur);
            alpha *= 2.0;
        }
        return fallback();
    }

  private:
    Trial eval(double alpha) {
        Trial t;
        t.alpha = alpha;
        t.x = x_ + alpha * dir_;
        t.g.resize(t.x.size());
        t.f = objective_(t.x, t.g);
        ++evaluations_;
        if (!std::isfinite(t.f)) {
            throw NonFiniteValue("objective returned a non-finite value", t.x);
        }
        t.slope = t.g.dot(dir_);
        if (t.f <= f0_ + options_.c1 * alpha * slope0_ && t.f < f0_ && (!best_ || t.f < best_->f)) {
            best_ = t;
        }
        return t;
    }

    static double cubic_minimizer(const Trial& a, const Trial& b) {
        const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
        const double disc = d1 * d1 - a.slope * b.slope;
        if (disc < 0.0) {
            return 0.5 * (a.alpha + b.alpha);
        }
        const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
        const double denom = b.slope - a.slope + 2.0 * d2;
        if (denom == 0.0) {
            return 0.5 * (a.alpha + b.alpha);
        }
        return b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
    }

    std::optional<Trial> zoom(Trial lo, Trial hi) {
        for (int i = 0; i < options_.max_line_search; ++i) {
            const double left = std::min(lo.alpha, hi.alpha);
            const double right = std::max(lo.alpha, hi.alpha);
            const double width = right - left;
            if (width <= 1e-16 * std::max(1.0, right)) {
                break;
            }
            double alpha = cubic_minimizer(lo, hi);
            if (!std::isfinite(alpha)) {
                alpha = 0.5 * (left + right);
            }
            alpha = std::clamp(alpha, left + 0.1 * width, right - 0.1 * width);
            Trial cur = eval(alpha);
            if (cur.f > f0_ + options_.c1 * alpha * slope0_ || cur.f >= lo.f) {
                hi = std::move(cur);
            } else {
                if (std::abs(cur.slope) <= -options_.c2 * slope0_) {
                    return cur;
                }
                if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) {
                    hi = lo;
                }
                lo = std::move(cur);
            }
        }
        return fallback();
    }

    std::optional<Trial> fallback() { return best_; }

    const Objective& objective_;
    const RealVector& x_;
    double f0_;
    const RealVector& dir_;
    const BfgsOptions& options_;
    int& evaluations_;
    double slope0_ = 0.0;
    std::optional<Trial> best_;
};

}  // namespace

BfgsResult bfgs_minimize(const Objective& objective, const RealVector& x0, const BfgsOptions& options) {
    BfgsResult result;
    result.x = x0;
    RealVector g(x0.size());
    result.value = objective(result.x, g);
    result.evaluations = 1;
    if (!std::isfinite(result.value)) {
        throw NonFiniteValue("objective returned a non-finite value at the starting point", x0);
    }
    const Eigen::Index n = x0.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    bool scaled = false;
    for (;;) {
        if (result.value <= options.value_target) {
            result.status = BfgsStatus::TargetReached;
            return result;
        }
        if (n == 0 || g.lpNorm<Eigen::Infinity>() < options.grad_tol) {
            result.status = BfgsStatus::GradientConverged;
            return result;
        }
        if (result.iterations >= options.max_iter) {
            result.status = BfgsStatus::MaxIterations;
            return result;
        }
        RealVector dir = -(h * g);
        if (dir.dot(g) >= 0.0) {
            h.setIdentity();
            dir = -g;
        }
        const double alpha0 = scaled ? 1.0 : std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>());
        LineSearch search(objective, result.x, result.value, g, dir, options, result.evaluations);
        std::optional<Trial> step = search.run(alpha0);
        if (!step) {
            result.status = BfgsStatus::LineSearchFailed;
            return result;
        }
        const RealVector s = step->x - result.x;
        const RealVector y = step->g - g;
        result.x = std::move(step->x);
        g = std::move(step->g);
        result.value = step->f;
        ++result.iterations;

        const double sy = s.dot(y);
        if (sy > 1e-14 * s.norm() * y.norm() && sy > 0.0) {
            if (!scaled) {
                h *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const RealVector hy = h * y;
            const double yhy = y.dot(hy);
            // (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded.
            h.noalias() += (rho * rho * yhy + rho) * (s * s.transpose()) -
                           rho * (hy * s.transpose() + s * hy.transpose());
        } else {
            h.setIdentity();
            scaled = false;
        }
    }
}

BfgsResult bfgs_minimize(const Objective& objective, const RealVector& x0, const OptimizerConfig& config,
                         int max_iter) {
    BfgsOptions options;
    options.max_iter = max_iter;
    options.grad_tol = config.grad_tol;
    options.c1 = config.wolfe_c1;
    options.c2 = config.wolfe_c2;
    return bfgs_minimize(objective, x0, options);
}

namespace {

LayerRange block_range(std::size_t index, std::size_t block_size, std::size_t layers) {
    const std::size_t first = index * block_size;
    return {first, std::min(block_size, layers - first)};
}

// Runs BFGS on the focused block and writes the result back into params.
double minimize_focused(StageEvaluator& eval, std::vector<double>& params, const BfgsOptions& options) {
    const LayerRange block = eval.block();
    const std::size_t base = kParamsPerLayer * block.first;
    const auto count = static_cast<Eigen::Index>(kParamsPerLayer * block.count);
    RealVector x0 = Eigen::Map<const RealVector>(params.data() + base, count);
    const Objective objective = [&eval](const RealVector& x, RealVector& grad) {
        return eval.evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), &grad);
    };
    const BfgsResult r = bfgs_minimize(objective, x0, options);
    std::copy(r.x.data(), r.x.data() + count, params.begin() + static_cast<std::ptrdiff_t>(base));
    return r.value;
}

BfgsOptions block_options(const OptimizerConfig& config) {
    BfgsOptions options;
    options.max_iter = config.bfgs_max_iter;
    options.grad_tol = config.grad_tol;
    options.c1 = config.wolfe_c1;
    options.c2 = config.wolfe_c2;
    return options;
}

}  // namespace

std::vector<double> optimize_block(const LayerSequence& sequence, const std::vector<double>& params,
                                   LayerRange block, const ComplexMatrix& u_initial,
                                   const OptimizerConfig& config) {
    config.validate();
    StageEvaluator eval(sequence, u_initial);
    eval.focus(block, params);
    std::vector<double> out = params;
    minimize_focused(eval, out, block_options(config));
    return out;
}

std::vector<double> initial_parameters(std::size_t count, const OptimizerConfig& config, RandomSource& rng) {
    std::vector<double> params(count, 0.0);
    if (!config.zero_init) {
        for (double& p : params) {
            p = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
    }
    return params;
}

SweepState sequential_sweep(const LayerSequence& sequence, std::vector<double> initial,
                            const ComplexMatrix& u_initial, const OptimizerConfig& config, RandomSource& rng) {
    config.validate();
    if (initial.size() != sequence.param_count()) {
        throw std::invalid_argument("sequential_sweep: expected " + std::to_string(sequence.param_count()) +
                                    " initial parameters");
    }
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const auto out_of_time = [&] {
        return config.time_limit_s &&
               std::chrono::duration<double>(Clock::now() - start).count() > *config.time_limit_s;
    };

    const std::size_t layers = sequence.layers.size();
    const auto block_size = static_cast<std::size_t>(config.block_size_layers);
    const std::size_t n_blocks = (layers + block_size - 1) / block_size;
    BfgsOptions options = block_options(config);
    options.value_target = config.epsilon0;
    BfgsOptions joint_options = options;
    joint_options.max_iter = config.joint_max_iter;

    SweepState state;
    state.params = std::move(initial);
    StageEvaluator eval(sequence, u_initial);

    const auto evaluate_current = [&] {
        eval.focus(block_range(0, block_size, layers), state.params);
        const LayerRange b = eval.block();
        return eval.evaluate(
            std::span<const double>(state.params).subspan(kParamsPerLayer * b.first, kParamsPerLayer * b.count),
            nullptr);
    };

    std::vector<double> params = state.params;
    double current = evaluate_current();
    state.best_value = current;
    state.value_history.emplace_back(0, current);
    if (current <= config.epsilon0) {
        state.converged = true;
        return state;
    }
    double reference = current;
    int reference_sweep = 0;
    std::vector<std::size_t> order(n_blocks);
    for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        if (config.shuffle_blocks) {
            for (std::size_t i = n_blocks; i > 1; --i) {
                std::swap(order[i - 1], order[rng.next_u64() % i]);
            }
        }
        for (std::size_t k : order) {
            eval.focus(block_range(k, block_size, layers), params);
            current = minimize_focused(eval, params, options);
            ++state.block_optimizations;
            if (current < state.best_value) {
                state.best_value = current;
                state.params = params;
            }
            if (current <= config.epsilon0) {
                state.converged = true;
                break;
            }
            if (out_of_time()) {
                state.timed_out = true;
                break;
            }
        }
        if (!state.converged && !state.timed_out && config.joint_interval > 0 &&
            sweep % config.joint_interval == 0) {
            eval.focus(LayerRange{0, layers}, params);
            current = minimize_focused(eval, params, joint_options);
            if (current < state.best_value) {
                state.best_value = current;
                state.params = params;
            }
            state.converged = current <= config.epsilon0;
            state.timed_out = !state.converged && out_of_time();
        }
        state.sweep_count = sweep;
        state.value_history.emplace_back(sweep, state.best_value);
        if (state.converged || state.timed_out) {
            break;
        }
        if (current < reference * (1.0 - 1e-3)) {
            reference = current;
            reference_sweep = sweep;
        } else if (sweep - reference_sweep >= config.restart_patience) {
            if (state.restarts_used >= config.max_restarts) {
                break;
            }
            ++state.restarts_used;
            params = initial_parameters(params.size(), OptimizerConfig{}, rng);
            eval.invalidate();
            eval.focus(block_range(0, block_size, layers), params);
            const LayerRange b = eval.block();
            current = eval.evaluate(
                std::span<const double>(params).subspan(kParamsPerLayer * b.first, kParamsPerLayer * b.count),
                nullptr);
            reference = current;
            reference_sweep = sweep;
        }
    }
    return state;
}

}  // namespace usynth
