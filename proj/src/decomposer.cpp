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

#include "usynth/decomposer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace usynth {

std::vector<int> resolve_layer_counts(int n_qubits, const DecompositionConfig& config) {
    if (!config.layer_counts.empty()) {
        if (static_cast<int>(config.layer_counts.size()) != n_qubits - 1) {
            throw std::invalid_argument("expected " + std::to_string(n_qubits - 1) + " layer counts for " +
                                        std::to_string(n_qubits) + " qubits, got " +
                                        std::to_string(config.layer_counts.size()));
        }
        return config.layer_counts;
    }
    const bool sparse = config.topology && !config.topology->restricted(n_qubits).fully_connected();
    return default_layer_counts(n_qubits, sparse ? TopologyClass::Qx2 : TopologyClass::Full);
}

StageOutcome disentangle_qubit(const ComplexMatrix& u, const LayerSequence& stage, const DecompositionConfig& config,
                               RandomSource& rng) {
    std::vector<double> init = initial_parameters(stage.param_count(), config.optimizer, rng);
    SweepState sweep = sequential_sweep(stage, std::move(init), u, config.optimizer, rng);
    StageOutcome out;
    out.ubar = sequence_matrix(stage, sweep.params) * u;
    out.result.target = stage.n_qubits - 1;
    out.result.layers_used = static_cast<int>(stage.layers.size());
    out.result.final_f_sub = sweep.best_value;
    out.result.converged = sweep.converged;
    out.result.sweeps = sweep.sweep_count;
    out.result.restarts = sweep.restarts_used;
    out.result.timed_out = sweep.timed_out;
    out.params = std::move(sweep.params);
    return out;
}

SubunitaryExtraction extract_subunitary(const ComplexMatrix& ubar) {
    const BlockPartition blocks = partition_blocks(ubar);
    int best = 0;
    double best_kappa = -1.0;
    for (int a = 0; a < 4; ++a) {
        const double k = kappa(blocks.blocks[static_cast<std::size_t>(a)],
                               blocks.blocks[static_cast<std::size_t>(a)]).real();
        if (k > best_kappa) {
            best_kappa = k;
            best = a;
        }
    }
    if (best_kappa < 1e-12) {
        throw std::domain_error("extract_subunitary: all diagonal kappa values vanish");
    }
    SubunitaryExtraction out;
    out.sub_unitary = blocks.blocks[static_cast<std::size_t>(best)] / std::sqrt(best_kappa);
    const double h = static_cast<double>(out.sub_unitary.rows());
    out.residual_1q.resize(2, 2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.residual_1q(i, j) = (blocks(i, j) * out.sub_unitary.adjoint()).trace() / h;
        }
    }
    return out;
}

DecompositionResult decompose(const ComplexMatrix& u, const DecompositionConfig& config, RandomSource& rng) {
    const auto start = std::chrono::steady_clock::now();
    const int n = qubit_count(u);
    if (n < 2 || n > 5) {
        throw std::invalid_argument("decompose: supports 2 to 5 qubits, got " + std::to_string(n));
    }
    if (unitarity_defect(u) > 1e-8) {
        throw std::invalid_argument("decompose: input matrix is not unitary");
    }
    config.optimizer.validate();

    DecompositionResult result;
    result.seed = rng.seed();
    result.structure = assemble_structure(n, config.topology, resolve_layer_counts(n, config), config.entangler_kind);
    result.params.assign(result.structure.total_params, 0.0);
    result.cnot_count = static_cast<int>(result.structure.two_qubit_gate_count());

    std::vector<ComplexMatrix> residuals(static_cast<std::size_t>(n));
    ComplexMatrix current = u;
    result.converged = true;
    for (std::size_t s = 0; s < result.structure.stages.size(); ++s) {
        const LayerSequence seq = stage_sequence(result.structure, s);
        StageOutcome stage = disentangle_qubit(current, seq, config, rng);
        std::copy(stage.params.begin(), stage.params.end(),
                  result.params.begin() + static_cast<std::ptrdiff_t>(result.structure.stage_param_offset(s)));
        const SubunitaryExtraction parts = extract_subunitary(stage.ubar);
        stage.result.sub_unitary = nearest_unitary(parts.sub_unitary);
        stage.result.residual_1q = nearest_unitary(parts.residual_1q);
        residuals[static_cast<std::size_t>(stage.result.target)] = stage.result.residual_1q;
        current = stage.result.sub_unitary;
        result.converged = result.converged && stage.result.converged;
        result.stages.push_back(std::move(stage.result));
    }
    residuals[0] = current;

    for (const Gate& g : result.structure.closing_rotations) {
        const U3Angles a = u3_params_from_2x2(residuals[static_cast<std::size_t>(g.target)].adjoint());
        result.params[g.param_offset] = a.theta;
        result.params[g.param_offset + 1] = a.phi;
        result.params[g.param_offset + 2] = a.lambda;
    }

    result.fidelity_cost_initial = fidelity_cost(result.structure, result.params, u, false).value;
    result.fidelity_cost = result.fidelity_cost_initial;
    if (config.fine_tune && config.fine_tune_max_iter > 0) {
        const GateStructure& structure = result.structure;
        const Objective objective = [&structure, &u](const RealVector& x, RealVector& grad) {
            CostReport r = fidelity_cost(structure, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                                         u, true);
            grad = std::move(*r.gradient);
            return r.value;
        };
        BfgsOptions options;
        options.max_iter = config.fine_tune_max_iter;
        options.grad_tol = 1e-15;
        options.c1 = config.optimizer.wolfe_c1;
        options.c2 = config.optimizer.wolfe_c2;
        const RealVector x0 = Eigen::Map<const RealVector>(result.params.data(),
                                                           static_cast<Eigen::Index>(result.params.size()));
        const BfgsResult tuned = bfgs_minimize(objective, x0, options);
        if (tuned.value <= result.fidelity_cost) {
            result.params.assign(tuned.x.data(), tuned.x.data() + tuned.x.size());
            result.fidelity_cost = tuned.value;
        }
    }

    result.spectral_error = spectral_error(u.adjoint(), circuit_matrix(result.structure, result.params));
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

VerifyReport verify(const DecompositionResult& result, const ComplexMatrix& u) {
    VerifyReport report;
    const ComplexMatrix c = circuit_matrix(result.structure, result.params);
    report.spectral_error = spectral_error(u.adjoint(), c);
    report.fidelity_cost = fidelity_cost(result.structure, result.params, u, false).value;
    ComplexMatrix current = u;
    for (std::size_t s = 0; s < result.structure.stages.size(); ++s) {
        const LayerSequence seq = stage_sequence(result.structure, s);
        const std::size_t offset = result.structure.stage_param_offset(s);
        const std::span<const double> stage_params(result.params.data() + offset, seq.param_count());
        const ComplexMatrix ubar = sequence_matrix(seq, stage_params) * current;
        report.stage_f_sub.push_back(f_sub(ubar));
        current = nearest_unitary(extract_subunitary(ubar).sub_unitary);
    }
    if (result.structure.topology) {
        report.violations = validate_structure(result.structure, *result.structure.topology);
    }
    return report;
}

}  // namespace usynth
