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

#include <optional>
#include <string>
#include <vector>

#include "usynth/cost.hpp"
#include "usynth/optimizer.hpp"
#include "usynth/structure.hpp"

namespace usynth {

struct DecompositionConfig {
    OptimizerConfig optimizer;
    /// Layers per stage, first stage first; empty selects default_layer_counts.
    std::vector<int> layer_counts;
    std::optional<Topology> topology;
    GateKind entangler_kind = GateKind::CNOT;
    bool fine_tune = true;
    int fine_tune_max_iter = 2500;
};

struct StageResult {
    int target = 0;
    int layers_used = 0;
    double final_f_sub = 0.0;
    bool converged = false;
    int sweeps = 0;
    int restarts = 0;
    bool timed_out = false;
    /// Unitary handed to the next stage (2^target x 2^target).
    ComplexMatrix sub_unitary;
    /// Single-qubit factor left on the disentangled qubit.
    ComplexMatrix residual_1q;
};

struct DecompositionResult {
    GateStructure structure;
    std::vector<double> params;
    std::vector<StageResult> stages;
    /// Spectral error of the circuit against u† (global phase removed).
    double spectral_error = 0.0;
    double fidelity_cost = 0.0;
    /// Fidelity cost before fine tuning.
    double fidelity_cost_initial = 0.0;
    int cnot_count = 0;
    double wall_time = 0.0;
    std::uint64_t seed = 0;
    /// Every stage reached epsilon0.
    bool converged = false;
};

struct StageOutcome {
    std::vector<double> params;
    ComplexMatrix ubar;
    StageResult result;
};

/// Runs the block sweep for one stage. `stage` holds the stage's layers on a
/// register matching u.
StageOutcome disentangle_qubit(const ComplexMatrix& u, const LayerSequence& stage, const DecompositionConfig& config,
                               RandomSource& rng);

struct SubunitaryExtraction {
    ComplexMatrix sub_unitary;
    ComplexMatrix residual_1q;
};

/// Splits ubar ≈ A ⊗ V across its top qubit. V is the block with the largest
/// kappa_ij^ij, divided by its square root; A_ij = Tr(U_ij V†) / 2^{n-1}.
/// Throws std::domain_error if every diagonal kappa is below 1e-12.
SubunitaryExtraction extract_subunitary(const ComplexMatrix& ubar);

/// Synthesizes a circuit C with C · u = e^{i phi} I, i.e. C realizes u†.
DecompositionResult decompose(const ComplexMatrix& u, const DecompositionConfig& config, RandomSource& rng);

/// Layer counts for `config`, falling back to the defaults for the register
/// size and topology.
std::vector<int> resolve_layer_counts(int n_qubits, const DecompositionConfig& config);

struct VerifyReport {
    double spectral_error = 0.0;
    double fidelity_cost = 0.0;
    std::vector<double> stage_f_sub;
    std::vector<Violation> violations;
};

/// Recomputes the error metrics of a result from scratch.
VerifyReport verify(const DecompositionResult& result, const ComplexMatrix& u);

}  // namespace usynth
