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
#include <vector>

#include "usynth/gates.hpp"
#include "usynth/numerics.hpp"
#include "usynth/structure.hpp"

namespace usynth {

/// The four quadrants of a 2^n x 2^n matrix with respect to its most
/// significant qubit; blocks[2 * i + j] is rows i, columns j.
struct BlockPartition {
    std::array<ComplexMatrix, 4> blocks;

    const ComplexMatrix& operator()(int i, int j) const { return blocks[static_cast<std::size_t>(2 * i + j)]; }
    ComplexMatrix reassemble() const;
};

BlockPartition partition_blocks(const ComplexMatrix& ubar);

/// (a b†)[0, 0]
Complex kappa(const ComplexMatrix& a, const ComplexMatrix& b);

/// Block-proportionality cost of the most significant qubit:
///   sum over all 16 ordered block pairs (ij, pq) of
///   || U_ij U_pq† - kappa_ij^pq I ||_F^2.
/// Zero iff ubar factors as A ⊗ B across the top qubit.
double f_sub(const ComplexMatrix& ubar);

/// f_sub plus its Wirtinger gradient: for any perturbation dU,
/// d f_sub = 2 Re <grad, dU> with <a, b> = Tr(a† b).
double f_sub_with_gradient(const ComplexMatrix& ubar, ComplexMatrix& grad);

/// f_sub and a tangent gradient for unitary ubar in O(4^n) work.
///
/// For unitary input sum_{ab} ||U_a U_b†||^2 = 2^{n+1}, so only the kappa
/// terms and the block inner products Tr(U_a U_b†) vary. The gradient omits
/// the constant term and is exact only along directions that keep ubar
/// unitary, which is all the stage optimizer ever moves along.
double f_sub_unitary_with_gradient(const ComplexMatrix& ubar, ComplexMatrix* grad);

struct CostReport {
    double value = 0.0;
    std::optional<RealVector> gradient;
};

/// The layers of a single stage on a register of n_qubits, with layer i
/// reading parameters [4 i, 4 i + 4).
struct LayerSequence {
    int n_qubits = 0;
    std::vector<Layer> layers;

    std::size_t param_count() const { return kParamsPerLayer * layers.size(); }
};

/// Stage s of `structure` on its reduced register (target + 1 qubits), with
/// parameter offsets rebased to the start of the stage.
LayerSequence stage_sequence(const GateStructure& structure, std::size_t stage);

/// Contiguous run of layers [first, first + count).
struct LayerRange {
    std::size_t first = 0;
    std::size_t count = 1;
};

/// Layer operator E · (U3 ⊗ U3) on {control, target}.
LocalOp layer_operator(const Layer& layer, std::span<const double> params);

/// Partial derivatives of the layer operator's local matrix with respect to
/// [theta_a, lambda_a, theta_b, lambda_b].
std::array<Mat4, 4> layer_operator_derivatives(const Layer& layer, std::span<const double> params);

/// Product of the template's gates in circuit order (later gates multiply
/// from the left). With stage_limit set, only the first stage_limit stages
/// are included and the closing rotations are omitted.
ComplexMatrix circuit_matrix(const GateStructure& structure, std::span<const double> params,
                             std::optional<std::size_t> stage_limit = std::nullopt);

/// Product of a layer sequence, L_N ··· L_1.
ComplexMatrix sequence_matrix(const LayerSequence& sequence, std::span<const double> params);

/// f_sub((layers) · u_initial) and its gradient with respect to the
/// parameters of the `active` layers only (gradient length 4 · active.count).
CostReport f_sub_gradient(const LayerSequence& sequence, std::span<const double> params,
                          const ComplexMatrix& u_initial, LayerRange active);

/// 1 - |Tr(C · u_initial)| / 2^n for the full circuit C, with the gradient
/// over every template parameter when requested.
CostReport fidelity_cost(const GateStructure& structure, std::span<const double> params,
                         const ComplexMatrix& u_initial, bool with_gradient = true);

/// Evaluation context for optimizing one block of layers at a time.
///
/// Caches the product of everything before the block (including the input
/// unitary) and everything after it. Moving the block forward by exactly its
/// own length updates the caches with sparse layer applications; any other
/// move rebuilds them.
class StageEvaluator {
  public:
    StageEvaluator(const LayerSequence& sequence, const ComplexMatrix& u_initial);

    const LayerSequence& sequence() const { return sequence_; }

    /// Selects the block and rebuilds or advances the caches for `params`.
    void focus(LayerRange block, std::span<const double> params);

    /// Drops the caches; the next focus() rebuilds from scratch.
    void invalidate() { focused_ = false; }

    LayerRange block() const { return block_; }

    /// f_sub with the focused block's parameters replaced by `block_params`
    /// (length 4 · block.count). Fills `grad` when non-null.
    double evaluate(std::span<const double> block_params, RealVector* grad);

  private:
    void rebuild(std::span<const double> params);

    LayerSequence sequence_;
    ComplexMatrix u_initial_;
    LayerRange block_{};
    bool focused_ = false;
    std::vector<double> committed_;  // parameters used to build the caches
    ComplexMatrix prefix_;           // layers before the block, times u_initial
    ComplexMatrix suffix_;           // layers after the block
    ComplexMatrix work_;
    ComplexMatrix ubar_;
    ComplexMatrix grad_;
    ComplexMatrix adj_;
    std::vector<ComplexMatrix> partials_;
};

}  // namespace usynth
