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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "usynth/gates.hpp"
#include "usynth/topology.hpp"

namespace usynth {

/// Two 2-parameter U3 rotations followed by one fixed two-qubit gate on the
/// pair {qubit_a, qubit_b}. Parameters are laid out as
/// [theta_a, lambda_a, theta_b, lambda_b] starting at gate_a.param_offset.
struct Layer {
    int qubit_a = 0;
    int qubit_b = 0;
    Gate gate_a;
    Gate gate_b;
    Gate entangler;

    std::size_t param_offset() const { return gate_a.param_offset; }
};

inline constexpr std::size_t kParamsPerLayer = 4;
inline constexpr std::size_t kParamsPerClosingRotation = 3;

/// Layer on (a, b) with the entangler oriented control -> target; parameter
/// offset `offset`.
Layer make_layer(int a, int b, int control, int target, GateKind kind, std::size_t offset);

/// Shortest repeating layer sequence of one disentangling stage.
struct Period {
    std::vector<Layer> layers;
    int disentangle_target = 0;
};

/// Layers that disentangle `target` from the qubits below it. Layer
/// parameter offsets are absolute within the owning GateStructure.
struct Stage {
    int target = 0;
    std::vector<Layer> layers;
};

/// Full decomposing template: stages for targets n-1 down to 1, then one
/// 3-parameter U3 per qubit.
struct GateStructure {
    int n_qubits = 0;
    GateKind kind = GateKind::CNOT;
    std::vector<Stage> stages;
    std::vector<Gate> closing_rotations;
    std::size_t total_params = 0;
    std::optional<Topology> topology;

    std::size_t layer_count() const;
    std::size_t two_qubit_gate_count() const { return layer_count(); }
    std::vector<int> layers_per_stage() const;
    /// First parameter index of stage s.
    std::size_t stage_param_offset(std::size_t s) const;
    std::size_t stage_param_count(std::size_t s) const { return kParamsPerLayer * stages.at(s).layers.size(); }
};

/// Full connectivity period: one layer per partner qubit, partners in
/// descending index order, entangler controlled by the target.
Period build_full_period(int n_qubits, int target, GateKind kind = GateKind::CNOT);

/// Period on a sparse topology (local indices). Layers follow the
/// breadth-first spanning tree of the subgraph induced on
/// {target} ∪ remaining, rooted at target; each layer couples a qubit to its
/// BFS parent, so qubits without a direct edge to the target are reached
/// through mediators. Entanglers use a hardware allowed orientation,
/// preferring the parent as control. Throws std::invalid_argument if the
/// subgraph is disconnected.
Period build_topology_period(const Topology& topology, int target, const std::vector<int>& remaining,
                             GateKind kind = GateKind::CNOT);

/// Assembles the template. layers_per_stage[s] is the layer count for target
/// n-1-s; periods are repeated and the last one truncated to reach it. A
/// topology with more qubits than n_qubits is restricted to its last
/// n_qubits in disentangle order.
GateStructure assemble_structure(int n_qubits, const std::optional<Topology>& topology,
                                 const std::vector<int>& layers_per_stage,
                                 GateKind kind = GateKind::CNOT);

enum class TopologyClass { Full, Qx2, HeavyHex };

/// Stage layer counts known to reach full precision.
std::vector<int> default_layer_counts(int n_qubits, TopologyClass topology_class);

struct Violation {
    std::size_t stage = 0;
    std::size_t layer = 0;
    std::string message;
};

/// One entry per two-qubit gate that does not map onto an allowed directed
/// edge of `topology`.
std::vector<Violation> validate_structure(const GateStructure& structure, const Topology& topology);

}  // namespace usynth
