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

#include "usynth/structure.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace usynth {

Layer make_layer(int a, int b, int control, int target, GateKind kind, std::size_t offset) {
    if (!is_two_qubit(kind)) {
        throw std::invalid_argument("layer entangler must be a two-qubit gate kind");
    }
    Layer layer;
    layer.qubit_a = a;
    layer.qubit_b = b;
    layer.gate_a = Gate::u3(a, offset, 2);
    layer.gate_b = Gate::u3(b, offset + 2, 2);
    layer.entangler = Gate::fixed(kind, target, control);
    return layer;
}

std::size_t GateStructure::layer_count() const {
    std::size_t n = 0;
    for (const auto& stage : stages) {
        n += stage.layers.size();
    }
    return n;
}

std::vector<int> GateStructure::layers_per_stage() const {
    std::vector<int> out;
    for (const auto& stage : stages) {
        out.push_back(static_cast<int>(stage.layers.size()));
    }
    return out;
}

std::size_t GateStructure::stage_param_offset(std::size_t s) const {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < s; ++i) {
        offset += kParamsPerLayer * stages.at(i).layers.size();
    }
    return offset;
}

Period build_full_period(int n_qubits, int target, GateKind kind) {
    if (n_qubits < 2) {
        throw std::invalid_argument("a disentangling period needs at least 2 qubits");
    }
    if (target < 0 || target >= n_qubits) {
        throw std::out_of_range("period target outside the register");
    }
    Period period;
    period.disentangle_target = target;
    std::size_t offset = 0;
    for (int partner = n_qubits - 1; partner >= 0; --partner) {
        if (partner == target) {
            continue;
        }
        period.layers.push_back(make_layer(target, partner, target, partner, kind, offset));
        offset += kParamsPerLayer;
    }
    return period;
}

Period build_topology_period(const Topology& topology, int target, const std::vector<int>& remaining,
                             GateKind kind) {
    std::set<int> members(remaining.begin(), remaining.end());
    members.erase(target);
    if (target < 0 || target >= topology.n_qubits()) {
        throw std::out_of_range("period target outside the topology");
    }
    for (int q : members) {
        if (q < 0 || q >= topology.n_qubits()) {
            throw std::out_of_range("period qubit outside the topology");
        }
    }
    Period period;
    period.disentangle_target = target;
    std::set<int> visited{target};
    std::deque<int> frontier{target};
    std::size_t offset = 0;
    while (!frontier.empty()) {
        const int parent = frontier.front();
        frontier.pop_front();
        // Descending order keeps full connectivity identical to build_full_period.
        for (auto it = members.rbegin(); it != members.rend(); ++it) {
            const int child = *it;
            if (visited.count(child) || !topology.adjacent(parent, child)) {
                continue;
            }
            visited.insert(child);
            frontier.push_back(child);
            const bool forward = topology.allows(parent, child);
            period.layers.push_back(make_layer(parent, child, forward ? parent : child,
                                               forward ? child : parent, kind, offset));
            offset += kParamsPerLayer;
        }
    }
    if (visited.size() != members.size() + 1) {
        throw std::invalid_argument("topology cannot disentangle target " + std::to_string(target) +
                                    ": the remaining qubits are not connected to it");
    }
    return period;
}

GateStructure assemble_structure(int n_qubits, const std::optional<Topology>& topology,
                                 const std::vector<int>& layers_per_stage, GateKind kind) {
    if (n_qubits < 1) {
        throw std::invalid_argument("structure needs at least one qubit");
    }
    if (static_cast<int>(layers_per_stage.size()) != n_qubits - 1) {
        throw std::invalid_argument("expected " + std::to_string(n_qubits - 1) + " layer counts, got " +
                                    std::to_string(layers_per_stage.size()));
    }
    GateStructure structure;
    structure.n_qubits = n_qubits;
    structure.kind = kind;
    if (topology) {
        if (topology->n_qubits() < n_qubits) {
            throw std::invalid_argument("topology provides " + std::to_string(topology->n_qubits()) +
                                        " qubits, need " + std::to_string(n_qubits));
        }
        structure.topology = topology->n_qubits() == n_qubits ? *topology : topology->restricted(n_qubits);
    }
    std::size_t offset = 0;
    for (int s = 0; s < n_qubits - 1; ++s) {
        const int target = n_qubits - 1 - s;
        std::vector<int> below;
        for (int q = target - 1; q >= 0; --q) {
            below.push_back(q);
        }
        const Period period = structure.topology ? build_topology_period(*structure.topology, target, below, kind)
                                                 : build_full_period(target + 1, target, kind);
        const int wanted = layers_per_stage[static_cast<std::size_t>(s)];
        if (wanted < static_cast<int>(period.layers.size())) {
            throw std::invalid_argument("stage for qubit " + std::to_string(target) + " needs at least " +
                                        std::to_string(period.layers.size()) + " layers (one period), got " +
                                        std::to_string(wanted));
        }
        Stage stage;
        stage.target = target;
        for (int i = 0; i < wanted; ++i) {
            const Layer& proto = period.layers[static_cast<std::size_t>(i) % period.layers.size()];
            stage.layers.push_back(make_layer(proto.qubit_a, proto.qubit_b, *proto.entangler.control,
                                              proto.entangler.target, kind, offset));
            offset += kParamsPerLayer;
        }
        structure.stages.push_back(std::move(stage));
    }
    for (int q = 0; q < n_qubits; ++q) {
        structure.closing_rotations.push_back(Gate::u3(q, offset, 3));
        offset += kParamsPerClosingRotation;
    }
    structure.total_params = offset;
    return structure;
}

std::vector<int> default_layer_counts(int n_qubits, TopologyClass topology_class) {
    if (topology_class == TopologyClass::Full) {
        switch (n_qubits) {
            case 2: return {3};
            case 3: return {12, 3};
            case 4: return {48, 12, 3};
            case 5: return {204, 48, 12, 3};
            default: break;
        }
    } else {
        switch (n_qubits) {
            case 2: return {3};
            case 3: return {14, 3};
            case 4: return {54, 14, 3};
            default: break;
        }
    }
    throw std::invalid_argument("no default layer counts for " + std::to_string(n_qubits) +
                                " qubits on this topology class");
}

std::vector<Violation> validate_structure(const GateStructure& structure, const Topology& topology) {
    std::vector<Violation> out;
    if (topology.n_qubits() < structure.n_qubits) {
        out.push_back({0, 0, "topology has fewer qubits than the structure"});
        return out;
    }
    const Topology& topo =
        topology.n_qubits() == structure.n_qubits ? topology : topology.restricted(structure.n_qubits);
    for (std::size_t s = 0; s < structure.stages.size(); ++s) {
        const auto& layers = structure.stages[s].layers;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const Gate& e = layers[l].entangler;
            if (!topo.allows(*e.control, e.target)) {
                out.push_back({s, l,
                               "stage " + std::to_string(s) + " layer " + std::to_string(l) + ": " +
                                   std::string(gate_kind_name(e.kind)) + " q" + std::to_string(*e.control) +
                                   "->q" + std::to_string(e.target) + " (physical " +
                                   std::to_string(topo.relabel[static_cast<std::size_t>(*e.control)]) + "->" +
                                   std::to_string(topo.relabel[static_cast<std::size_t>(e.target)]) +
                                   ") is not an allowed edge"});
            }
        }
    }
    return out;
}

}  // namespace usynth
