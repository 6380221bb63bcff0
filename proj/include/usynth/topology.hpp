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

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace usynth {

/// Directed coupling map over physical qubits plus the local relabeling used
/// by the synthesis.
///
/// Local qubit indices are assigned from the disentangle order: the first
/// physical qubit to be disentangled becomes local n-1, the next n-2 and so
/// on, so the synthesis can always disentangle the highest local index.
struct Topology {
    int n_physical = 0;
    /// Physical (control, target) pairs.
    std::vector<std::pair<int, int>> edges;
    /// Per edge: the reverse orientation is also allowed.
    std::vector<bool> bidirectional;
    /// relabel[local] = physical.
    std::vector<int> relabel;
    /// Local indices in the order they get disentangled (always n-1, ..., 0).
    std::vector<int> disentangle_order;

    int n_qubits() const { return static_cast<int>(relabel.size()); }

    /// Whether a gate with the given local control and target may be placed.
    bool allows(int control, int target) const;

    /// Whether two local qubits share an edge in any orientation.
    bool adjacent(int a, int b) const;

    /// True when every local pair is allowed in both orientations.
    bool fully_connected() const;

    /// Physical disentangle order (first disentangled first).
    std::vector<int> physical_order() const;

    /// Sub-topology on the last n qubits of the disentangle order, i.e. the
    /// register that remains after the leading qubits have been peeled off.
    Topology restricted(int n) const;

    /// All-to-all, bidirectional, identity relabeling.
    static Topology full(int n);

    /// Builds and validates a topology; `order` lists physical qubits in
    /// disentangle order. Throws std::invalid_argument on inconsistent input.
    static Topology make(int n_physical, std::vector<std::pair<int, int>> edges,
                         std::vector<bool> bidirectional, const std::vector<int>& order);
};

/// Parses the topology JSON schema:
///   {"n_physical": k, "edges": [[c,t],...], "bidirectional": bool,
///    "subset": [...], "disentangle_order": [...]}
/// Qubits in "subset" and "disentangle_order" are physical indices.
Topology parse_topology(std::string_view json_text);
Topology load_topology(const std::filesystem::path& path);
std::string topology_to_json(const Topology& topology);

/// Resolves a --topology argument: an existing file, or the name of a
/// shipped preset ("qx2", "heavy_hex4", with or without ".json").
std::filesystem::path resolve_topology_path(const std::string& name);

}  // namespace usynth
