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

#include "usynth/topology.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "usynth/io.hpp"

namespace usynth {

bool Topology::allows(int control, int target) const {
    if (control < 0 || target < 0 || control >= n_qubits() || target >= n_qubits() || control == target) {
        return false;
    }
    const int pc = relabel[control];
    const int pt = relabel[target];
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].first == pc && edges[e].second == pt) {
            return true;
        }
        if (bidirectional[e] && edges[e].first == pt && edges[e].second == pc) {
            return true;
        }
    }
    return false;
}

bool Topology::adjacent(int a, int b) const {
    return allows(a, b) || allows(b, a);
}

bool Topology::fully_connected() const {
    for (int a = 0; a < n_qubits(); ++a) {
        for (int b = 0; b < n_qubits(); ++b) {
            if (a != b && !allows(a, b)) {
                return false;
            }
        }
    }
    return true;
}

std::vector<int> Topology::physical_order() const {
    std::vector<int> order;
    order.reserve(disentangle_order.size());
    for (int local : disentangle_order) {
        order.push_back(relabel[local]);
    }
    return order;
}

Topology Topology::restricted(int n) const {
    if (n < 1 || n > n_qubits()) {
        throw std::invalid_argument("topology has " + std::to_string(n_qubits()) +
                                    " qubits, cannot restrict to " + std::to_string(n));
    }
    const std::vector<int> order = physical_order();
    return make(n_physical, edges, bidirectional,
                std::vector<int>(order.end() - n, order.end()));
}

Topology Topology::full(int n) {
    if (n < 1) {
        throw std::invalid_argument("topology needs at least one qubit");
    }
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            edges.emplace_back(b, a);
        }
    }
    std::vector<int> order;
    for (int q = n - 1; q >= 0; --q) {
        order.push_back(q);
    }
    return make(n, std::move(edges), std::vector<bool>(static_cast<std::size_t>(n) * (n - 1) / 2, true),
                order);
}

Topology Topology::make(int n_physical, std::vector<std::pair<int, int>> edges,
                        std::vector<bool> bidirectional, const std::vector<int>& order) {
    if (n_physical < 1) {
        throw std::invalid_argument("topology: n_physical must be positive");
    }
    if (bidirectional.size() != edges.size()) {
        throw std::invalid_argument("topology: one orientation flag per edge required");
    }
    for (const auto& [c, t] : edges) {
        if (c < 0 || t < 0 || c >= n_physical || t >= n_physical || c == t) {
            throw std::invalid_argument("topology: invalid edge [" + std::to_string(c) + "," +
                                        std::to_string(t) + "]");
        }
    }
    if (order.empty()) {
        throw std::invalid_argument("topology: empty disentangle order");
    }
    std::set<int> seen;
    for (int q : order) {
        if (q < 0 || q >= n_physical || !seen.insert(q).second) {
            throw std::invalid_argument("topology: disentangle order must list distinct physical qubits");
        }
    }
    Topology t;
    t.n_physical = n_physical;
    t.edges = std::move(edges);
    t.bidirectional = std::move(bidirectional);
    const int n = static_cast<int>(order.size());
    t.relabel.assign(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n; ++k) {
        t.relabel[static_cast<std::size_t>(n - 1 - k)] = order[static_cast<std::size_t>(k)];
        t.disentangle_order.push_back(n - 1 - k);
    }
    if (n >= 2 && !t.adjacent(1, 0)) {
        throw std::invalid_argument("topology: the last two qubits of the disentangle order (" +
                                    std::to_string(t.relabel[1]) + ", " + std::to_string(t.relabel[0]) +
                                    ") must share an edge");
    }
    return t;
}

Topology parse_topology(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("topology: ") + e.what());
    }
    try {
        const int n_physical = j.at("n_physical").get<int>();
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw ParseError("topology: each edge must be a [control, target] pair");
            }
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        const bool bidir = j.value("bidirectional", false);
        std::vector<int> order = j.at("disentangle_order").get<std::vector<int>>();
        if (j.contains("subset")) {
            auto subset = j.at("subset").get<std::vector<int>>();
            auto sorted_order = order;
            std::sort(subset.begin(), subset.end());
            std::sort(sorted_order.begin(), sorted_order.end());
            if (subset != sorted_order) {
                throw ParseError("topology: disentangle_order must be a permutation of subset");
            }
        }
        return Topology::make(n_physical, std::move(edges), std::vector<bool>(j.at("edges").size(), bidir),
                              order);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("topology: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

Topology load_topology(const std::filesystem::path& path) {
    return parse_topology(read_text_file(path));
}

std::string topology_to_json(const Topology& topology) {
    nlohmann::json j;
    j["n_physical"] = topology.n_physical;
    j["edges"] = nlohmann::json::array();
    bool all_bidir = true;
    for (std::size_t e = 0; e < topology.edges.size(); ++e) {
        j["edges"].push_back({topology.edges[e].first, topology.edges[e].second});
        all_bidir = all_bidir && topology.bidirectional[e];
    }
    j["bidirectional"] = all_bidir;
    auto subset = topology.relabel;
    std::sort(subset.begin(), subset.end());
    j["subset"] = subset;
    j["disentangle_order"] = topology.physical_order();
    return j.dump();
}

std::filesystem::path resolve_topology_path(const std::string& name) {
    namespace fs = std::filesystem;
    if (fs::exists(name)) {
        return name;
    }
    fs::path preset = fs::path(USYNTH_DATA_DIR) / "topologies" / name;
    if (preset.extension() != ".json") {
        preset += ".json";
    }
    if (fs::exists(preset)) {
        return preset;
    }
    throw std::invalid_argument("topology '" + name + "' is neither a file nor a shipped preset");
}

}  // namespace usynth
