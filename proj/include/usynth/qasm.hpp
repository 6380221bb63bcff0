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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usynth/numerics.hpp"
#include "usynth/structure.hpp"

namespace usynth {

struct QasmOptions {
    /// Expand `ch` into the qelib1 header's own definition
    /// (h, sdg, cx, t, s, x) instead of emitting `ch` directly.
    bool strict_qelib1 = false;
};

/// OpenQASM 2.0 text for the template with the given parameters, gates in
/// circuit order. With a topology the register is the physical device and a
/// `// layout:` comment records local -> physical qubits.
std::string to_qasm(const GateStructure& structure, std::span<const double> params, const QasmOptions& options = {});

struct QasmGate {
    std::string name;
    std::vector<double> params;
    std::vector<int> qubits;
};

struct QasmCircuit {
    int register_size = 0;
    std::vector<QasmGate> gates;
    /// layout[local] = register index; empty means identity.
    std::vector<int> layout;

    int logical_qubits() const { return layout.empty() ? register_size : static_cast<int>(layout.size()); }
};

/// Parses the subset of OpenQASM 2.0 the exporter produces: one qreg, the
/// gates u3, u2, u1, cx, cz, ch, h, x, s, sdg, t, tdg, and angle expressions
/// over numbers and pi. Throws ParseError on anything else.
QasmCircuit parse_qasm(std::string_view text);

/// Circuit unitary on the logical register (local qubit q is index bit q).
ComplexMatrix qasm_matrix(const QasmCircuit& circuit);

}  // namespace usynth
