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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "usynth/decomposer.hpp"

namespace usynth {

/// Minimum CNOT count for a generic n-qubit unitary, ceil((4^n - 3n - 1) / 4).
/// Requires 1 <= n <= 31.
std::uint64_t cnot_lower_bound(int n_qubits);

struct SweepSpec {
    int n_qubits = 3;
    int layer_min = 1;
    int layer_max = 1;
    int layer_step = 1;
    int trials = 10;
    std::optional<Topology> topology;
    std::uint64_t seed = 0;
    GateKind entangler_kind = GateKind::CNOT;
    OptimizerConfig optimizer;
    /// Per-trial wall-clock cap; trials that hit it count as missing.
    double timeout_s = 600.0;
    int jobs = 1;

    /// Throws std::invalid_argument for an empty or inverted range, fewer than
    /// one trial, or a minimum below one disentangling period.
    void validate() const;
    std::vector<int> layer_counts() const;
};

struct SweepRow {
    int n_qubits = 0;
    int layers = 0;
    /// Best first-stage f_sub per trial; empty when the trial timed out.
    std::vector<std::optional<double>> eps;
    std::vector<double> seconds;
    std::optional<double> eps_mean;
    std::optional<double> eps_std;
    std::optional<double> seconds_mean;
};

/// Runs the first disentangling stage on `trials` Haar unitaries for every
/// layer count. Trial t draws its unitary and starting point from
/// derive_seed(seed, t), so every layer count sees the same targets.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// `n,layers,eps_mean,eps_std,seconds_mean` rows; missing values print as NA.
std::string sweep_csv(const std::vector<SweepRow>& rows, bool omit_timing);

/// Extra fields echoed into a decomposition report.
struct ReportContext {
    std::string input_path;
    std::string qasm_path;
    std::optional<std::string> topology_name;
    bool invert_input = false;
    bool omit_timing = false;
};

std::string decomposition_report_json(const DecompositionResult& result, const DecompositionConfig& config,
                                      const ReportContext& context);

/// Entry point behind the `usynth` executable. Returns the process exit code:
/// 0 on success, 2 when a decomposition did not converge or a verification
/// exceeded its threshold, 1 on any error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace usynth
