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

#include "usynth/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "usynth/io.hpp"
#include "usynth/qasm.hpp"

namespace usynth {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kInputUnitarityTol = 1e-8;

class CliError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace

std::uint64_t cnot_lower_bound(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 31) {
        throw std::out_of_range("cnot_lower_bound: n must be in 1..31");
    }
    const std::uint64_t numerator = (std::uint64_t{1} << (2 * n_qubits)) - 3 * static_cast<std::uint64_t>(n_qubits) - 1;
    return (numerator + 3) / 4;
}

std::vector<int> SweepSpec::layer_counts() const {
    std::vector<int> out;
    for (int l = layer_min; l <= layer_max; l += layer_step) {
        out.push_back(l);
    }
    return out;
}

namespace {

std::vector<int> sweep_stage_counts(const SweepSpec& spec, int layers) {
    DecompositionConfig config;
    config.topology = spec.topology;
    std::vector<int> counts = resolve_layer_counts(spec.n_qubits, config);
    counts.front() = layers;
    return counts;
}

}  // namespace

void SweepSpec::validate() const {
    if (n_qubits < 2 || n_qubits > 5) {
        throw std::invalid_argument("sweep: n must be in 2..5");
    }
    if (trials < 1) {
        throw std::invalid_argument("sweep: trials must be at least 1");
    }
    if (layer_step < 1 || layer_min > layer_max) {
        throw std::invalid_argument("sweep: empty layer range");
    }
    if (!(timeout_s > 0.0)) {
        throw std::invalid_argument("sweep: timeout must be positive");
    }
    optimizer.validate();
    // Throws when layer_min is shorter than one disentangling period.
    assemble_structure(n_qubits, topology, sweep_stage_counts(*this, layer_min), entangler_kind);
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<int> counts = spec.layer_counts();
    const std::size_t n_trials = static_cast<std::size_t>(spec.trials);
    std::vector<SweepRow> rows(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        rows[i].n_qubits = spec.n_qubits;
        rows[i].layers = counts[i];
        rows[i].eps.resize(n_trials);
        rows[i].seconds.resize(n_trials);
    }

    const auto run_task = [&](std::size_t task) {
        const std::size_t li = task / n_trials;
        const std::size_t t = task % n_trials;
        RandomSource rng(derive_seed(spec.seed, t));
        const ComplexMatrix u = haar_random_unitary(spec.n_qubits, rng);
        const GateStructure structure = assemble_structure(spec.n_qubits, spec.topology,
                                                           sweep_stage_counts(spec, counts[li]), spec.entangler_kind);
        const LayerSequence seq = stage_sequence(structure, 0);
        OptimizerConfig config = spec.optimizer;
        config.time_limit_s = spec.timeout_s;
        const auto start = std::chrono::steady_clock::now();
        std::vector<double> init = initial_parameters(seq.param_count(), config, rng);
        const SweepState state = sequential_sweep(seq, std::move(init), u, config, rng);
        rows[li].seconds[t] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!state.timed_out) {
            rows[li].eps[t] = state.best_value;
        }
    };

    const std::size_t n_tasks = counts.size() * n_trials;
    const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(spec.jobs, 1)), n_tasks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (std::size_t task = next++; task < n_tasks; task = next++) {
            try {
                run_task(task);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (SweepRow& row : rows) {
        std::vector<double> ok;
        for (const auto& e : row.eps) {
            if (e) {
                ok.push_back(*e);
            }
        }
        if (!ok.empty()) {
            double mean = 0.0;
            for (double e : ok) {
                mean += e;
            }
            mean /= static_cast<double>(ok.size());
            double var = 0.0;
            for (double e : ok) {
                var += (e - mean) * (e - mean);
            }
            row.eps_mean = mean;
            row.eps_std = ok.size() > 1 ? std::sqrt(var / static_cast<double>(ok.size() - 1)) : 0.0;
        }
        double total = 0.0;
        for (double s : row.seconds) {
            total += s;
        }
        row.seconds_mean = total / static_cast<double>(row.seconds.size());
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool omit_timing) {
    const auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
    std::ostringstream os;
    os << "n,layers,eps_mean,eps_std,seconds_mean\n";
    for (const SweepRow& row : rows) {
        os << row.n_qubits << ',' << row.layers << ',' << cell(row.eps_mean) << ',' << cell(row.eps_std) << ','
           << (omit_timing ? std::string("NA") : cell(row.seconds_mean)) << '\n';
    }
    return os.str();
}

std::string decomposition_report_json(const DecompositionResult& result, const DecompositionConfig& config,
                                      const ReportContext& context) {
    Json report;
    report["n_qubits"] = result.structure.n_qubits;
    report["cnot_count"] = result.cnot_count;
    report["spectral_error"] = result.spectral_error;
    report["fidelity_cost"] = result.fidelity_cost;
    report["fidelity_cost_before_fine_tune"] = result.fidelity_cost_initial;
    report["converged"] = result.converged;
    report["seed"] = result.seed;
    Json stages = Json::array();
    for (const StageResult& s : result.stages) {
        stages.push_back({{"target", s.target},
                          {"layers", s.layers_used},
                          {"f_sub", s.final_f_sub},
                          {"converged", s.converged},
                          {"sweeps", s.sweeps},
                          {"restarts", s.restarts},
                          {"timed_out", s.timed_out}});
    }
    report["stages"] = std::move(stages);
    if (!context.omit_timing) {
        report["wall_time"] = result.wall_time;
    }
    const OptimizerConfig& opt = config.optimizer;
    Json echo;
    echo["input"] = context.input_path;
    echo["qasm"] = context.qasm_path;
    echo["invert_input"] = context.invert_input;
    echo["layers"] = result.structure.layers_per_stage();
    echo["entangler"] = std::string(gate_kind_name(config.entangler_kind));
    echo["fine_tune"] = config.fine_tune;
    echo["fine_tune_max_iter"] = config.fine_tune_max_iter;
    if (config.topology) {
        Json topo = Json::parse(topology_to_json(*config.topology));
        if (context.topology_name) {
            topo["source"] = *context.topology_name;
        }
        echo["topology"] = std::move(topo);
    } else {
        echo["topology"] = nullptr;
    }
    echo["epsilon0"] = opt.epsilon0;
    echo["max_sweeps"] = opt.max_sweeps;
    echo["bfgs_max_iter"] = opt.bfgs_max_iter;
    echo["wolfe_c1"] = opt.wolfe_c1;
    echo["wolfe_c2"] = opt.wolfe_c2;
    echo["grad_tol"] = opt.grad_tol;
    echo["block_size_layers"] = opt.block_size_layers;
    echo["restart_patience"] = opt.restart_patience;
    echo["max_restarts"] = opt.max_restarts;
    echo["joint_interval"] = opt.joint_interval;
    echo["joint_max_iter"] = opt.joint_max_iter;
    echo["zero_init"] = opt.zero_init;
    echo["shuffle_blocks"] = opt.shuffle_blocks;
    echo["time_limit_s"] = opt.time_limit_s ? Json(*opt.time_limit_s) : Json(nullptr);
    report["config"] = std::move(echo);
    return report.dump(2) + "\n";
}

namespace {

struct CommonFlags {
    std::uint64_t seed = 0;
    std::string topology;
    std::vector<int> layers;
    std::string entangler = "cnot";
    double epsilon0 = 1e-8;
    bool no_fine_tune = false;
    int jobs = 1;
    std::optional<double> timeout_s;
    bool invert_input = false;
    bool strict_qelib1 = false;
    bool omit_timing = false;
};

void add_seed(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
}

void add_synthesis_flags(CLI::App* cmd, CommonFlags& f) {
    add_seed(cmd, f);
    cmd->add_option("--topology", f.topology, "Topology JSON file or preset name (qx2, heavy_hex4)");
    cmd->add_option("--entangler", f.entangler, "Two-qubit gate: cnot, cz or ch")->capture_default_str();
    cmd->add_option("--epsilon0", f.epsilon0, "Target value of the disentangling cost")->capture_default_str();
    cmd->add_flag("--omit-timing", f.omit_timing, "Leave wall-clock measurements out of the output");
}

std::optional<Topology> load_topology_flag(const std::string& name) {
    if (name.empty()) {
        return std::nullopt;
    }
    return load_topology(resolve_topology_path(name));
}

ComplexMatrix read_unitary(const std::string& path) {
    ComplexMatrix u = read_umat_file(path);
    if (!is_unitary(u, kInputUnitarityTol)) {
        throw CliError(path + ": matrix is not unitary (defect " + format_double(unitarity_defect(u)) + ")");
    }
    qubit_count(u);
    return u;
}

int thread_count(int jobs) {
    if (const char* env = std::getenv("UNITARY_SYNTH_THREADS")) {
        try {
            const double v = parse_double(env);
            if (v >= 1 && v == std::floor(v)) {
                return static_cast<int>(v);
            }
        } catch (const std::exception&) {
        }
        throw CliError("UNITARY_SYNTH_THREADS must be a positive integer");
    }
    return jobs;
}

std::filesystem::path sibling_path(const std::string& input, const char* extension) {
    std::filesystem::path p(input);
    p.replace_extension(extension);
    return p;
}

int cmd_decompose(const std::string& input, const std::string& qasm_out, const std::string& report_out,
                  const CommonFlags& f, std::ostream& out) {
    ComplexMatrix u = read_unitary(input);
    const int n = qubit_count(u);
    if (n < 2 || n > 5) {
        throw CliError("decompose supports 2 to 5 qubits, input has " + std::to_string(n));
    }
    if (f.invert_input) {
        u = dagger(u);
    }
    DecompositionConfig config;
    config.optimizer.epsilon0 = f.epsilon0;
    config.optimizer.seed = f.seed;
    config.optimizer.time_limit_s = f.timeout_s;
    config.layer_counts = f.layers;
    config.topology = load_topology_flag(f.topology);
    config.entangler_kind = parse_entangler(f.entangler);
    config.fine_tune = !f.no_fine_tune;

    RandomSource rng(f.seed);
    const DecompositionResult result = decompose(u, config, rng);

    const std::string qasm_path = qasm_out.empty() ? sibling_path(input, ".qasm").string() : qasm_out;
    const std::string report_path = report_out.empty() ? sibling_path(input, ".json").string() : report_out;
    QasmOptions qopts;
    qopts.strict_qelib1 = f.strict_qelib1;
    write_text_file(qasm_path, to_qasm(result.structure, result.params, qopts));
    ReportContext context;
    context.input_path = input;
    context.qasm_path = qasm_path;
    if (!f.topology.empty()) {
        context.topology_name = f.topology;
    }
    context.invert_input = f.invert_input;
    context.omit_timing = f.omit_timing;
    write_text_file(report_path, decomposition_report_json(result, config, context));

    out << "cnot_count " << result.cnot_count << "\n";
    out << "spectral_error " << format_double_exact(result.spectral_error) << "\n";
    out << "converged " << (result.converged ? "true" : "false") << "\n";
    return result.converged ? 0 : 2;
}

int cmd_verify(const std::string& qasm_path, const std::string& umat_path, double threshold, bool invert_input,
               std::ostream& out) {
    const QasmCircuit circuit = parse_qasm(read_text_file(qasm_path));
    const ComplexMatrix c = qasm_matrix(circuit);
    const ComplexMatrix u = read_unitary(umat_path);
    if (u.rows() != c.rows()) {
        throw CliError("circuit acts on " + std::to_string(circuit.logical_qubits()) + " qubits, target has " +
                       std::to_string(qubit_count(u)));
    }
    const double err = spectral_error(invert_input ? u : dagger(u), c);
    out << "spectral_error " << format_double_exact(err) << "\n";
    return err <= threshold ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Unitary synthesis by sequential block optimization"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "usynth 0.1.0");

    CommonFlags dec;
    std::string dec_input;
    std::string dec_qasm;
    std::string dec_report;
    double dec_timeout = 0.0;
    CLI::App* decompose_cmd = app.add_subcommand("decompose", "Synthesize a circuit for a unitary in .umat format");
    decompose_cmd->add_option("input", dec_input, "Unitary (.umat)")->required();
    decompose_cmd->add_option("-o,--output", dec_qasm, "QASM output path (default: input with .qasm)");
    decompose_cmd->add_option("--report", dec_report, "JSON report path (default: input with .json)");
    add_synthesis_flags(decompose_cmd, dec);
    decompose_cmd->add_option("--layers", dec.layers, "Layers per stage, first stage first")->delimiter(',');
    decompose_cmd->add_flag("--no-fine-tune", dec.no_fine_tune, "Skip the final joint optimization");
    CLI::Option* dec_timeout_opt =
        decompose_cmd->add_option("--timeout-s", dec_timeout, "Wall-clock cap per stage in seconds");
    decompose_cmd->add_flag("--invert-input", dec.invert_input,
                            "Synthesize the input itself rather than its inverse");
    decompose_cmd->add_flag("--strict-qelib1", dec.strict_qelib1, "Expand ch into qelib1 primitives");

    CommonFlags sw;
    SweepSpec spec;
    std::string sweep_out;
    sw.jobs = 1;
    double sweep_timeout = 600.0;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Average first-stage cost over random unitaries per layer count");
    sweep_cmd->add_option("-n,--qubits", spec.n_qubits, "Register size")->required();
    sweep_cmd->add_option("--min-layers", spec.layer_min, "Smallest layer count")->required();
    sweep_cmd->add_option("--max-layers", spec.layer_max, "Largest layer count")->required();
    sweep_cmd->add_option("--step", spec.layer_step, "Layer count increment")->capture_default_str();
    sweep_cmd->add_option("--trials", spec.trials, "Random unitaries per layer count")->capture_default_str();
    sweep_cmd->add_option("-o,--output", sweep_out, "CSV output path (default: stdout)");
    add_synthesis_flags(sweep_cmd, sw);
    sweep_cmd->add_option("--jobs", sw.jobs, "Concurrent trials")->capture_default_str();
    sweep_cmd->add_option("--timeout-s", sweep_timeout, "Per-trial wall-clock cap in seconds")->capture_default_str();

    CommonFlags rnd;
    int rnd_n = 0;
    std::string rnd_out;
    CLI::App* random_cmd = app.add_subcommand("random", "Write a Haar random unitary in .umat format");
    random_cmd->add_option("n", rnd_n, "Number of qubits (1..6)")->required();
    random_cmd->add_option("-o,--output", rnd_out, "Output path (default: stdout)");
    add_seed(random_cmd, rnd);

    std::string ver_qasm;
    std::string ver_umat;
    double ver_threshold = 1e-3;
    bool ver_invert = false;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Check a QASM circuit against the inverse of a unitary");
    verify_cmd->add_option("qasm", ver_qasm, "Circuit (.qasm)")->required();
    verify_cmd->add_option("umat", ver_umat, "Unitary (.umat)")->required();
    verify_cmd->add_option("--threshold", ver_threshold, "Largest accepted spectral error")->capture_default_str();
    verify_cmd->add_flag("--invert-input", ver_invert, "Compare against the unitary itself");

    int bound_n = 0;
    CLI::App* bound_cmd = app.add_subcommand("bound", "Print the CNOT lower bound for n qubits");
    bound_cmd->add_option("n", bound_n, "Number of qubits")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*decompose_cmd) {
            if (*dec_timeout_opt) {
                dec.timeout_s = dec_timeout;
            }
            return cmd_decompose(dec_input, dec_qasm, dec_report, dec, out);
        }
        if (*sweep_cmd) {
            spec.seed = sw.seed;
            spec.topology = load_topology_flag(sw.topology);
            spec.entangler_kind = parse_entangler(sw.entangler);
            spec.optimizer.epsilon0 = sw.epsilon0;
            spec.optimizer.seed = sw.seed;
            spec.timeout_s = sweep_timeout;
            spec.jobs = thread_count(sw.jobs);
            const std::string csv = sweep_csv(run_sweep(spec), sw.omit_timing);
            if (sweep_out.empty()) {
                out << csv;
            } else {
                write_text_file(sweep_out, csv);
            }
            return 0;
        }
        if (*random_cmd) {
            RandomSource rng(rnd.seed);
            const ComplexMatrix u = haar_random_unitary(rnd_n, rng);
            if (rnd_out.empty()) {
                write_umat(out, u);
            } else {
                write_umat_file(rnd_out, u);
            }
            return 0;
        }
        if (*verify_cmd) {
            return cmd_verify(ver_qasm, ver_umat, ver_threshold, ver_invert, out);
        }
        if (*bound_cmd) {
            out << cnot_lower_bound(bound_n) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        err << "usynth: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace usynth
