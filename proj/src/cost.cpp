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

#include "usynth/cost.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace usynth {

namespace {

void require_even_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 2 || (m.rows() % 2) != 0) {
        throw std::invalid_argument(std::string(what) + ": expected a square matrix of even dimension");
    }
}

void require_params(std::size_t have, std::size_t need, const char* what) {
    if (have < need) {
        throw std::invalid_argument(std::string(what) + ": parameter vector has " + std::to_string(have) +
                                    " entries, need " + std::to_string(need));
    }
}

}  // namespace

ComplexMatrix BlockPartition::reassemble() const {
    const Eigen::Index h = blocks[0].rows();
    ComplexMatrix out(2 * h, 2 * h);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block(i * h, j * h, h, h) = (*this)(i, j);
        }
    }
    return out;
}

BlockPartition partition_blocks(const ComplexMatrix& ubar) {
    require_even_square(ubar, "partition_blocks");
    const Eigen::Index h = ubar.rows() / 2;
    BlockPartition p;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            p.blocks[static_cast<std::size_t>(2 * i + j)] = ubar.block(i * h, j * h, h, h);
        }
    }
    return p;
}

Complex kappa(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("kappa: expected two square matrices of the same shape");
    }
    // Only the first row of a and the first row of b contribute.
    return a.row(0).transpose().cwiseProduct(b.row(0).adjoint()).sum();
}

double f_sub(const ComplexMatrix& ubar) {
    require_even_square(ubar, "f_sub");
    const Eigen::Index h = ubar.rows() / 2;
    ComplexMatrix m(h, h);
    double total = 0.0;
    for (int a = 0; a < 4; ++a) {
        const auto xa = ubar.block((a / 2) * h, (a % 2) * h, h, h);
        for (int b = a; b < 4; ++b) {
            const auto xb = ubar.block((b / 2) * h, (b % 2) * h, h, h);
            m.noalias() = xa * xb.adjoint();
            m.diagonal().array() -= m(0, 0);
            total += (a == b ? 1.0 : 2.0) * m.squaredNorm();
        }
    }
    return total;
}

double f_sub_with_gradient(const ComplexMatrix& ubar, ComplexMatrix& grad) {
    require_even_square(ubar, "f_sub");
    const Eigen::Index h = ubar.rows() / 2;
    grad.setZero(ubar.rows(), ubar.cols());
    ComplexMatrix q(h, h);
    double total = 0.0;
    for (int a = 0; a < 4; ++a) {
        const auto xa = ubar.block((a / 2) * h, (a % 2) * h, h, h);
        for (int b = a; b < 4; ++b) {
            const auto xb = ubar.block((b / 2) * h, (b % 2) * h, h, h);
            q.noalias() = xa * xb.adjoint();
            q.diagonal().array() -= q(0, 0);
            total += (a == b ? 1.0 : 2.0) * q.squaredNorm();
            // Q = R - Tr(R) E00; the derivative of kappa only touches entry (0, 0).
            q(0, 0) -= q.trace();
            grad.block((a / 2) * h, (a % 2) * h, h, h).noalias() += 2.0 * q * xb;
            if (a != b) {
                grad.block((b / 2) * h, (b % 2) * h, h, h).noalias() += 2.0 * q.adjoint() * xa;
            }
        }
    }
    return total;
}

double f_sub_unitary_with_gradient(const ComplexMatrix& ubar, ComplexMatrix* grad) {
    require_even_square(ubar, "f_sub");
    const Eigen::Index h = ubar.rows() / 2;
    const Eigen::Index d = ubar.rows();
    const Complex* blk[4];
    for (int a = 0; a < 4; ++a) {
        blk[a] = ubar.data() + (a / 2) * h * d + (a % 2) * h;
    }
    // <x, y> = sum x conj(y) over row k of two blocks.
    const auto row_dot = [h](const Complex* x, const Complex* y) {
        double re = 0.0;
        double im = 0.0;
        for (Eigen::Index l = 0; l < h; ++l) {
            re += x[l].real() * y[l].real() + x[l].imag() * y[l].imag();
            im += x[l].imag() * y[l].real() - x[l].real() * y[l].imag();
        }
        return Complex(re, im);
    };
    Complex kap[4][4];
    Complex tr[4][4];
    for (int a = 0; a < 4; ++a) {
        for (int b = a; b < 4; ++b) {
            const Complex k0 = row_dot(blk[a], blk[b]);
            Complex t = k0;
            for (Eigen::Index k = 1; k < h; ++k) {
                t += row_dot(blk[a] + k * d, blk[b] + k * d);
            }
            kap[a][b] = k0;
            kap[b][a] = std::conj(k0);
            tr[a][b] = t;
            tr[b][a] = std::conj(t);
        }
    }
    const double hd = static_cast<double>(h);
    double total = 4.0 * hd;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            total += -2.0 * (std::conj(kap[a][b]) * tr[a][b]).real() + hd * std::norm(kap[a][b]);
        }
    }
    if (grad) {
        grad->resize(d, d);
        for (int c = 0; c < 4; ++c) {
            Complex* g = grad->data() + (c / 2) * h * d + (c % 2) * h;
            Complex w[4];
            Complex w0[4];
            for (int b = 0; b < 4; ++b) {
                w[b] = -2.0 * kap[c][b];
                w0[b] = w[b] - 2.0 * (tr[c][b] - hd * kap[c][b]);
            }
            for (Eigen::Index k = 0; k < h; ++k) {
                const Complex* cw = k == 0 ? w0 : w;
                const Eigen::Index off = k * d;
                for (Eigen::Index l = 0; l < h; ++l) {
                    g[off + l] = cw[0] * blk[0][off + l] + cw[1] * blk[1][off + l] + cw[2] * blk[2][off + l] +
                                 cw[3] * blk[3][off + l];
                }
            }
        }
    }
    return std::max(total, 0.0);
}

LayerSequence stage_sequence(const GateStructure& structure, std::size_t stage) {
    const Stage& st = structure.stages.at(stage);
    const std::size_t base = structure.stage_param_offset(stage);
    LayerSequence seq;
    seq.n_qubits = st.target + 1;
    for (const Layer& layer : st.layers) {
        Layer copy = layer;
        copy.gate_a.param_offset -= base;
        copy.gate_b.param_offset -= base;
        seq.layers.push_back(copy);
    }
    return seq;
}

LocalOp layer_operator(const Layer& layer, std::span<const double> params) {
    require_params(params.size(), layer.param_offset() + kParamsPerLayer, "layer_operator");
    const double* p = params.data() + layer.param_offset();
    const Mat2 ua = u3_kernel(p[0], 0.0, p[1]);
    const Mat2 ub = u3_kernel(p[2], 0.0, p[3]);
    const int control = *layer.entangler.control;
    const int target = layer.entangler.target;
    Mat4 rot;
    if (control == layer.qubit_a) {
        rot = kron2(ua, ub);
    } else {
        rot = kron2(ub, ua);
    }
    return LocalOp::two(control, target, two_qubit_kernel4(layer.entangler.kind) * rot);
}

std::array<Mat4, 4> layer_operator_derivatives(const Layer& layer, std::span<const double> params) {
    require_params(params.size(), layer.param_offset() + kParamsPerLayer, "layer_operator_derivatives");
    const double* p = params.data() + layer.param_offset();
    const Mat2 ua = u3_kernel(p[0], 0.0, p[1]);
    const Mat2 ub = u3_kernel(p[2], 0.0, p[3]);
    const std::array<Mat2, 4> d = {
        u3_kernel_derivative(p[0], 0.0, p[1], U3Param::Theta),
        u3_kernel_derivative(p[0], 0.0, p[1], U3Param::Lambda),
        u3_kernel_derivative(p[2], 0.0, p[3], U3Param::Theta),
        u3_kernel_derivative(p[2], 0.0, p[3], U3Param::Lambda),
    };
    const Mat4 e = two_qubit_kernel4(layer.entangler.kind);
    const bool a_high = *layer.entangler.control == layer.qubit_a;
    std::array<Mat4, 4> out;
    for (int k = 0; k < 4; ++k) {
        const Mat2& da = k < 2 ? d[static_cast<std::size_t>(k)] : ua;
        const Mat2& db = k < 2 ? ub : d[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(k)] =
            e * (a_high ? kron2(da, db) : kron2(db, da));
    }
    return out;
}

ComplexMatrix circuit_matrix(const GateStructure& structure, std::span<const double> params,
                             std::optional<std::size_t> stage_limit) {
    if (!stage_limit) {
        require_params(params.size(), structure.total_params, "circuit_matrix");
        if (params.size() != structure.total_params) {
            throw std::invalid_argument("circuit_matrix: expected " + std::to_string(structure.total_params) +
                                        " parameters, got " + std::to_string(params.size()));
        }
    }
    const std::size_t stages = stage_limit ? std::min(*stage_limit, structure.stages.size()) : structure.stages.size();
    ComplexMatrix c = identity(Eigen::Index{1} << structure.n_qubits);
    for (std::size_t s = 0; s < stages; ++s) {
        for (const Layer& layer : structure.stages[s].layers) {
            apply_left(c, layer_operator(layer, params));
        }
    }
    if (!stage_limit) {
        for (const Gate& g : structure.closing_rotations) {
            const double* p = params.data() + g.param_offset;
            apply_left(c, LocalOp::one(g.target, u3_kernel(p[0], p[1], p[2])));
        }
    }
    return c;
}

ComplexMatrix sequence_matrix(const LayerSequence& sequence, std::span<const double> params) {
    require_params(params.size(), sequence.param_count(), "sequence_matrix");
    ComplexMatrix c = identity(Eigen::Index{1} << sequence.n_qubits);
    for (const Layer& layer : sequence.layers) {
        apply_left(c, layer_operator(layer, params));
    }
    return c;
}

CostReport f_sub_gradient(const LayerSequence& sequence, std::span<const double> params,
                          const ComplexMatrix& u_initial, LayerRange active) {
    if (active.count == 0 || active.first + active.count > sequence.layers.size()) {
        throw std::out_of_range("f_sub_gradient: active block outside the layer sequence");
    }
    require_params(params.size(), sequence.param_count(), "f_sub_gradient");
    StageEvaluator eval(sequence, u_initial);
    eval.focus(active, params);
    RealVector grad;
    CostReport report;
    report.value = eval.evaluate(params.subspan(kParamsPerLayer * active.first, kParamsPerLayer * active.count),
                                 &grad);
    report.gradient = std::move(grad);
    return report;
}

namespace {

struct ParametricOp {
    LocalOp op;
    std::size_t offset = 0;
    int count = 0;
    std::array<Mat4, 4> derivative;
};

std::vector<ParametricOp> flatten(const GateStructure& structure, std::span<const double> params, bool derivatives) {
    std::vector<ParametricOp> ops;
    for (const Stage& stage : structure.stages) {
        for (const Layer& layer : stage.layers) {
            ParametricOp op;
            op.op = layer_operator(layer, params);
            op.offset = layer.param_offset();
            op.count = 4;
            if (derivatives) {
                op.derivative = layer_operator_derivatives(layer, params);
            }
            ops.push_back(std::move(op));
        }
    }
    for (const Gate& g : structure.closing_rotations) {
        const double* p = params.data() + g.param_offset;
        ParametricOp op;
        op.op = LocalOp::one(g.target, u3_kernel(p[0], p[1], p[2]));
        op.offset = g.param_offset;
        op.count = 3;
        if (derivatives) {
            for (int k = 0; k < 3; ++k) {
                op.derivative[static_cast<std::size_t>(k)] = Mat4::Zero();
                op.derivative[static_cast<std::size_t>(k)].block<2, 2>(0, 0) =
                    u3_kernel_derivative(p[0], p[1], p[2], static_cast<U3Param>(k));
            }
        }
        ops.push_back(std::move(op));
    }
    return ops;
}

}  // namespace

CostReport fidelity_cost(const GateStructure& structure, std::span<const double> params,
                         const ComplexMatrix& u_initial, bool with_gradient) {
    if (params.size() != structure.total_params) {
        throw std::invalid_argument("fidelity_cost: expected " + std::to_string(structure.total_params) +
                                    " parameters, got " + std::to_string(params.size()));
    }
    const Eigen::Index dim = Eigen::Index{1} << structure.n_qubits;
    if (u_initial.rows() != dim || u_initial.cols() != dim) {
        throw std::invalid_argument("fidelity_cost: unitary does not match the register size");
    }
    const std::vector<ParametricOp> ops = flatten(structure, params, with_gradient);
    ComplexMatrix w = u_initial;
    for (const auto& op : ops) {
        apply_left(w, op.op);
    }
    const Complex t = w.trace();
    const double abs_t = std::abs(t);
    CostReport report;
    report.value = std::max(0.0, 1.0 - abs_t / static_cast<double>(dim));
    if (!with_gradient) {
        return report;
    }
    RealVector grad = RealVector::Zero(static_cast<Eigen::Index>(structure.total_params));
    if (abs_t > 0.0 && !ops.empty()) {
        // suffix = product of all ops after the current one.
        ComplexMatrix suffix = identity(dim);
        for (const auto& op : ops) {
            apply_left(suffix, op.op);
        }
        ComplexMatrix prefix = u_initial;
        apply_right_adjoint(suffix, ops.front().op);
        const Complex scale = std::conj(t) / (abs_t * static_cast<double>(dim));
        for (std::size_t j = 0; j < ops.size(); ++j) {
            const auto& op = ops[j];
            const Mat4 reduced = partial_trace_product(prefix, suffix, op.op);
            for (int k = 0; k < op.count; ++k) {
                const Complex dt = local_trace(reduced, op.derivative[static_cast<std::size_t>(k)], op.op.arity);
                grad(static_cast<Eigen::Index>(op.offset) + k) = -(scale * dt).real();
            }
            if (j + 1 < ops.size()) {
                apply_left(prefix, op.op);
                apply_right_adjoint(suffix, ops[j + 1].op);
            }
        }
    }
    report.gradient = std::move(grad);
    return report;
}

// ---------------------------------------------------------------------------

StageEvaluator::StageEvaluator(const LayerSequence& sequence, const ComplexMatrix& u_initial)
    : sequence_(sequence), u_initial_(u_initial) {
    const Eigen::Index dim = Eigen::Index{1} << sequence.n_qubits;
    if (u_initial.rows() != dim || u_initial.cols() != dim) {
        throw std::invalid_argument("StageEvaluator: unitary is " + std::to_string(u_initial.rows()) + "x" +
                                    std::to_string(u_initial.cols()) + ", register needs " +
                                    std::to_string(dim));
    }
    if (sequence.n_qubits < 2) {
        throw std::invalid_argument("StageEvaluator: need at least 2 qubits");
    }
}

void StageEvaluator::rebuild(std::span<const double> params) {
    const Eigen::Index dim = u_initial_.rows();
    prefix_ = u_initial_;
    for (std::size_t j = 0; j < block_.first; ++j) {
        apply_left(prefix_, layer_operator(sequence_.layers[j], params));
    }
    suffix_ = identity(dim);
    for (std::size_t j = block_.first + block_.count; j < sequence_.layers.size(); ++j) {
        apply_left(suffix_, layer_operator(sequence_.layers[j], params));
    }
}

void StageEvaluator::focus(LayerRange block, std::span<const double> params) {
    if (block.count == 0 || block.first + block.count > sequence_.layers.size()) {
        throw std::out_of_range("StageEvaluator::focus: block outside the layer sequence");
    }
    require_params(params.size(), sequence_.param_count(), "StageEvaluator::focus");
    const bool advance = focused_ && block.first == block_.first + block_.count;
    if (advance) {
        for (std::size_t j = block_.first; j < block.first; ++j) {
            apply_left(prefix_, layer_operator(sequence_.layers[j], params));
        }
        for (std::size_t j = block.first; j < block.first + block.count; ++j) {
            apply_right_adjoint(suffix_, layer_operator(sequence_.layers[j], params));
        }
        block_ = block;
    } else {
        block_ = block;
        rebuild(params);
    }
    committed_.assign(params.begin(), params.end());
    focused_ = true;
}

double StageEvaluator::evaluate(std::span<const double> block_params, RealVector* grad) {
    if (!focused_) {
        throw std::logic_error("StageEvaluator::evaluate called before focus");
    }
    const std::size_t nparam = kParamsPerLayer * block_.count;
    if (block_params.size() != nparam) {
        throw std::invalid_argument("StageEvaluator::evaluate: expected " + std::to_string(nparam) +
                                    " block parameters");
    }
    // Layer operators read from the full vector, so splice the block in.
    const std::size_t base = kParamsPerLayer * block_.first;
    std::copy(block_params.begin(), block_params.end(), committed_.begin() + static_cast<std::ptrdiff_t>(base));
    const std::span<const double> params(committed_);

    std::vector<LocalOp> ops;
    ops.reserve(block_.count);
    for (std::size_t j = 0; j < block_.count; ++j) {
        ops.push_back(layer_operator(sequence_.layers[block_.first + j], params));
    }
    if (grad) {
        partials_.resize(block_.count);
    }
    work_ = prefix_;
    for (std::size_t j = 0; j < block_.count; ++j) {
        if (grad) {
            partials_[j] = work_;
        }
        apply_left(work_, ops[j]);
    }
    ubar_.noalias() = suffix_ * work_;
    if (!grad) {
        return f_sub_unitary_with_gradient(ubar_, nullptr);
    }
    const double value = f_sub_unitary_with_gradient(ubar_, &grad_);
    grad->resize(static_cast<Eigen::Index>(nparam));
    // d f = 2 Re Tr(G† S_j dL_j P_j) = 2 Re Tr(P_j (G† S_j) dL_j).
    adj_.noalias() = grad_.adjoint() * suffix_;
    for (std::size_t jj = block_.count; jj-- > 0;) {
        const Layer& layer = sequence_.layers[block_.first + jj];
        const Mat4 reduced = partial_trace_product(partials_[jj], adj_, ops[jj]);
        const auto dk = layer_operator_derivatives(layer, params);
        for (int k = 0; k < 4; ++k) {
            (*grad)(static_cast<Eigen::Index>(kParamsPerLayer * jj) + k) =
                2.0 * local_trace(reduced, dk[static_cast<std::size_t>(k)], 2).real();
        }
        if (jj > 0) {
            apply_right(adj_, ops[jj]);
        }
    }
    return value;
}

}  // namespace usynth
