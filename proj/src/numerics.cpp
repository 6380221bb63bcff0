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

#include "usynth/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace usynth {

double RandomSource::normal() {
    // 1 - uniform() lies in (0, 1], so the logarithm is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix_seed(std::uint64_t value) {
    std::uint64_t z = value + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ComplexMatrix identity(Eigen::Index dim) {
    return ComplexMatrix::Identity(dim, dim);
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: dimension mismatch (" + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " times " + std::to_string(b.rows()) +
                                    "x" + std::to_string(b.cols()) + ")");
    }
    ComplexMatrix out(a.rows(), b.cols());
    out.noalias() = a * b;
    return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) {
    return a.adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

double unitarity_defect(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    ComplexMatrix g(a.cols(), a.cols());
    g.noalias() = a.adjoint() * a;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    }
    if (a.size() == 0) {
        return 0.0;
    }
    return (a - b).cwiseAbs().maxCoeff();
}

ComplexMatrix haar_random_unitary(int n_qubits, RandomSource& rng) {
    if (n_qubits < 1 || n_qubits > 6) {
        throw std::out_of_range("haar_random_unitary: n_qubits must be in [1, 6], got " +
                                std::to_string(n_qubits));
    }
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    ComplexMatrix ginibre(dim, dim);
    const double scale = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double re = rng.normal();
            const double im = rng.normal();
            ginibre(i, j) = Complex(re * scale, im * scale);
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(ginibre);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        const Complex phase = mag > 0.0 ? d / mag : Complex(1.0, 0.0);
        q.col(j) *= phase;
    }
    return q;
}

namespace {

void require_same_shape(const ComplexMatrix& u, const ComplexMatrix& v, const char* what) {
    if (u.rows() != v.rows() || u.cols() != v.cols()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
}

}  // namespace

double frobenius_distance(const ComplexMatrix& u, const ComplexMatrix& v) {
    require_same_shape(u, v, "frobenius_distance");
    const Complex tr = (u.adjoint() * v).trace();
    // Clamp tiny negative round-off from |Tr| slightly exceeding rows.
    return std::max(0.0, 1.0 - std::abs(tr) / static_cast<double>(u.rows()));
}

double spectral_norm(const ComplexMatrix& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    return svd.singularValues()(0);
}

double spectral_error(const ComplexMatrix& u, const ComplexMatrix& v) {
    if (u.rows() != u.cols() || v.rows() != v.cols()) {
        throw std::invalid_argument("spectral_error: inputs must be square");
    }
    require_same_shape(u, v, "spectral_error");
    const Complex tr = (u.adjoint() * v).trace();
    if (std::abs(tr) > 1e-12 * static_cast<double>(u.rows())) {
        // ||u - c v||_F is minimized by c = conj(tr) / |tr|.
        const Complex phase = std::conj(tr) / std::abs(tr);
        return spectral_norm(u - phase * v);
    }
    double best = std::numeric_limits<double>::infinity();
    constexpr int kGrid = 1024;
    for (int k = 0; k < kGrid; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / kGrid;
        best = std::min(best, spectral_norm(u - std::polar(1.0, phi) * v));
    }
    return best;
}

ComplexMatrix nearest_unitary(const ComplexMatrix& a) {
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

int qubit_count(const ComplexMatrix& a) {
    if (a.rows() != a.cols() || a.rows() < 1) {
        throw std::invalid_argument("expected a non-empty square matrix");
    }
    const auto dim = static_cast<std::uint64_t>(a.rows());
    if ((dim & (dim - 1)) != 0) {
        throw std::invalid_argument("matrix dimension " + std::to_string(dim) +
                                    " is not a power of two");
    }
    int n = 0;
    while ((std::uint64_t{1} << n) < dim) {
        ++n;
    }
    return n;
}

}  // namespace usynth
