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

#include <cmath>
#include <vector>

#include "usynth/numerics.hpp"

namespace usynth::testing {

inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, RandomSource& rng) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    return m;
}

inline ComplexMatrix naive_matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c = ComplexMatrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            Complex s = 0.0;
            for (Eigen::Index k = 0; k < a.cols(); ++k) {
                s += a(i, k) * b(k, j);
            }
            c(i, j) = s;
        }
    }
    return c;
}

inline ComplexMatrix naive_dagger(const ComplexMatrix& a) {
    ComplexMatrix d(a.cols(), a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            d(j, i) = std::conj(a(i, j));
        }
    }
    return d;
}

// Direct transcription of the definition: four nested loops over the block
// indices, explicit block extraction and elementwise products.
inline double f_sub_oracle(const ComplexMatrix& u) {
    const Eigen::Index h = u.rows() / 2;
    auto block = [&](int i, int j) {
        ComplexMatrix b(h, h);
        for (Eigen::Index r = 0; r < h; ++r) {
            for (Eigen::Index c = 0; c < h; ++c) {
                b(r, c) = u(i * h + r, j * h + c);
            }
        }
        return b;
    };
    double total = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int p = 0; p < 2; ++p) {
                for (int q = 0; q < 2; ++q) {
                    const ComplexMatrix prod = naive_matmul(block(i, j), naive_dagger(block(p, q)));
                    const Complex k = prod(0, 0);
                    for (Eigen::Index r = 0; r < h; ++r) {
                        for (Eigen::Index c = 0; c < h; ++c) {
                            const Complex d = prod(r, c) - (r == c ? k : Complex(0.0));
                            total += std::norm(d);
                        }
                    }
                }
            }
        }
    }
    return total;
}

inline std::vector<double> random_angles(std::size_t count, RandomSource& rng) {
    std::vector<double> x(count);
    for (double& v : x) {
        v = rng.uniform(-M_PI, 3 * M_PI);
    }
    return x;
}

inline ComplexMatrix pauli_x() {
    ComplexMatrix x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    return x;
}

inline ComplexMatrix pauli_z() {
    ComplexMatrix z(2, 2);
    z << 1.0, 0.0, 0.0, -1.0;
    return z;
}

}  // namespace usynth::testing
