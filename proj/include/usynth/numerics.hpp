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

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace usynth {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major, 64-bit float components.
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RealVector = Eigen::VectorXd;

/// Seeded pseudo random source.
///
/// Backed by the 64-bit Mersenne twister (std::mt19937_64), whose output
/// sequence is fixed by the C++ standard. Uniform and normal variates are
/// derived here rather than through the <random> distributions, which are
/// implementation defined, so a seed reproduces the same doubles on every
/// standard library.
class RandomSource {
  public:
    explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal variate (Box-Muller, one value per call).
    double normal();

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t value);

/// Seed for the index-th independent stream derived from `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ mix_seed(index + 0x9e3779b97f4a7c15ULL);
}

ComplexMatrix identity(Eigen::Index dim);

/// Standard matrix product; throws std::invalid_argument when a.cols != b.rows.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

/// Conjugate transpose.
ComplexMatrix dagger(const ComplexMatrix& a);

/// Kronecker product a ⊗ b (a acts on the more significant index bits).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// max_ij |(A†A - I)_ij|; +inf for non-square input.
double unitarity_defect(const ComplexMatrix& a);

inline bool is_unitary(const ComplexMatrix& a, double tol = 1e-12) {
    return unitarity_defect(a) <= tol;
}

/// max_ij |a_ij - b_ij|; throws on shape mismatch.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Haar distributed 2^n x 2^n unitary from the QR factorization of a complex
/// Ginibre matrix, with the R diagonal phases folded back into Q.
/// Requires 1 <= n_qubits <= 6.
ComplexMatrix haar_random_unitary(int n_qubits, RandomSource& rng);

/// 1 - |Tr(u† v)| / rows. Zero iff v equals u up to a global phase.
double frobenius_distance(const ComplexMatrix& u, const ComplexMatrix& v);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& a);

/// min over global phase of ||u - e^{i phi} v||_2.
///
/// The phase is aligned with Tr(u† v) when that trace is non-negligible,
/// otherwise it is grid searched over 1024 equispaced angles.
double spectral_error(const ComplexMatrix& u, const ComplexMatrix& v);

/// Closest unitary in Frobenius norm (unitary polar factor).
ComplexMatrix nearest_unitary(const ComplexMatrix& a);

/// Number of qubits for a 2^n x 2^n matrix; throws if the shape is not a
/// square power of two.
int qubit_count(const ComplexMatrix& a);

}  // namespace usynth
