// Copyright 2026 The QOCT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "qoct/controls.hpp"
#include "qoct/types.hpp"

namespace qoct {

/// Markovian generator acting on coefficient vectors: the slice generator is
/// drift + sum_m f_mp controls[m], all real N1^2 x N1^2.
struct RealGenerator {
  Matrix drift;                  // L0 + L_D
  std::vector<Matrix> controls;  // L_m
  Eigen::Index dim() const { return drift.rows(); }
  int n_controls() const { return int(controls.size()); }
};

/// Hamiltonian generator: the slice generator is -i(h0 + sum_m f_mp hm),
/// skew-Hermitian, so the propagator is unitary.
struct HamiltonianGenerator {
  ComplexMatrix h0;
  std::vector<ComplexMatrix> controls;  // Hermitian H_m
  Eigen::Index dim() const { return h0.rows(); }
  int n_controls() const { return int(controls.size()); }
};

/// Signalled when the spectral route is asked to handle a generator it cannot
/// diagonalise reliably; callers fall back to the augmented route.
struct NonDiagonalisableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exponential of the block matrix [[a, b], [0, a]]. Returns exp(a) and the
/// top-right block, which is the exact Frechet derivative
/// d/de exp(a + e b)|_{e=0} = integral_0^1 exp(a(1-s)) b exp(a s) ds.
template <typename Scalar>
std::pair<MatrixX<Scalar>, MatrixX<Scalar>> slice_exp_and_derivative_augmented(
    const MatrixX<Scalar>& a, const MatrixX<Scalar>& b) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n)
    throw std::invalid_argument("slice_exp_and_derivative_augmented: blocks must be square and equal");
  MatrixX<Scalar> aug = MatrixX<Scalar>::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = a;
  aug.topRightCorner(n, n) = b;
  aug.bottomRightCorner(n, n) = a;
  const MatrixX<Scalar> e = aug.exp();
  return {e.topLeftCorner(n, n), e.topRightCorner(n, n)};
}

/// Divided difference (exp(li*dt) - exp(lj*dt)) / (li - lj) with the
/// degenerate limit dt*exp(li*dt) once |li - lj| drops below threshold.
Complex exp_divided_difference(Complex li, Complex lj, double dt, double threshold = 1e-10);

struct SpectralSlice {
  ComplexMatrix vectors;  // unitary U with G = U diag(lambda) U^dagger
  ComplexVector values;   // lambda = -i h, h the eigenvalues of the slice Hamiltonian
};

/// Eigendecomposition route for a skew-Hermitian slice generator -i h dt.
/// Returns exp(-i h dt) and the Frechet derivative along -i hm dt. Signals
/// NonDiagonalisableError when h is not Hermitian to tolerance.
std::pair<ComplexMatrix, ComplexMatrix> slice_exp_and_derivative_spectral(const ComplexMatrix& h,
                                                                          const ComplexMatrix& hm,
                                                                          double dt);

enum class PropagationRoute { Auto, Augmented, Spectral };

/// Slice exponentials, forward/backward products, and the per-slice data
/// needed to evaluate exact directional derivatives of X(T). Immutable after
/// construction.
template <typename Scalar>
class PropagationCache {
 public:
  using Mat = MatrixX<Scalar>;

  int n_controls() const { return int(direction_.size()); }
  int n_slices() const { return int(slice_.size()); }
  double dt() const { return dt_; }
  Eigen::Index dim() const { return fwd_.front().rows(); }

  /// X(t_{p+1}, t_p), slice index p in [0, K).
  const Mat& slice(int p) const { return slice_.at(size_t(p)); }
  /// Forward product X(t_p), p in [0, K]; forward(0) = I.
  const Mat& forward(int p) const { return fwd_.at(size_t(p)); }
  /// Backward product X(T, t_p), p in [0, K]; backward(K) = I.
  const Mat& backward(int p) const { return bwd_.at(size_t(p)); }
  const Mat& final_propagator() const { return fwd_.back(); }

  /// Directional-derivative block of slice p along control m:
  /// d/df_mp exp(dt G_p).
  Mat derivative_block(int m, int p) const;

  /// dX(T)/df_mp = X(T, t_{p+1}) * derivative_block(m, p) * X(t_p).
  Mat evolution_gradient(int m, int p) const;

  /// All M*K derivatives of the linear functional Re Tr(c^H X(T)), m-major.
  /// One augmented exponential (or spectral rotation) per slice regardless
  /// of the number of controls.
  Vector gradient_of_overlap(const Mat& c) const;

 private:
  template <typename S>
  friend PropagationCache<S> propagate_impl(const MatrixX<S>& drift,
                                            const std::vector<MatrixX<S>>& controls,
                                            const ControlField& field, bool spectral);
  friend PropagationCache<Complex> propagate(const HamiltonianGenerator& gen,
                                             const ControlField& field, PropagationRoute route);

  void check_indices(int m, int p) const;

  double dt_ = 0.0;
  bool spectral_ = false;
  std::vector<Mat> slice_, fwd_, bwd_;
  std::vector<Mat> direction_;     // generator direction per control (L_m or -i H_m)
  std::vector<Mat> scaled_gen_;    // augmented route: dt * G_p per slice
  std::vector<SpectralSlice> eig_; // spectral route: per-slice eigensystem
};

/// Markovian propagation; the augmented route is the only supported one for
/// general real generators.
PropagationCache<double> propagate(const RealGenerator& gen, const ControlField& field,
                                   PropagationRoute route = PropagationRoute::Auto);

/// Hamiltonian propagation; Auto resolves to the spectral route.
PropagationCache<Complex> propagate(const HamiltonianGenerator& gen, const ControlField& field,
                                    PropagationRoute route = PropagationRoute::Auto);

/// Forward-difference gradient [E(f + step) - E(f)] / step per parameter,
/// m-major. Oracle and fallback for the analytic routes.
Vector finite_difference_gradient(const std::function<double(const ControlField&)>& objective,
                                  const ControlField& field, double step = 1e-6);

}  // namespace qoct
