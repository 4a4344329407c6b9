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

#include "qoct/propagate.hpp"

#include <cmath>
#include <type_traits>

namespace qoct {

Complex exp_divided_difference(Complex li, Complex lj, double dt, double threshold) {
  if (std::abs(li - lj) < threshold) return dt * std::exp(li * dt);
  return (std::exp(li * dt) - std::exp(lj * dt)) / (li - lj);
}

namespace {

constexpr double kHermitianTol = 1e-10;

SpectralSlice decompose_hermitian(const ComplexMatrix& h) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double defect = (h - ComplexMatrix(h.adjoint())).cwiseAbs().maxCoeff();
  if (defect > kHermitianTol * scale)
    throw NonDiagonalisableError("spectral route: slice generator is not skew-Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw NonDiagonalisableError("spectral route: eigendecomposition failed");
  SpectralSlice s;
  s.vectors = solver.eigenvectors();
  s.values = (-kImag) * solver.eigenvalues().cast<Complex>();
  return s;
}

ComplexMatrix phi_table(const ComplexVector& lam, double dt) {
  const Eigen::Index n = lam.size();
  ComplexMatrix phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) phi(i, j) = exp_divided_difference(lam(i), lam(j), dt);
  return phi;
}

}  // namespace

std::pair<ComplexMatrix, ComplexMatrix> slice_exp_and_derivative_spectral(const ComplexMatrix& h,
                                                                          const ComplexMatrix& hm,
                                                                          double dt) {
  if (h.rows() != h.cols() || hm.rows() != h.rows() || hm.cols() != h.cols())
    throw std::invalid_argument("slice_exp_and_derivative_spectral: dimension mismatch");
  const SpectralSlice s = decompose_hermitian(h);
  const ComplexMatrix phi = phi_table(s.values, dt);
  ComplexVector elam(s.values.size());
  for (Eigen::Index i = 0; i < s.values.size(); ++i) elam(i) = std::exp(s.values(i) * dt);
  const ComplexMatrix expg = s.vectors * elam.asDiagonal() * s.vectors.adjoint();
  const ComplexMatrix dir_tilde = s.vectors.adjoint() * ((-kImag) * hm) * s.vectors;
  const ComplexMatrix deriv = s.vectors * dir_tilde.cwiseProduct(phi) * s.vectors.adjoint();
  return {expg, deriv};
}

template <typename Scalar>
void PropagationCache<Scalar>::check_indices(int m, int p) const {
  if (m < 0 || m >= n_controls()) throw std::out_of_range("PropagationCache: control index");
  if (p < 0 || p >= n_slices()) throw std::out_of_range("PropagationCache: slice index");
}

template <typename Scalar>
MatrixX<Scalar> PropagationCache<Scalar>::derivative_block(int m, int p) const {
  check_indices(m, p);
  if constexpr (std::is_same_v<Scalar, Complex>) {
    if (spectral_) {
      const SpectralSlice& s = eig_[size_t(p)];
      const ComplexMatrix phi = phi_table(s.values, dt_);
      const ComplexMatrix dir_tilde = s.vectors.adjoint() * direction_[size_t(m)] * s.vectors;
      return s.vectors * dir_tilde.cwiseProduct(phi) * s.vectors.adjoint();
    }
  }
  const Mat scaled_dir = dt_ * direction_[size_t(m)];
  return slice_exp_and_derivative_augmented<Scalar>(scaled_gen_[size_t(p)], scaled_dir).second;
}

template <typename Scalar>
MatrixX<Scalar> PropagationCache<Scalar>::evolution_gradient(int m, int p) const {
  check_indices(m, p);
  return bwd_[size_t(p) + 1] * derivative_block(m, p) * fwd_[size_t(p)];
}

template <typename Scalar>
Vector PropagationCache<Scalar>::gradient_of_overlap(const Mat& c) const {
  const int m_count = n_controls(), k_count = n_slices();
  const Eigen::Index n = dim();
  if (c.rows() != n || c.cols() != n)
    throw std::invalid_argument("gradient_of_overlap: dimension mismatch");
  Vector grad(m_count * k_count);
  const Mat ch = c.adjoint();
  Mat z(n, n);
  for (int p = 0; p < k_count; ++p) {
    // Re Tr(c^H dX/df_mp) = Re Tr(z_p D_mp) with z_p = X(t_p) c^H X(T, t_{p+1}).
    z.noalias() = fwd_[size_t(p)] * ch * bwd_[size_t(p) + 1];
    if constexpr (std::is_same_v<Scalar, Complex>) {
      if (spectral_) {
        const SpectralSlice& s = eig_[size_t(p)];
        const ComplexMatrix phi = phi_table(s.values, dt_);
        const ComplexMatrix z_tilde = s.vectors.adjoint() * z * s.vectors;
        // Tr(z D_mp) = Tr(dir_m U (z_tilde o phi) U^H); phi is symmetric.
        const ComplexMatrix folded =
            s.vectors * z_tilde.cwiseProduct(phi).eval() * s.vectors.adjoint();
        for (int m = 0; m < m_count; ++m)
          grad(m * k_count + p) =
              std::real(direction_[size_t(m)].cwiseProduct(folded.transpose()).sum());
        continue;
      }
    }
    // Tr(z F(A)[B_m]) = Tr(F(A)[z] B_m) since both outer exponentials share A.
    const Mat f_z = slice_exp_and_derivative_augmented<Scalar>(scaled_gen_[size_t(p)], z).second;
    for (int m = 0; m < m_count; ++m) {
      const Complex val = Complex((f_z.cwiseProduct((dt_ * direction_[size_t(m)]).transpose())).sum());
      grad(m * k_count + p) = val.real();
    }
  }
  return grad;
}

template <typename Scalar>
PropagationCache<Scalar> propagate_impl(const MatrixX<Scalar>& drift,
                                        const std::vector<MatrixX<Scalar>>& controls,
                                        const ControlField& field, bool spectral) {
  field.validate();
  const int m_count = int(controls.size());
  const int k_count = field.n_slices();
  if (field.n_controls() != m_count)
    throw std::invalid_argument("propagate: control count of the field does not match the generator");
  const Eigen::Index n = drift.rows();
  for (const auto& cm : controls)
    if (cm.rows() != n || cm.cols() != n)
      throw std::invalid_argument("propagate: generator matrices must share one dimension");

  PropagationCache<Scalar> cache;
  cache.dt_ = field.dt;
  cache.spectral_ = spectral;
  cache.direction_ = controls;
  cache.slice_.resize(size_t(k_count));
  cache.scaled_gen_.resize(size_t(k_count));

  MatrixX<Scalar> gen(n, n);
  for (int p = 0; p < k_count; ++p) {
    gen = drift;
    for (int m = 0; m < m_count; ++m) gen.noalias() += field.values(m, p) * controls[size_t(m)];
    cache.scaled_gen_[size_t(p)] = field.dt * gen;
    cache.slice_[size_t(p)] = cache.scaled_gen_[size_t(p)].exp();
  }

  cache.fwd_.resize(size_t(k_count) + 1);
  cache.bwd_.resize(size_t(k_count) + 1);
  cache.fwd_[0] = MatrixX<Scalar>::Identity(n, n);
  for (int p = 0; p < k_count; ++p)
    cache.fwd_[size_t(p) + 1].noalias() = cache.slice_[size_t(p)] * cache.fwd_[size_t(p)];
  cache.bwd_[size_t(k_count)] = MatrixX<Scalar>::Identity(n, n);
  for (int p = k_count - 1; p >= 0; --p)
    cache.bwd_[size_t(p)].noalias() = cache.bwd_[size_t(p) + 1] * cache.slice_[size_t(p)];
  return cache;
}

PropagationCache<double> propagate(const RealGenerator& gen, const ControlField& field,
                                   PropagationRoute route) {
  if (route == PropagationRoute::Spectral)
    throw NonDiagonalisableError(
        "propagate: the spectral route handles skew-Hermitian generators only; "
        "use the augmented route for Markovian superoperators");
  return propagate_impl<double>(gen.drift, gen.controls, field, false);
}

PropagationCache<Complex> propagate(const HamiltonianGenerator& gen, const ControlField& field,
                                    PropagationRoute route) {
  field.validate();
  const int m_count = gen.n_controls();
  const int k_count = field.n_slices();
  if (field.n_controls() != m_count)
    throw std::invalid_argument("propagate: control count of the field does not match the generator");
  const Eigen::Index n = gen.dim();

  std::vector<ComplexMatrix> directions(static_cast<size_t>(m_count));
  for (int m = 0; m < m_count; ++m) directions[size_t(m)] = (-kImag) * gen.controls[size_t(m)];

  if (route == PropagationRoute::Augmented) {
    const ComplexMatrix drift = (-kImag) * gen.h0;
    return propagate_impl<Complex>(drift, directions, field, false);
  }

  PropagationCache<Complex> cache;
  cache.dt_ = field.dt;
  cache.spectral_ = true;
  cache.direction_ = std::move(directions);
  cache.slice_.resize(size_t(k_count));
  cache.eig_.resize(size_t(k_count));

  ComplexMatrix h(n, n);
  for (int p = 0; p < k_count; ++p) {
    h = gen.h0;
    for (int m = 0; m < m_count; ++m) h.noalias() += field.values(m, p) * gen.controls[size_t(m)];
    SpectralSlice s = decompose_hermitian(h);
    ComplexVector elam(n);
    for (Eigen::Index i = 0; i < n; ++i) elam(i) = std::exp(s.values(i) * field.dt);
    cache.slice_[size_t(p)].noalias() = s.vectors * elam.asDiagonal() * s.vectors.adjoint();
    cache.eig_[size_t(p)] = std::move(s);
  }

  cache.fwd_.resize(size_t(k_count) + 1);
  cache.bwd_.resize(size_t(k_count) + 1);
  cache.fwd_[0] = ComplexMatrix::Identity(n, n);
  for (int p = 0; p < k_count; ++p)
    cache.fwd_[size_t(p) + 1].noalias() = cache.slice_[size_t(p)] * cache.fwd_[size_t(p)];
  cache.bwd_[size_t(k_count)] = ComplexMatrix::Identity(n, n);
  for (int p = k_count - 1; p >= 0; --p)
    cache.bwd_[size_t(p)].noalias() = cache.bwd_[size_t(p) + 1] * cache.slice_[size_t(p)];
  return cache;
}

Vector finite_difference_gradient(const std::function<double(const ControlField&)>& objective,
                                  const ControlField& field, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be positive");
  const double base = objective(field);
  if (!std::isfinite(base))
    throw std::runtime_error("finite_difference_gradient: non-finite objective value");
  const int m_count = field.n_controls(), k_count = field.n_slices();
  Vector grad(m_count * k_count);
  ControlField probe = field;
  for (int m = 0; m < m_count; ++m) {
    for (int p = 0; p < k_count; ++p) {
      probe.values(m, p) = field.values(m, p) + step;
      const double shifted = objective(probe);
      if (!std::isfinite(shifted))
        throw std::runtime_error("finite_difference_gradient: non-finite objective value");
      grad(m * k_count + p) = (shifted - base) / step;
      probe.values(m, p) = field.values(m, p);
    }
  }
  return grad;
}

template class PropagationCache<double>;
template class PropagationCache<Complex>;

}  // namespace qoct
