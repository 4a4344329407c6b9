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

#include <complex>

#include <Eigen/Dense>

namespace qoct {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr Complex kImag{0.0, 1.0};

/// Kronecker product. The left factor is the most significant tensor slot,
/// i.e. kron(a, b) indexes as |a_row b_row><a_col b_col|.
template <typename Scalar>
MatrixX<Scalar> kron(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b) {
  MatrixX<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Single-qubit Pauli matrix for axis in {'i', 'x', 'y', 'z'}.
ComplexMatrix pauli(char axis);

/// Spin operator S_q^a = I ⊗ ... ⊗ (pauli(a)/2) ⊗ ... ⊗ I on n qubits.
/// Qubit 0 is the leftmost tensor factor.
ComplexMatrix spin_operator(int qubit, char axis, int n_qubits);

/// Partial trace over the leading factor of dimension dim_lead:
/// out[a, b] = sum_s m[s * dim_rest + a, s * dim_rest + b].
ComplexMatrix trace_out_leading(const ComplexMatrix& m, int dim_lead, int dim_rest);

/// Reduced density matrix of one qubit of a pure state (qubit 0 leftmost).
ComplexMatrix reduced_qubit_state(const ComplexVector& psi, int qubit, int n_qubits);

/// Bloch vector (b_x, b_y, b_z) = Tr(rho sigma_a) of a single-qubit state.
Eigen::Vector3d bloch_vector(const ComplexMatrix& rho);

}  // namespace qoct
