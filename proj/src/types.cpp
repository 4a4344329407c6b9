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

#include "qoct/types.hpp"

#include <stdexcept>

namespace qoct {

ComplexMatrix pauli(char axis) {
  ComplexMatrix p(2, 2);
  switch (axis) {
    case 'i':
      p << 1, 0, 0, 1;
      break;
    case 'x':
      p << 0, 1, 1, 0;
      break;
    case 'y':
      p << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    case 'z':
      p << 1, 0, 0, -1;
      break;
    default:
      throw std::invalid_argument("pauli: unknown axis");
  }
  return p;
}

ComplexMatrix spin_operator(int qubit, char axis, int n_qubits) {
  if (qubit < 0 || qubit >= n_qubits)
    throw std::out_of_range("spin_operator: qubit index out of range");
  ComplexMatrix op = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q) {
    const ComplexMatrix factor =
        (q == qubit) ? ComplexMatrix(0.5 * pauli(axis)) : ComplexMatrix(ComplexMatrix::Identity(2, 2));
    op = kron<Complex>(op, factor);
  }
  return op;
}

ComplexMatrix trace_out_leading(const ComplexMatrix& m, int dim_lead, int dim_rest) {
  if (m.rows() != m.cols() || m.rows() != Eigen::Index(dim_lead) * dim_rest)
    throw std::invalid_argument("trace_out_leading: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(dim_rest, dim_rest);
  for (int s = 0; s < dim_lead; ++s)
    out += m.block(s * dim_rest, s * dim_rest, dim_rest, dim_rest);
  return out;
}

ComplexMatrix reduced_qubit_state(const ComplexVector& psi, int qubit, int n_qubits) {
  if (psi.size() != Eigen::Index(1) << n_qubits)
    throw std::invalid_argument("reduced_qubit_state: state dimension mismatch");
  if (qubit < 0 || qubit >= n_qubits)
    throw std::out_of_range("reduced_qubit_state: qubit index out of range");
  // Qubit 0 is the leftmost factor, so its bit is the most significant one.
  const int shift = n_qubits - 1 - qubit;
  const Eigen::Index dim = psi.size();
  ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int a = int((i >> shift) & 1);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const int b = int((j >> shift) & 1);
      if ((i & ~(Eigen::Index(1) << shift)) == (j & ~(Eigen::Index(1) << shift)))
        rho(a, b) += psi(i) * std::conj(psi(j));
    }
  }
  return rho;
}

Eigen::Vector3d bloch_vector(const ComplexMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2)
    throw std::invalid_argument("bloch_vector: expected a 2x2 state");
  Eigen::Vector3d b;
  b(0) = 2.0 * rho(0, 1).real();
  b(1) = -2.0 * rho(0, 1).imag();
  b(2) = (rho(0, 0) - rho(1, 1)).real();
  return b;
}

}  // namespace qoct
