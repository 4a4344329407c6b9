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

#include <string>
#include <vector>

#include "qoct/types.hpp"

namespace qoct {

enum class Axis { X, Y };

/// One control Hamiltonian H_m = S_q^a. With `leakage` set the same field
/// also drives every noise qubit along the same axis.
struct Actuator {
  int qubit = 0;
  Axis axis = Axis::X;
  bool leakage = false;
};

/// Spin network of n1 system qubits followed by n2 noise qubits.
/// Qubit 0 is the leftmost tensor factor. Frequencies and couplings are in
/// units of the reference qubit frequency.
struct QubitNetworkSpec {
  int n1 = 1;
  int n2 = 0;
  Vector omega;                     // length n1 + n2, all positive
  Matrix gamma;                     // symmetric, zero diagonal, no noise-noise entries
  std::vector<Actuator> actuators;  // control layout, M = actuators.size()

  int total_qubits() const { return n1 + n2; }
  int hilbert_dim() const { return 1 << (n1 + n2); }
  int system_dim() const { return 1 << n1; }
  int noise_dim() const { return 1 << n2; }

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;

  /// One S^x and one S^y control per system qubit, no leakage.
  static std::vector<Actuator> default_actuators(int n1);
};

enum class ChannelKind { SpontaneousEmission, DephasingZ, DephasingX, CorrelatedDephasingZ };

struct LindbladChannel {
  ChannelKind kind = ChannelKind::DephasingZ;
  double rate = 0.0;       // units of the reference frequency, >= 0
  std::vector<int> qubits; // empty means all system qubits
};

using LindbladSpec = std::vector<LindbladChannel>;

/// Orthonormal Hermitian basis: Tr(sigma_m sigma_n) = delta_mn, sigma[0] = I/sqrt(N).
struct HermitianBasis {
  int dim = 0;  // N1
  std::vector<ComplexMatrix> sigma;

  int size() const { return static_cast<int>(sigma.size()); }

  /// Tensor products of {I, sx, sy, sz}/sqrt(2) per qubit. Qubit 0 owns the
  /// most significant base-4 digit of the basis index, so index 0 is I/sqrt(N).
  static HermitianBasis pauli_products(int n_qubits);

  /// Coefficient vector r with rho = sum_n r_n sigma_n, r_n = Tr(sigma_n rho).
  Vector coefficients(const ComplexMatrix& rho) const;
  ComplexMatrix reconstruct(const Vector& r) const;
};

struct TargetGate {
  std::string name;
  ComplexMatrix unitary;
};

/// Standard gates: "Hadamard", "Identity", "T", "CNOT" (control = qubit 0),
/// "QFT" (dimension 2^n1). Names are matched case-insensitively.
TargetGate target_gate(const std::string& name, int n1);

/// Real superoperator in the chosen Hermitian basis.
struct AdjointRep {
  enum class Kind { HamiltonianCommutator, Dissipator, Gate };
  Kind kind = Kind::HamiltonianCommutator;
  Matrix matrix;
};

struct Hamiltonians {
  ComplexMatrix h0;
  std::vector<ComplexMatrix> controls;
};

/// Drift H0 = sum_k w_k S_k^z + sum_{i<j} gamma_ij S_i.S_j plus one control
/// Hamiltonian per actuator, all on the full 2^(n1+n2) space.
Hamiltonians build_hamiltonians(const QubitNetworkSpec& spec);

/// Lindblad operators for the Markovian model (system qubits only, n2 = 0).
/// Rate r enters as V = sqrt(r) A with A in {sigma_minus, sigma_z, sigma_x};
/// correlated dephasing yields a single collective sqrt(r) sum_i sigma_z,i.
std::vector<ComplexMatrix> build_lindblad_operators(const QubitNetworkSpec& spec,
                                                    const LindbladSpec& channels);

/// L_mn = Tr(i H [sigma_m, sigma_n]); real antisymmetric, sigma_1 row/column zero.
AdjointRep adjoint_hamiltonian(const ComplexMatrix& h, const HermitianBasis& basis);

/// D_mn = Tr(V^† sigma_m V sigma_n) - Tr(V^†V (sigma_m sigma_n + sigma_n sigma_m))/2.
AdjointRep adjoint_dissipator(const ComplexMatrix& v, const HermitianBasis& basis);

/// Y_mn = Tr(sigma_m W sigma_n W^†); orthogonal for unitary W.
/// Throws if W deviates from unitarity by more than 1e-8.
AdjointRep adjoint_gate(const ComplexMatrix& w, const HermitianBasis& basis);

}  // namespace qoct
