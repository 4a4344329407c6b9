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

#include "qoct/model.hpp"
#include "qoct/propagate.hpp"
#include "qoct/types.hpp"

namespace qoct {

enum class ProblemKind { Markovian, NonMarkovian, Closed };

/// A gate-synthesis problem: one generator, one target. Closed problems are
/// non-Markovian problems with a trivial noise factor (N2 = 1).
struct GateProblem {
  ProblemKind kind = ProblemKind::Closed;
  RealGenerator real_gen;          // Markovian only
  HamiltonianGenerator ham_gen;    // closed / non-Markovian only
  TargetGate target;               // W on the system factor
  Matrix target_adjoint;           // Y, Markovian only
  int n1_dim = 2;                  // N1 = 2^n1
  int n2_dim = 1;                  // N2 = 2^n2

  int n_controls() const {
    return kind == ProblemKind::Markovian ? real_gen.n_controls() : ham_gen.n_controls();
  }
};

GateProblem make_markovian_problem(const QubitNetworkSpec& spec, const LindbladSpec& channels,
                                   const TargetGate& gate);
/// Closed when spec.n2 == 0, non-Markovian otherwise.
GateProblem make_hamiltonian_problem(const QubitNetworkSpec& spec, const TargetGate& gate);

struct MarkovianError {
  double e1_prime = 0.0;  // lambda * ||Y - X(T)||_F^2, lambda = 1/(2 N1^2)
  double e1 = 0.0;        // 1 - F1
  double f1 = 0.0;        // sqrt(1 - E1')
};

/// Throws std::runtime_error when 1 - E1' < -1e-10 (numerical corruption);
/// radicands in [-1e-10, 0] clamp to zero.
MarkovianError markovian_error(const Matrix& x_final, const Matrix& y);

/// Gradient of E1' via dE1'/df_mp = -2 lambda Tr(Lambda^T dX(T)/df_mp).
Vector markovian_gradient(const PropagationCache<double>& cache, const Matrix& y);

struct NonMarkovianError {
  double e2 = 0.0;   // 1 - F2
  double f2 = 0.0;   // (sum of singular values of Q) / N
  ComplexMatrix q;   // Tr_S((W (x) I)^dagger X(T)), N2 x N2
};

/// Throws when X(T) deviates from unitarity by more than 1e-8.
NonMarkovianError nonmarkovian_error(const ComplexMatrix& x_final, const ComplexMatrix& w,
                                     int n1_dim, int n2_dim);

/// Gradient of E2. The prefactor (Q^dagger Q)^{-1/2} Q^dagger is evaluated as
/// E G^dagger from the SVD Q = G D E^dagger, so singular Q is handled.
Vector nonmarkovian_gradient(const PropagationCache<Complex>& cache, const ComplexMatrix& w,
                             int n1_dim, int n2_dim);

/// Diagnostic 1 - |Tr((W (x) I)^dagger X(T))| / N; never optimised. Vanishes
/// only when the noise factor evolves as the identity too.
double naive_composite_error(const ComplexMatrix& x_final, const ComplexMatrix& w, int n2_dim);

struct ObjectiveEvaluation {
  double objective = 0.0;  // minimised quantity: E1' (Markovian) or E2
  double error = 0.0;      // comparable gate error: E1 or E2
  double fidelity = 0.0;   // F1 or F2
  Vector gradient;         // d objective / d f_mp, m-major; empty when not requested
};

ObjectiveEvaluation evaluate_objective(const GateProblem& problem, const ControlField& field,
                                       bool with_gradient);

}  // namespace qoct
