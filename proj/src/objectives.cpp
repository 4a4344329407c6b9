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

#include "qoct/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace qoct {

namespace {

constexpr double kClampTol = 1e-10;
constexpr double kUnitaryTol = 1e-8;

double clamped_sqrt(double radicand, const char* what) {
  if (radicand < -kClampTol) throw std::runtime_error(std::string(what) + ": radicand below -1e-10");
  return std::sqrt(std::max(radicand, 0.0));
}

void require_unitary(const ComplexMatrix& x, const char* what) {
  const double defect =
      (x.adjoint() * x - ComplexMatrix::Identity(x.rows(), x.cols())).cwiseAbs().maxCoeff();
  if (defect > kUnitaryTol)
    throw std::runtime_error(std::string(what) + ": propagator is not unitary to 1e-8");
}

}  // namespace

GateProblem make_markovian_problem(const QubitNetworkSpec& spec, const LindbladSpec& channels,
                                   const TargetGate& gate) {
  spec.validate();
  if (spec.n2 != 0)
    throw std::invalid_argument("make_markovian_problem: Markovian model has no noise qubits");
  const HermitianBasis basis = HermitianBasis::pauli_products(spec.n1);
  const Hamiltonians h = build_hamiltonians(spec);

  GateProblem problem;
  problem.kind = ProblemKind::Markovian;
  problem.n1_dim = spec.system_dim();
  problem.n2_dim = 1;
  problem.target = gate;
  problem.target_adjoint = adjoint_gate(gate.unitary, basis).matrix;
  problem.real_gen.drift = adjoint_hamiltonian(h.h0, basis).matrix;
  for (const auto& v : build_lindblad_operators(spec, channels))
    problem.real_gen.drift += adjoint_dissipator(v, basis).matrix;
  problem.real_gen.controls.reserve(h.controls.size());
  for (const auto& hm : h.controls)
    problem.real_gen.controls.push_back(adjoint_hamiltonian(hm, basis).matrix);
  return problem;
}

GateProblem make_hamiltonian_problem(const QubitNetworkSpec& spec, const TargetGate& gate) {
  spec.validate();
  const Hamiltonians h = build_hamiltonians(spec);
  GateProblem problem;
  problem.kind = spec.n2 == 0 ? ProblemKind::Closed : ProblemKind::NonMarkovian;
  problem.n1_dim = spec.system_dim();
  problem.n2_dim = spec.noise_dim();
  problem.target = gate;
  problem.ham_gen.h0 = h.h0;
  problem.ham_gen.controls = h.controls;
  return problem;
}

MarkovianError markovian_error(const Matrix& x_final, const Matrix& y) {
  if (x_final.rows() != y.rows() || x_final.cols() != y.cols() || y.rows() != y.cols())
    throw std::invalid_argument("markovian_error: dimension mismatch");
  const double n1_sq = double(y.rows());  // N1^2
  const double lambda = 1.0 / (2.0 * n1_sq);
  MarkovianError out;
  const Matrix diff = y - x_final;
  out.e1_prime = lambda * diff.squaredNorm();
  out.f1 = clamped_sqrt(1.0 - out.e1_prime, "markovian_error");
  out.e1 = 1.0 - out.f1;
  return out;
}

Vector markovian_gradient(const PropagationCache<double>& cache, const Matrix& y) {
  const double n1_sq = double(y.rows());
  const double lambda = 1.0 / (2.0 * n1_sq);
  const Matrix cotangent = -2.0 * lambda * (y - cache.final_propagator());
  return cache.gradient_of_overlap(cotangent);
}

NonMarkovianError nonmarkovian_error(const ComplexMatrix& x_final, const ComplexMatrix& w,
                                     int n1_dim, int n2_dim) {
  if (x_final.rows() != Eigen::Index(n1_dim) * n2_dim || w.rows() != n1_dim || w.cols() != n1_dim)
    throw std::invalid_argument("nonmarkovian_error: dimension mismatch");
  require_unitary(x_final, "nonmarkovian_error");
  const double n = double(n1_dim) * n2_dim;
  NonMarkovianError out;
  const ComplexMatrix w_lifted =
      kron<Complex>(w, ComplexMatrix(ComplexMatrix::Identity(n2_dim, n2_dim)));
  out.q = trace_out_leading(w_lifted.adjoint() * x_final, n1_dim, n2_dim);
  Eigen::JacobiSVD<ComplexMatrix> svd(out.q);
  out.f2 = svd.singularValues().sum() / n;
  out.e2 = 1.0 - out.f2;
  return out;
}

Vector nonmarkovian_gradient(const PropagationCache<Complex>& cache, const ComplexMatrix& w,
                             int n1_dim, int n2_dim) {
  const double n = double(n1_dim) * n2_dim;
  const ComplexMatrix w_lifted =
      kron<Complex>(w, ComplexMatrix(ComplexMatrix::Identity(n2_dim, n2_dim)));
  const ComplexMatrix q =
      trace_out_leading(w_lifted.adjoint() * cache.final_propagator(), n1_dim, n2_dim);
  Eigen::JacobiSVD<ComplexMatrix> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // dE2/df = -(1/N) Re Tr(E G^H dQ); lifting the noise-local factor turns the
  // partial trace into a plain overlap against W (x) (G E^H).
  const ComplexMatrix cotangent =
      (-1.0 / n) * kron<Complex>(w, ComplexMatrix(svd.matrixU() * svd.matrixV().adjoint()));
  return cache.gradient_of_overlap(cotangent);
}

double naive_composite_error(const ComplexMatrix& x_final, const ComplexMatrix& w, int n2_dim) {
  const double n = double(x_final.rows());
  const ComplexMatrix w_lifted =
      kron<Complex>(w, ComplexMatrix(ComplexMatrix::Identity(n2_dim, n2_dim)));
  const Complex overlap = (w_lifted.adjoint() * x_final).trace();
  return 1.0 - std::abs(overlap) / n;
}

ObjectiveEvaluation evaluate_objective(const GateProblem& problem, const ControlField& field,
                                       bool with_gradient) {
  ObjectiveEvaluation out;
  if (problem.kind == ProblemKind::Markovian) {
    const auto cache = propagate(problem.real_gen, field);
    const MarkovianError err = markovian_error(cache.final_propagator(), problem.target_adjoint);
    out.objective = err.e1_prime;
    out.error = err.e1;
    out.fidelity = err.f1;
    if (with_gradient) out.gradient = markovian_gradient(cache, problem.target_adjoint);
  } else {
    const auto cache = propagate(problem.ham_gen, field);
    const NonMarkovianError err =
        nonmarkovian_error(cache.final_propagator(), problem.target.unitary, problem.n1_dim,
                           problem.n2_dim);
    out.objective = err.e2;
    out.error = err.e2;
    out.fidelity = err.f2;
    if (with_gradient)
      out.gradient =
          nonmarkovian_gradient(cache, problem.target.unitary, problem.n1_dim, problem.n2_dim);
  }
  return out;
}

}  // namespace qoct
