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

#include "qoct/model.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qoct {

namespace {

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Tr(ab) for products known to be real up to roundoff.
  return a.cwiseProduct(b.transpose()).sum().real();
}

}  // namespace

void QubitNetworkSpec::validate() const {
  const int n = total_qubits();
  if (n1 < 1 || n2 < 0) throw std::invalid_argument("QubitNetworkSpec: need n1 >= 1, n2 >= 0");
  if (omega.size() != n) throw std::invalid_argument("QubitNetworkSpec: omega must have n1+n2 entries");
  if ((omega.array() <= 0.0).any())
    throw std::invalid_argument("QubitNetworkSpec: frequencies must be positive");
  if (gamma.rows() != n || gamma.cols() != n)
    throw std::invalid_argument("QubitNetworkSpec: gamma must be (n1+n2) x (n1+n2)");
  double max_sn = 0.0, min_ss = std::numeric_limits<double>::infinity();
  bool any_ss = false, any_sn = false;
  for (int i = 0; i < n; ++i) {
    if (gamma(i, i) != 0.0) throw std::invalid_argument("QubitNetworkSpec: gamma diagonal must be zero");
    for (int j = i + 1; j < n; ++j) {
      if (gamma(i, j) != gamma(j, i))
        throw std::invalid_argument("QubitNetworkSpec: gamma must be symmetric");
      const bool i_noise = i >= n1, j_noise = j >= n1;
      if (i_noise && j_noise && gamma(i, j) != 0.0)
        throw std::invalid_argument("QubitNetworkSpec: noise-noise couplings are not modelled");
      if (gamma(i, j) != 0.0) {
        if (!i_noise && !j_noise) {
          any_ss = true;
          min_ss = std::min(min_ss, std::abs(gamma(i, j)));
        } else {
          any_sn = true;
          max_sn = std::max(max_sn, std::abs(gamma(i, j)));
        }
      }
    }
  }
  if (any_ss && any_sn && min_ss < max_sn)
    throw std::invalid_argument(
        "QubitNetworkSpec: system-system couplings must not be weaker than system-noise couplings");
  if (actuators.empty()) throw std::invalid_argument("QubitNetworkSpec: no actuators");
  for (const auto& a : actuators)
    if (a.qubit < 0 || a.qubit >= n1)
      throw std::invalid_argument("QubitNetworkSpec: actuator references an out-of-range system qubit");
}

std::vector<Actuator> QubitNetworkSpec::default_actuators(int n1) {
  std::vector<Actuator> out;
  out.reserve(2 * size_t(n1));
  for (int q = 0; q < n1; ++q) {
    out.push_back({q, Axis::X, false});
    out.push_back({q, Axis::Y, false});
  }
  return out;
}

HermitianBasis HermitianBasis::pauli_products(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 5)
    throw std::invalid_argument("HermitianBasis: supported sizes are 1..5 qubits");
  const char axes[4] = {'i', 'x', 'y', 'z'};
  const double norm = 1.0 / std::sqrt(2.0);
  HermitianBasis basis;
  basis.dim = 1 << n_qubits;
  const int count = basis.dim * basis.dim;
  basis.sigma.reserve(count);
  for (int k = 0; k < count; ++k) {
    ComplexMatrix m = ComplexMatrix::Identity(1, 1);
    // Qubit 0 reads the most significant base-4 digit.
    for (int q = 0; q < n_qubits; ++q) {
      const int digit = (k >> (2 * (n_qubits - 1 - q))) & 3;
      m = kron<Complex>(m, ComplexMatrix(norm * pauli(axes[digit])));
    }
    basis.sigma.push_back(std::move(m));
  }
  return basis;
}

Vector HermitianBasis::coefficients(const ComplexMatrix& rho) const {
  Vector r(size());
  for (int n = 0; n < size(); ++n) r(n) = trace_product(sigma[n], rho);
  return r;
}

ComplexMatrix HermitianBasis::reconstruct(const Vector& r) const {
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (int n = 0; n < size(); ++n) rho += r(n) * sigma[n];
  return rho;
}

TargetGate target_gate(const std::string& name, int n1) {
  std::string key;
  for (char c : name) key += char(std::tolower(static_cast<unsigned char>(c)));
  const int dim = 1 << n1;
  if (key == "identity" || key == "id") return {"Identity", ComplexMatrix::Identity(dim, dim)};
  if (key == "hadamard" || key == "had") {
    if (n1 != 1) throw std::invalid_argument("target_gate: Hadamard is a one-qubit gate");
    ComplexMatrix w(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    w << s, s, s, -s;
    return {"Hadamard", w};
  }
  if (key == "t") {
    if (n1 != 1) throw std::invalid_argument("target_gate: T is a one-qubit gate");
    ComplexMatrix w = ComplexMatrix::Zero(2, 2);
    w(0, 0) = 1.0;
    w(1, 1) = std::exp(kImag * (std::numbers::pi / 4.0));
    return {"T", w};
  }
  if (key == "cnot") {
    if (n1 != 2) throw std::invalid_argument("target_gate: CNOT is a two-qubit gate");
    ComplexMatrix w = ComplexMatrix::Zero(4, 4);
    w(0, 0) = w(1, 1) = w(2, 3) = w(3, 2) = 1.0;  // control = qubit 0 (leftmost)
    return {"CNOT", w};
  }
  if (key == "qft" || key == "qft-" + std::to_string(n1)) {
    ComplexMatrix w(dim, dim);
    const Complex root = std::exp(kImag * (2.0 * std::numbers::pi / double(dim)));
    const double norm = 1.0 / std::sqrt(double(dim));
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) w(j, k) = norm * std::pow(root, double(j) * double(k));
    return {"QFT", w};
  }
  throw std::invalid_argument("target_gate: unknown gate '" + name + "' for " + std::to_string(n1) +
                              " qubits");
}

Hamiltonians build_hamiltonians(const QubitNetworkSpec& spec) {
  spec.validate();
  const int n = spec.total_qubits();
  const int dim = spec.hilbert_dim();
  Hamiltonians out;
  out.h0 = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k) out.h0 += spec.omega(k) * spin_operator(k, 'z', n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (spec.gamma(i, j) == 0.0) continue;
      for (char axis : {'x', 'y', 'z'})
        out.h0 += spec.gamma(i, j) * (spin_operator(i, axis, n) * spin_operator(j, axis, n));
    }
  }
  out.controls.reserve(spec.actuators.size());
  for (const auto& act : spec.actuators) {
    const char axis = act.axis == Axis::X ? 'x' : 'y';
    ComplexMatrix hm = spin_operator(act.qubit, axis, n);
    if (act.leakage)
      for (int q = spec.n1; q < n; ++q) hm += spin_operator(q, axis, n);
    out.controls.push_back(std::move(hm));
  }
  return out;
}

std::vector<ComplexMatrix> build_lindblad_operators(const QubitNetworkSpec& spec,
                                                    const LindbladSpec& channels) {
  if (spec.n2 != 0)
    throw std::invalid_argument("build_lindblad_operators: Markovian model has no noise qubits");
  const int n = spec.n1;
  const int dim = spec.system_dim();
  ComplexMatrix sigma_minus(2, 2);
  sigma_minus << 0, 1, 0, 0;  // |0><1|

  auto on_qubit = [&](const ComplexMatrix& op, int q) {
    ComplexMatrix full = ComplexMatrix::Identity(1, 1);
    for (int i = 0; i < n; ++i)
      full = kron<Complex>(full, i == q ? op : ComplexMatrix(ComplexMatrix::Identity(2, 2)));
    return full;
  };

  std::vector<ComplexMatrix> ops;
  for (const auto& ch : channels) {
    if (ch.rate < 0.0) throw std::invalid_argument("build_lindblad_operators: negative rate");
    std::vector<int> scope = ch.qubits;
    if (scope.empty())
      for (int q = 0; q < n; ++q) scope.push_back(q);
    for (int q : scope)
      if (q < 0 || q >= n) throw std::invalid_argument("build_lindblad_operators: qubit out of range");
    const double amp = std::sqrt(ch.rate);
    switch (ch.kind) {
      case ChannelKind::SpontaneousEmission:
        for (int q : scope) ops.push_back(amp * on_qubit(sigma_minus, q));
        break;
      case ChannelKind::DephasingZ:
        for (int q : scope) ops.push_back(amp * on_qubit(pauli('z'), q));
        break;
      case ChannelKind::DephasingX:
        for (int q : scope) ops.push_back(amp * on_qubit(pauli('x'), q));
        break;
      case ChannelKind::CorrelatedDephasingZ: {
        ComplexMatrix v = ComplexMatrix::Zero(dim, dim);
        for (int q : scope) v += on_qubit(pauli('z'), q);
        ops.push_back(amp * v);
        break;
      }
      default:
        throw std::invalid_argument("build_lindblad_operators: unknown channel kind");
    }
  }
  return ops;
}

AdjointRep adjoint_hamiltonian(const ComplexMatrix& h, const HermitianBasis& basis) {
  const int nb = basis.size();
  if (h.rows() != basis.dim || h.cols() != basis.dim)
    throw std::invalid_argument("adjoint_hamiltonian: dimension mismatch");
  // L_mn = Tr(iH [sigma_m, sigma_n]) = i (Tr(H sigma_m sigma_n) - Tr(H sigma_n sigma_m))
  std::vector<ComplexMatrix> hs(nb);
  for (int m = 0; m < nb; ++m) hs[m] = h * basis.sigma[m];
  Matrix l = Matrix::Zero(nb, nb);
  for (int m = 0; m < nb; ++m) {
    for (int n = m + 1; n < nb; ++n) {
      const Complex t_mn = (hs[m].cwiseProduct(basis.sigma[n].transpose())).sum();
      const Complex t_nm = (hs[n].cwiseProduct(basis.sigma[m].transpose())).sum();
      const double val = (kImag * (t_mn - t_nm)).real();
      l(m, n) = val;
      l(n, m) = -val;
    }
  }
  return {AdjointRep::Kind::HamiltonianCommutator, std::move(l)};
}

AdjointRep adjoint_dissipator(const ComplexMatrix& v, const HermitianBasis& basis) {
  const int nb = basis.size();
  if (v.rows() != basis.dim || v.cols() != basis.dim || v.rows() != v.cols())
    throw std::invalid_argument("adjoint_dissipator: dimension mismatch");
  const ComplexMatrix vdag = v.adjoint();
  const ComplexMatrix vdv = vdag * v;
  std::vector<ComplexMatrix> sandwich(nb), anti(nb);
  for (int m = 0; m < nb; ++m) {
    sandwich[m] = vdag * basis.sigma[m] * v;
    anti[m] = vdv * basis.sigma[m];
  }
  Matrix d = Matrix::Zero(nb, nb);
  for (int m = 0; m < nb; ++m) {
    for (int n = 0; n < nb; ++n) {
      const Complex first = sandwich[m].cwiseProduct(basis.sigma[n].transpose()).sum();
      const Complex second = anti[m].cwiseProduct(basis.sigma[n].transpose()).sum() +
                             anti[n].cwiseProduct(basis.sigma[m].transpose()).sum();
      d(m, n) = (first - 0.5 * second).real();
    }
  }
  return {AdjointRep::Kind::Dissipator, std::move(d)};
}

AdjointRep adjoint_gate(const ComplexMatrix& w, const HermitianBasis& basis) {
  const int nb = basis.size();
  if (w.rows() != basis.dim || w.cols() != basis.dim)
    throw std::invalid_argument("adjoint_gate: dimension mismatch");
  const double defect = (w.adjoint() * w - ComplexMatrix::Identity(w.rows(), w.cols()))
                            .cwiseAbs()
                            .maxCoeff();
  if (defect > 1e-8) throw std::invalid_argument("adjoint_gate: input is not unitary");
  std::vector<ComplexMatrix> conj(nb);
  for (int n = 0; n < nb; ++n) conj[n] = w * basis.sigma[n] * w.adjoint();
  Matrix y(nb, nb);
  for (int m = 0; m < nb; ++m)
    for (int n = 0; n < nb; ++n) y(m, n) = basis.sigma[m].cwiseProduct(conj[n].transpose()).sum().real();
  return {AdjointRep::Kind::Gate, std::move(y)};
}

}  // namespace qoct
