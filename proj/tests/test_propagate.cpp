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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "qoct/model.hpp"
#include "qoct/propagate.hpp"
#include "test_util.hpp"

using namespace qoct;
namespace tu = qoct::testutil;

namespace {

RealGenerator random_real_generator(int dim, int m_count, std::mt19937_64& gen) {
  RealGenerator g;
  auto random_real = [&gen](int n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = normal(gen);
    return m;
  };
  g.drift = random_real(dim);
  for (int m = 0; m < m_count; ++m) g.controls.push_back(random_real(dim));
  return g;
}

HamiltonianGenerator random_ham_generator(int dim, int m_count, std::mt19937_64& gen) {
  HamiltonianGenerator g;
  g.h0 = tu::random_hermitian(dim, gen);
  for (int m = 0; m < m_count; ++m) g.controls.push_back(tu::random_hermitian(dim, gen));
  return g;
}

// Independent propagation: multiply plain Eigen exponentials slice by slice.
template <typename Gen>
auto brute_force_final(const Gen& gen, const ControlField& field) {
  if constexpr (std::is_same_v<Gen, RealGenerator>) {
    Matrix x = Matrix::Identity(gen.dim(), gen.dim());
    for (int p = 0; p < field.n_slices(); ++p) {
      Matrix g = gen.drift;
      for (int m = 0; m < gen.n_controls(); ++m) g += field.values(m, p) * gen.controls[size_t(m)];
      x = Matrix(Matrix(g * field.dt).exp()) * x;
    }
    return x;
  } else {
    ComplexMatrix x = ComplexMatrix::Identity(gen.dim(), gen.dim());
    for (int p = 0; p < field.n_slices(); ++p) {
      ComplexMatrix h = gen.h0;
      for (int m = 0; m < gen.n_controls(); ++m)
        h += field.values(m, p) * gen.controls[size_t(m)];
      x = ComplexMatrix(ComplexMatrix(-kImag * field.dt * h).exp()) * x;
    }
    return x;
  }
}

}  // namespace

TEST_CASE("augmented block exponential computes the Frechet derivative") {
  auto gen = tu::rng(101);

  SUBCASE("zero direction gives exp(a) and a zero derivative") {
    const ComplexMatrix a = tu::random_complex_matrix(4, gen);
    const auto [ea, da] =
        slice_exp_and_derivative_augmented<Complex>(a, ComplexMatrix::Zero(4, 4));
    CHECK((ea - ComplexMatrix(a.exp())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(da.cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("zero base gives deriv = b") {
    const ComplexMatrix b = tu::random_complex_matrix(3, gen);
    const auto [ea, db] =
        slice_exp_and_derivative_augmented<Complex>(ComplexMatrix::Zero(3, 3), b);
    CHECK((ea - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((db - b).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("random 4x4 matches central differences of exp(a + eps b)") {
    for (int trial = 0; trial < 5; ++trial) {
      const ComplexMatrix a = tu::random_complex_matrix(4, gen);
      const ComplexMatrix b = tu::random_complex_matrix(4, gen);
      const auto [ea, deriv] = slice_exp_and_derivative_augmented<Complex>(a, b);
      const double eps = 1e-6;
      const ComplexMatrix fd =
          (ComplexMatrix(ComplexMatrix(a + eps * b).exp()) -
           ComplexMatrix(ComplexMatrix(a - eps * b).exp())) /
          (2.0 * eps);
      CHECK((deriv - fd).cwiseAbs().maxCoeff() / std::max(1.0, fd.cwiseAbs().maxCoeff()) < 1e-6);
    }
  }

  SUBCASE("mismatched blocks are rejected") {
    CHECK_THROWS_AS(slice_exp_and_derivative_augmented<Complex>(ComplexMatrix::Zero(3, 3),
                                                                ComplexMatrix::Zero(4, 4)),
                    std::invalid_argument);
  }
}

TEST_CASE("spectral slice derivative") {
  auto gen = tu::rng(113);
  const double dt = 0.37;

  SUBCASE("direction commuting with the Hamiltonian") {
    // h and hm diagonal, hence commuting; deriv = -i dt hm exp(-i h dt).
    ComplexMatrix h = ComplexMatrix::Zero(3, 3);
    h.diagonal() << 0.4, 1.3, -0.2;
    ComplexMatrix hm = ComplexMatrix::Zero(3, 3);
    hm.diagonal() << 1.0, -2.0, 0.5;
    const auto [expg, deriv] = slice_exp_and_derivative_spectral(h, hm, dt);
    const ComplexMatrix expected = -kImag * dt * hm * expg;
    CHECK((deriv - expected).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("fully degenerate limit h = 0") {
    const ComplexMatrix hm = tu::random_hermitian(4, gen);
    const auto [expg, deriv] =
        slice_exp_and_derivative_spectral(ComplexMatrix::Zero(4, 4), hm, dt);
    CHECK((expg - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((deriv - ComplexMatrix(-kImag * dt * hm)).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("agrees with the augmented route on random slices") {
    for (int trial = 0; trial < 5; ++trial) {
      const ComplexMatrix h = tu::random_hermitian(2, gen);
      const ComplexMatrix hm = tu::random_hermitian(2, gen);
      const auto [expg_s, deriv_s] = slice_exp_and_derivative_spectral(h, hm, dt);
      const auto [expg_a, deriv_a] = slice_exp_and_derivative_augmented<Complex>(
          ComplexMatrix(-kImag * dt * h), ComplexMatrix(-kImag * dt * hm));
      CHECK((expg_s - expg_a).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((deriv_s - deriv_a).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  SUBCASE("non-Hermitian input is signalled") {
    ComplexMatrix bad = tu::random_complex_matrix(3, gen);
    bad(0, 1) += Complex(0.5, 0.5);
    CHECK_THROWS_AS(slice_exp_and_derivative_spectral(bad, ComplexMatrix::Identity(3, 3), dt),
                    NonDiagonalisableError);
  }

  SUBCASE("requesting the spectral route for a real generator falls back by signalling") {
    auto gen2 = tu::rng(7);
    const RealGenerator rg = random_real_generator(4, 1, gen2);
    const ControlField f = sample_initial_field(1, 3, 1.0, 0.5, 2);
    CHECK_THROWS_AS(propagate(rg, f, PropagationRoute::Spectral), NonDiagonalisableError);
    ComplexMatrix x;
    try {
      propagate(rg, f, PropagationRoute::Spectral);
    } catch (const NonDiagonalisableError&) {
      // Fall back exactly as a caller would.
      const auto cache = propagate(rg, f, PropagationRoute::Augmented);
      CHECK((cache.final_propagator() - brute_force_final(rg, f)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("propagation basics") {
  SUBCASE("zero drift and zero field give the identity") {
    RealGenerator g;
    g.drift = Matrix::Zero(4, 4);
    g.controls = {Matrix::Zero(4, 4)};
    const ControlField f = make_control_field(1, 5, 2.0);
    const auto cache = propagate(g, f);
    CHECK((cache.final_propagator() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((cache.forward(0) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((cache.backward(5) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("resonant pi pulse flips the qubit") {
    HamiltonianGenerator g;
    g.h0 = ComplexMatrix::Zero(2, 2);
    g.controls = {spin_operator(0, 'x', 1)};  // S^x, so f = pi/T rotates by pi
    const double t_total = 4.0;
    ControlField f = make_control_field(1, 8, t_total);
    f.values.setConstant(std::numbers::pi / t_total);
    const auto cache = propagate(g, f);
    CHECK(std::abs(std::abs(cache.final_propagator()(1, 0)) - 1.0) < 1e-10);
  }

  SUBCASE("markovian dephasing decay matches the integration oracle") {
    const HermitianBasis basis = HermitianBasis::pauli_products(1);
    const double rate = 0.05, t_total = 2.0;
    const ComplexMatrix v = std::sqrt(rate) * pauli('z');
    RealGenerator g;
    g.drift = adjoint_dissipator(v, basis).matrix;
    g.controls = {adjoint_hamiltonian(spin_operator(0, 'x', 1), basis).matrix};
    const ControlField f = make_control_field(1, 10, t_total);
    const auto cache = propagate(g, f);
    auto oracle_gen = tu::rng(5);
    const ComplexMatrix rho0 = tu::random_density(2, oracle_gen);
    const ComplexMatrix rho_oracle =
        tu::rk4_evolve(rho0, ComplexMatrix::Zero(2, 2), {v}, t_total, 1e-4);
    const ComplexMatrix rho_ours =
        basis.reconstruct(Vector(cache.final_propagator() * basis.coefficients(rho0)));
    CHECK((rho_ours - rho_oracle).cwiseAbs().maxCoeff() < 1e-8);
    // Coherence ratio as computed by the oracle.
    const double expected_ratio = std::abs(rho_oracle(0, 1) / rho0(0, 1));
    CHECK(std::abs(rho_ours(0, 1) / rho0(0, 1)) == doctest::Approx(expected_ratio).epsilon(1e-8));
    CHECK(expected_ratio == doctest::Approx(std::exp(-2.0 * rate * t_total)).epsilon(1e-6));
  }

  SUBCASE("non-finite fields are rejected") {
    RealGenerator g;
    g.drift = Matrix::Zero(2, 2);
    g.controls = {Matrix::Identity(2, 2)};
    ControlField f = make_control_field(1, 2, 1.0);
    f.values(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(propagate(g, f), std::invalid_argument);
  }

  SUBCASE("control count mismatch is rejected") {
    RealGenerator g;
    g.drift = Matrix::Zero(2, 2);
    g.controls = {Matrix::Identity(2, 2)};
    const ControlField f = make_control_field(2, 2, 1.0);
    CHECK_THROWS_AS(propagate(g, f), std::invalid_argument);
  }
}

TEST_CASE("evolution gradient against finite differences") {
  auto gen = tu::rng(211);

  SUBCASE("K = 1 reduces to the slice derivative block") {
    const HamiltonianGenerator g = random_ham_generator(2, 1, gen);
    ControlField f = make_control_field(1, 1, 0.8);
    f.values(0, 0) = 0.3;
    const auto cache = propagate(g, f);
    CHECK((cache.evolution_gradient(0, 0) - cache.derivative_block(0, 0)).cwiseAbs().maxCoeff() <
          1e-13);
  }

  SUBCASE("random one-qubit problem, all entries, both routes") {
    const HamiltonianGenerator g = random_ham_generator(2, 2, gen);
    const ControlField f = sample_initial_field(2, 6, 2.4, 0.8, 31);
    for (const auto route : {PropagationRoute::Spectral, PropagationRoute::Augmented}) {
      const auto cache = propagate(g, f, route);
      const double eps = 1e-6;
      for (int m = 0; m < 2; ++m) {
        for (int p = 0; p < 6; ++p) {
          ControlField up = f, down = f;
          up.values(m, p) += eps;
          down.values(m, p) -= eps;
          const ComplexMatrix fd =
              (brute_force_final(g, up) - brute_force_final(g, down)) / (2.0 * eps);
          const ComplexMatrix an = cache.evolution_gradient(m, p);
          CHECK((an - fd).cwiseAbs().maxCoeff() / std::max(fd.cwiseAbs().maxCoeff(), 1e-12) <
                1e-6);
        }
      }
    }
  }

  SUBCASE("markovian two-qubit problem") {
    const HermitianBasis basis = HermitianBasis::pauli_products(2);
    QubitNetworkSpec spec;
    spec.n1 = 2;
    spec.n2 = 0;
    spec.omega = Vector::Zero(2);
    spec.omega << 0.95, 1.05;
    spec.gamma = Matrix::Zero(2, 2);
    spec.gamma(0, 1) = spec.gamma(1, 0) = 1.0;
    spec.actuators = QubitNetworkSpec::default_actuators(2);
    const Hamiltonians h = build_hamiltonians(spec);
    RealGenerator g;
    g.drift = adjoint_hamiltonian(h.h0, basis).matrix +
              adjoint_dissipator(std::sqrt(0.02) * ComplexMatrix(2.0 * spin_operator(0, 'z', 2)),
                                 basis)
                  .matrix;
    for (const auto& hm : h.controls)
      g.controls.push_back(adjoint_hamiltonian(hm, basis).matrix);
    const ControlField f = sample_initial_field(4, 3, 1.5, 0.4, 17);
    const auto cache = propagate(g, f);
    const double eps = 1e-6;
    for (int m = 0; m < 4; ++m) {
      for (int p = 0; p < 3; ++p) {
        ControlField up = f, down = f;
        up.values(m, p) += eps;
        down.values(m, p) -= eps;
        const Matrix fd = (brute_force_final(g, up) - brute_force_final(g, down)) / (2.0 * eps);
        const Matrix an = cache.evolution_gradient(m, p);
        CHECK((an - fd).cwiseAbs().maxCoeff() / std::max(fd.cwiseAbs().maxCoeff(), 1e-12) < 1e-5);
      }
    }
  }
}

TEST_CASE("gradient_of_overlap agrees with assembled evolution gradients") {
  auto gen = tu::rng(307);

  SUBCASE("hamiltonian spectral route") {
    const HamiltonianGenerator g = random_ham_generator(4, 2, gen);
    const ControlField f = sample_initial_field(2, 5, 1.7, 0.6, 41);
    const ComplexMatrix c = tu::random_complex_matrix(4, gen);
    const auto cache = propagate(g, f);
    const Vector fast = cache.gradient_of_overlap(c);
    for (int m = 0; m < 2; ++m)
      for (int p = 0; p < 5; ++p) {
        const Complex direct = (c.adjoint() * cache.evolution_gradient(m, p)).trace();
        CHECK(fast(m * 5 + p) == doctest::Approx(direct.real()).epsilon(1e-9));
      }
  }

  SUBCASE("real augmented route") {
    const RealGenerator g = random_real_generator(4, 2, gen);
    const ControlField f = sample_initial_field(2, 4, 1.1, 0.5, 43);
    Matrix c(4, 4);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) c(i, j) = normal(gen);
    const auto cache = propagate(g, f);
    const Vector fast = cache.gradient_of_overlap(c);
    for (int m = 0; m < 2; ++m)
      for (int p = 0; p < 4; ++p) {
        const double direct = (c.transpose() * cache.evolution_gradient(m, p)).trace();
        CHECK(fast(m * 4 + p) == doctest::Approx(direct).epsilon(1e-9));
      }
  }
}

TEST_CASE("finite difference gradient helper") {
  SUBCASE("linear objective is recovered exactly") {
    Matrix coeff(2, 3);
    coeff << 1.0, -2.0, 0.5, 3.0, 0.25, -1.5;
    auto objective = [&coeff](const ControlField& f) {
      return (coeff.array() * f.values.array()).sum();
    };
    ControlField f = make_control_field(2, 3, 3.0);
    f.values.setConstant(0.2);
    const Vector grad = finite_difference_gradient(objective, f, 1e-6);
    for (int m = 0; m < 2; ++m)
      for (int p = 0; p < 3; ++p)
        CHECK(std::abs(grad(m * 3 + p) - coeff(m, p)) < 1e-9);
  }

  SUBCASE("quadratic objective error scales linearly in the step") {
    auto objective = [](const ControlField& f) { return f.values.squaredNorm(); };
    ControlField f = make_control_field(1, 2, 1.0);
    f.values << 0.7, -0.4;
    const Vector exact = 2.0 * f.flatten();
    const double err4 = (finite_difference_gradient(objective, f, 1e-4) - exact).norm();
    const double err5 = (finite_difference_gradient(objective, f, 1e-5) - exact).norm();
    CHECK(err4 / err5 == doctest::Approx(10.0).epsilon(0.2));
  }

  SUBCASE("non-finite objective values are reported") {
    auto objective = [](const ControlField&) { return std::numeric_limits<double>::quiet_NaN(); };
    const ControlField f = make_control_field(1, 2, 1.0);
    CHECK_THROWS_AS(finite_difference_gradient(objective, f, 1e-6), std::runtime_error);
  }
}

TEST_CASE("propagation invariants") {
  auto gen = tu::rng(419);

  SUBCASE("unitarity of hamiltonian propagation") {
    const HamiltonianGenerator g = random_ham_generator(4, 2, gen);
    for (int trial = 0; trial < 20; ++trial) {
      const ControlField f = sample_initial_field(2, 7, 2.0, tu::uniform(gen, 0.05, 3.0),
                                                  800 + trial);
      const auto x = propagate(g, f).final_propagator();
      CHECK((x.adjoint() * x - ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  SUBCASE("trace preservation of markovian propagation") {
    const HermitianBasis basis = HermitianBasis::pauli_products(1);
    RealGenerator g;
    g.drift = adjoint_hamiltonian(spin_operator(0, 'z', 1), basis).matrix +
              adjoint_dissipator(std::sqrt(0.1) * pauli('z'), basis).matrix;
    g.controls = {adjoint_hamiltonian(spin_operator(0, 'x', 1), basis).matrix,
                  adjoint_hamiltonian(spin_operator(0, 'y', 1), basis).matrix};
    for (int trial = 0; trial < 20; ++trial) {
      const ControlField f = sample_initial_field(2, 6, 3.0, tu::uniform(gen, 0.05, 3.0),
                                                  900 + trial);
      const Matrix x = propagate(g, f).final_propagator();
      CHECK(std::abs(x(0, 0) - 1.0) < 1e-10);
      CHECK(x.row(0).tail(x.cols() - 1).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  SUBCASE("composition over half intervals") {
    const HamiltonianGenerator g = random_ham_generator(4, 2, gen);
    const int k_total = 8;
    const ControlField f = sample_initial_field(2, k_total, 2.0, 0.8, 1001);
    ControlField first = make_control_field(2, k_total / 2, 1.0);
    ControlField second = make_control_field(2, k_total / 2, 1.0);
    first.values = f.values.leftCols(k_total / 2);
    second.values = f.values.rightCols(k_total / 2);
    const ComplexMatrix whole = propagate(g, f).final_propagator();
    const ComplexMatrix split =
        propagate(g, second).final_propagator() * propagate(g, first).final_propagator();
    CHECK((whole - split).cwiseAbs().maxCoeff() < 1e-10);
  }
}
