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

#include "qoct/optimize.hpp"
#include "test_util.hpp"

using namespace qoct;
namespace tu = qoct::testutil;

namespace {

GateProblem closed_one_qubit_problem(const std::string& gate) {
  QubitNetworkSpec spec;
  spec.n1 = 1;
  spec.n2 = 0;
  spec.omega = Vector::Ones(1);
  spec.gamma = Matrix::Zero(1, 1);
  spec.actuators = QubitNetworkSpec::default_actuators(1);
  return make_hamiltonian_problem(spec, target_gate(gate, 1));
}

}  // namespace

TEST_CASE("identity-Hessian quadratic converges in one Newton step") {
  const int n = 6;
  Vector target(n);
  target << 1.0, -2.0, 0.5, 3.0, -0.25, 0.75;
  VectorObjective objective;
  objective.value = [&target](const Vector& x) { return 0.5 * (x - target).squaredNorm(); };
  objective.gradient = [&target](const Vector& x) { return Vector(x - target); };

  OptimizerOptions opts;
  opts.error_threshold = 1e-14;
  opts.max_iterations = 10;
  const auto run = bfgs_minimize_vector(objective, Vector::Zero(n), opts);
  CHECK((run.x - target).norm() <= 1e-10);
  CHECK(run.iterations <= 2);
}

TEST_CASE("closed one-qubit Hadamard reaches the threshold for most seeds") {
  const GateProblem problem = closed_one_qubit_problem("Hadamard");
  OptimizerOptions opts;
  opts.error_threshold = 1e-4;
  opts.max_iterations = 300;
  opts.stall_window = 40;
  opts.stall_ratio = 1e-6;
  int successes = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const ControlField f0 = sample_initial_field(2, 25, 5.0, 0.1, 100 + seed);
    const RunRecord record = bfgs_minimize(problem, f0, opts, 100 + seed, 0.1);
    if (record.final_error < 1e-4) ++successes;
  }
  CHECK(successes > 10);
}

TEST_CASE("stall detector") {
  SUBCASE("geometric decrease never stalls") {
    std::vector<double> history;
    double e = 1.0;
    for (int i = 0; i < 80; ++i) {
      history.push_back(e);
      e *= 0.5;
    }
    for (size_t len = 25; len <= history.size(); ++len)
      CHECK_FALSE(stall_detector(std::span(history.data(), len), 25, 1e-3));
  }

  SUBCASE("constant history stalls once the window fills") {
    const std::vector<double> history(25, 0.3);
    CHECK(stall_detector(history, 25, 1e-3));
    CHECK_THROWS_AS(stall_detector(std::span(history.data(), 10), 25, 1e-3),
                    std::invalid_argument);
  }

  SUBCASE("plateau after fast decrease is flagged within a window") {
    std::vector<double> history;
    double e = 1.0;
    for (int i = 0; i < 30; ++i) {
      history.push_back(e);
      e *= 0.3;
    }
    const size_t plateau_start = history.size();
    for (int i = 0; i < 40; ++i) history.push_back(e * (1.0 - 1e-9 * i));
    const int window = 10;
    size_t first_stall = 0;
    for (size_t len = size_t(window); len <= history.size(); ++len) {
      if (stall_detector(std::span(history.data(), len), window, 1e-3)) {
        first_stall = len;
        break;
      }
    }
    CHECK(first_stall >= plateau_start);
    CHECK(first_stall <= plateau_start + size_t(window));
  }
}

TEST_CASE("inverse-Hessian update satisfies the secant condition") {
  auto gen = tu::rng(2203);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 8;
    Matrix h_inv = Matrix::Identity(n, n);
    // Seed with a previous random symmetric positive-definite update.
    for (int warm = 0; warm < 3; ++warm) {
      Vector s(n), y(n);
      for (int i = 0; i < n; ++i) {
        s(i) = normal(gen);
        y(i) = normal(gen);
      }
      if (s.dot(y) <= 0) y = -y;
      bfgs_update_inverse_hessian(h_inv, s, y);
      CHECK((h_inv * y - s).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((h_inv - Matrix(h_inv.transpose())).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  Matrix h = Matrix::Identity(2, 2);
  Vector s(2), y(2);
  s << 1.0, 0.0;
  y << -1.0, 0.0;
  CHECK_THROWS_AS(bfgs_update_inverse_hessian(h, s, y), std::invalid_argument);
}

TEST_CASE("accepted iterates never increase the objective") {
  const GateProblem problem = closed_one_qubit_problem("T");
  OptimizerOptions opts;
  opts.error_threshold = 1e-8;
  opts.max_iterations = 60;
  const ControlField f0 = sample_initial_field(2, 20, 4.0, 0.5, 7);
  const RunRecord record = bfgs_minimize(problem, f0, opts, 7, 0.5);
  for (size_t i = 1; i < record.history.size(); ++i)
    CHECK(record.history[i] <= record.history[i - 1] + 1e-12);
}

TEST_CASE("identical inputs give bit-identical runs") {
  const GateProblem problem = closed_one_qubit_problem("Hadamard");
  OptimizerOptions opts;
  opts.max_iterations = 40;
  const ControlField f0 = sample_initial_field(2, 15, 3.0, 0.3, 99);
  const RunRecord a = bfgs_minimize(problem, f0, opts, 99, 0.3);
  const RunRecord b = bfgs_minimize(problem, f0, opts, 99, 0.3);
  REQUIRE(a.history.size() == b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) CHECK(a.history[i] == b.history[i]);
  CHECK((a.final_field.values.array() == b.final_field.values.array()).all());
  CHECK(a.final_error == b.final_error);
  CHECK(a.termination == b.termination);
}

TEST_CASE("threshold satisfied at the start returns immediately") {
  VectorObjective objective;
  objective.value = [](const Vector& x) { return x.squaredNorm(); };
  objective.gradient = [](const Vector& x) { return Vector(2.0 * x); };
  OptimizerOptions opts;
  opts.error_threshold = 0.5;
  const auto run = bfgs_minimize_vector(objective, Vector::Zero(3), opts);
  CHECK(run.iterations == 0);
  CHECK(run.termination == Termination::Threshold);
  CHECK(run.history.size() == 1);
}

TEST_CASE("adversarial gradients end in line-search failure") {
  VectorObjective objective;
  objective.value = [](const Vector& x) { return x.squaredNorm(); };
  // Wrong sign: claims descent along +x, where the function increases.
  objective.gradient = [](const Vector& x) { return Vector(-2.0 * x); };
  OptimizerOptions opts;
  opts.error_threshold = 1e-12;
  Vector x0(2);
  x0 << 1.0, 0.5;
  const auto run = bfgs_minimize_vector(objective, x0, opts);
  CHECK(run.termination == Termination::LineSearchFailure);
  CHECK(run.iterations == 0);
}

TEST_CASE("non-finite objectives abort with a diagnostic") {
  VectorObjective objective;
  objective.value = [](const Vector& x) {
    return x(0) > 0.5 ? std::numeric_limits<double>::quiet_NaN() : (x - Vector::Ones(1)).squaredNorm();
  };
  objective.gradient = [](const Vector& x) { return Vector(2.0 * (x - Vector::Ones(1))); };
  OptimizerOptions opts;
  opts.error_threshold = 1e-12;
  Vector x0(1);
  x0 << 0.0;
  CHECK_THROWS(bfgs_minimize_vector(objective, x0, opts));
}

TEST_CASE("curvature violations skip the update and are counted") {
  // A concave bump turns s.y negative on the first step from the origin side.
  VectorObjective objective;
  objective.value = [](const Vector& x) { return 1.0 - std::cos(x(0)); };
  objective.gradient = [](const Vector& x) { return Vector(Vector::Constant(1, std::sin(x(0)))); };
  OptimizerOptions opts;
  opts.error_threshold = 1e-12;
  opts.max_iterations = 400;
  opts.stall_ratio = 0.0;  // run the full budget
  Vector x0(1);
  x0 << 2.9;  // near the top of the bump; early steps see inverted curvature
  const auto run = bfgs_minimize_vector(objective, x0, opts);
  CHECK(run.skipped_updates >= 1);
  CHECK(run.final_value < 0.01);  // still converges to the basin
}
