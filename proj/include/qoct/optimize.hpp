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

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qoct/controls.hpp"
#include "qoct/objectives.hpp"
#include "qoct/types.hpp"

namespace qoct {

enum class GradientMode { Analytic, FiniteDifference };

struct OptimizerOptions {
  double error_threshold = 1e-4;
  int max_iterations = 500;
  int stall_window = 25;           // iterations
  double stall_ratio = 1e-3;       // relative decrease below this over the window => stalled
  double ls_sufficient_decrease = 1e-4;
  double ls_contraction = 0.5;
  int ls_max_backtracks = 40;
  GradientMode gradient_mode = GradientMode::Analytic;
  double fd_step = 1e-6;

  void validate() const;
};

enum class Termination { Threshold, Stalled, MaxIterations, LineSearchFailure };

const char* to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct RunRecord {
  std::uint64_t seed = 0;
  std::string rng_id;             // sampler identity behind the initial field
  double init_delta = 0.0;        // std deviation the initial field was drawn with
  OptimizerOptions options;
  ControlField initial_field;
  ControlField final_field;
  std::vector<double> history;    // reported error per accepted iterate, history[0] = initial
  int iterations = 0;
  double final_objective = 0.0;   // E1' or E2
  double final_error = 0.0;       // E1 or E2
  double final_fidelity = 0.0;
  double wall_seconds = 0.0;
  double cpu_seconds = 0.0;       // per-thread CPU time; used by success-speed statistics
  Termination termination = Termination::MaxIterations;
  int skipped_updates = 0;        // BFGS updates skipped on curvature violations
};

/// Raised when the objective or gradient turns non-finite; carries the
/// progress made so far so callers can persist a partial record.
struct NonFiniteError : std::runtime_error {
  NonFiniteError(const std::string& what, RunRecord partial_)
      : std::runtime_error(what), partial(std::move(partial_)) {}
  RunRecord partial;
};

/// True when the relative error decrease between history[len-window] and the
/// last entry falls below `ratio`. Requires history.size() >= window >= 2.
bool stall_detector(std::span<const double> history, int window, double ratio);

/// One symmetric inverse-BFGS update; requires y.dot(s) > 0. After the update
/// h_inv * y == s holds to roundoff (secant condition).
void bfgs_update_inverse_hessian(Matrix& h_inv, const Vector& s, const Vector& y);

/// Generic quasi-Newton driver over flat parameter vectors. `value` is the
/// minimised objective; `report` maps an evaluation to the error recorded in
/// the history and checked against the threshold.
struct VectorObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<double(const Vector&)> report;  // defaults to `value`
};

struct VectorRunResult {
  Vector x;
  std::vector<double> history;
  int iterations = 0;
  double final_value = 0.0;
  Termination termination = Termination::MaxIterations;
  int skipped_updates = 0;
};

VectorRunResult bfgs_minimize_vector(const VectorObjective& objective, const Vector& x0,
                                     const OptimizerOptions& opts);

/// BFGS minimisation of the problem's gate error functional starting from
/// field0. The seed and delta are recorded, not consumed; sampling happens in
/// the caller.
RunRecord bfgs_minimize(const GateProblem& problem, const ControlField& field0,
                        const OptimizerOptions& opts, std::uint64_t seed = 0,
                        double init_delta = 0.0);

}  // namespace qoct
