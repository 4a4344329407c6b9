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

#include "qoct/optimize.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <stdexcept>

#include "qoct/propagate.hpp"

namespace qoct {

namespace {

double thread_cpu_seconds() {
  timespec ts{};
  if (clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts) != 0) return 0.0;
  return double(ts.tv_sec) + 1e-9 * double(ts.tv_nsec);
}

struct VectorNonFiniteError : std::runtime_error {
  VectorNonFiniteError(const std::string& what, VectorRunResult partial_)
      : std::runtime_error(what), partial(std::move(partial_)) {}
  VectorRunResult partial;
};

bool same_point(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

void OptimizerOptions::validate() const {
  if (!(error_threshold > 0.0)) throw std::invalid_argument("OptimizerOptions: threshold must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("OptimizerOptions: max_iterations must be >= 1");
  if (stall_window < 2) throw std::invalid_argument("OptimizerOptions: stall window must be >= 2");
  if (!(stall_ratio >= 0.0)) throw std::invalid_argument("OptimizerOptions: stall ratio must be >= 0");
  if (!(ls_sufficient_decrease > 0.0) || ls_sufficient_decrease >= 1.0)
    throw std::invalid_argument("OptimizerOptions: sufficient-decrease constant must be in (0,1)");
  if (!(ls_contraction > 0.0) || ls_contraction >= 1.0)
    throw std::invalid_argument("OptimizerOptions: contraction factor must be in (0,1)");
  if (ls_max_backtracks < 1) throw std::invalid_argument("OptimizerOptions: need >= 1 backtracks");
  if (!(fd_step > 0.0)) throw std::invalid_argument("OptimizerOptions: fd step must be > 0");
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Threshold: return "threshold";
    case Termination::Stalled: return "stalled";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::LineSearchFailure: return "line-search-failure";
  }
  return "unknown";
}

Termination termination_from_string(const std::string& s) {
  if (s == "threshold") return Termination::Threshold;
  if (s == "stalled") return Termination::Stalled;
  if (s == "max-iterations") return Termination::MaxIterations;
  if (s == "line-search-failure") return Termination::LineSearchFailure;
  throw std::invalid_argument("unknown termination reason '" + s + "'");
}

bool stall_detector(std::span<const double> history, int window, double ratio) {
  if (window < 2) throw std::invalid_argument("stall_detector: window must be >= 2");
  if (int(history.size()) < window)
    throw std::invalid_argument("stall_detector: history shorter than window");
  const double first = history[history.size() - size_t(window)];
  const double last = history.back();
  const double denom = std::max(std::abs(first), 1e-300);
  return (first - last) / denom < ratio;
}

void bfgs_update_inverse_hessian(Matrix& h_inv, const Vector& s, const Vector& y) {
  const double sy = s.dot(y);
  if (!(sy > 0.0)) throw std::invalid_argument("bfgs_update_inverse_hessian: curvature violated");
  const double rho = 1.0 / sy;
  const Vector hy = h_inv * y;
  const double yhy = y.dot(hy);
  // (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded to rank-two form.
  h_inv.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
  h_inv.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
}

VectorRunResult bfgs_minimize_vector(const VectorObjective& objective, const Vector& x0,
                                     const OptimizerOptions& opts) {
  opts.validate();
  const auto report = objective.report ? objective.report : objective.value;
  const Eigen::Index n = x0.size();

  VectorRunResult run;
  run.x = x0;
  run.termination = Termination::MaxIterations;
  auto abort_nonfinite = [&run](const char* what) {
    throw VectorNonFiniteError(what, run);
  };

  double value = objective.value(run.x);
  double reported = report(run.x);
  Vector grad = objective.gradient(run.x);
  if (!std::isfinite(value) || !std::isfinite(reported) || !grad.allFinite())
    abort_nonfinite("bfgs_minimize: non-finite objective or gradient at the start");
  run.history.push_back(reported);
  run.final_value = reported;

  if (reported <= opts.error_threshold) {
    run.termination = Termination::Threshold;
    return run;
  }

  Matrix h_inv = Matrix::Identity(n, n);
  for (int k = 0; k < opts.max_iterations; ++k) {
    Vector direction = -(h_inv * grad);
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      // Not a descent direction; restart from the identity Hessian.
      h_inv.setIdentity();
      direction = -grad;
      slope = -grad.squaredNorm();
      if (!(slope < 0.0)) {
        run.termination = Termination::LineSearchFailure;
        break;
      }
    }

    double alpha = 1.0;
    double trial_value = 0.0;
    Vector trial;
    bool accepted = false;
    for (int bt = 0; bt < opts.ls_max_backtracks; ++bt) {
      trial = run.x + alpha * direction;
      trial_value = objective.value(trial);
      if (!std::isfinite(trial_value))
        abort_nonfinite("bfgs_minimize: non-finite objective during line search");
      if (trial_value <= value + opts.ls_sufficient_decrease * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= opts.ls_contraction;
    }
    if (!accepted) {
      run.termination = Termination::LineSearchFailure;
      break;
    }

    Vector new_grad = objective.gradient(trial);
    if (!new_grad.allFinite()) abort_nonfinite("bfgs_minimize: non-finite gradient");
    const Vector s = trial - run.x;
    const Vector y = new_grad - grad;
    const double sy = s.dot(y);
    if (sy > 0.0)
      bfgs_update_inverse_hessian(h_inv, s, y);
    else
      ++run.skipped_updates;

    run.x = std::move(trial);
    value = trial_value;
    grad = std::move(new_grad);
    reported = report(run.x);
    if (!std::isfinite(reported)) abort_nonfinite("bfgs_minimize: non-finite reported error");
    run.history.push_back(reported);
    ++run.iterations;

    if (reported <= opts.error_threshold) {
      run.termination = Termination::Threshold;
      break;
    }
    if (int(run.history.size()) >= opts.stall_window &&
        stall_detector(run.history, opts.stall_window, opts.stall_ratio)) {
      run.termination = Termination::Stalled;
      break;
    }
  }
  run.final_value = run.history.back();
  return run;
}

RunRecord bfgs_minimize(const GateProblem& problem, const ControlField& field0,
                        const OptimizerOptions& opts, std::uint64_t seed, double init_delta) {
  opts.validate();
  field0.validate();
  if (field0.n_controls() != problem.n_controls())
    throw std::invalid_argument("bfgs_minimize: field does not match the problem's control layout");
  const auto wall_start = std::chrono::steady_clock::now();
  const double cpu_start = thread_cpu_seconds();

  RunRecord record;
  record.seed = seed;
  record.rng_id = kFieldSamplerId;
  record.init_delta = init_delta;
  record.options = opts;
  record.initial_field = field0;
  record.final_field = field0;

  ControlField shaped = field0;
  auto to_field = [&shaped](const Vector& x) -> const ControlField& {
    shaped.unflatten(x);
    return shaped;
  };

  // The most recent full evaluation is cached so that the gradient and the
  // reported error at the accepted iterate share one propagation.
  Vector cached_x;
  ObjectiveEvaluation cached;
  auto eval_full = [&](const Vector& x) -> const ObjectiveEvaluation& {
    if (!same_point(cached_x, x)) {
      cached = evaluate_objective(problem, to_field(x), opts.gradient_mode == GradientMode::Analytic);
      cached_x = x;
    }
    return cached;
  };

  VectorObjective objective;
  objective.value = [&](const Vector& x) {
    if (same_point(cached_x, x)) return cached.objective;
    return evaluate_objective(problem, to_field(x), false).objective;
  };
  objective.report = [&](const Vector& x) { return eval_full(x).error; };
  if (opts.gradient_mode == GradientMode::Analytic) {
    objective.gradient = [&](const Vector& x) { return eval_full(x).gradient; };
  } else {
    objective.gradient = [&](const Vector& x) {
      const ControlField base = to_field(x);
      return finite_difference_gradient(
          [&](const ControlField& f) { return evaluate_objective(problem, f, false).objective; },
          base, opts.fd_step);
    };
  }

  auto finalize = [&](const VectorRunResult& run) {
    record.final_field.unflatten(run.x);
    record.history = run.history;
    record.iterations = run.iterations;
    record.termination = run.termination;
    record.skipped_updates = run.skipped_updates;
    const ObjectiveEvaluation final_eval = evaluate_objective(problem, record.final_field, false);
    record.final_objective = final_eval.objective;
    record.final_error = final_eval.error;
    record.final_fidelity = final_eval.fidelity;
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    record.cpu_seconds = thread_cpu_seconds() - cpu_start;
  };

  try {
    finalize(bfgs_minimize_vector(objective, field0.flatten(), opts));
  } catch (const VectorNonFiniteError& e) {
    // Last finite iterate and history survive in the partial record. Should
    // even that evaluation fail, the error fields stay NaN so the run can
    // never masquerade as a success.
    RunRecord partial = record;
    partial.final_error = std::numeric_limits<double>::quiet_NaN();
    partial.final_fidelity = std::numeric_limits<double>::quiet_NaN();
    partial.final_objective = std::numeric_limits<double>::quiet_NaN();
    try {
      finalize(e.partial);
      partial = record;
    } catch (...) {
    }
    throw NonFiniteError(e.what(), partial);
  }
  return record;
}

}  // namespace qoct
