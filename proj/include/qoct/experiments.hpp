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

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qoct/model.hpp"
#include "qoct/objectives.hpp"
#include "qoct/optimize.hpp"

namespace qoct {

/// Axes and replication of a multi-start study. Problems are rebuilt per
/// (T, K) cell through the factory; replicate r of every cell runs with seed
/// base_seed + r, so cells are independently reproducible.
struct BatchSpec {
  std::function<GateProblem(double total_time, int slices)> make_problem;
  std::vector<std::pair<double, int>> times;  // (T, K) pairs
  std::vector<double> deltas;
  int runs_per_cell = 1;
  std::uint64_t base_seed = 0;
  double threshold = 1e-4;
  OptimizerOptions options;
  int jobs = 1;

  /// Optional persistence hooks (used by the CLI for --resume).
  std::function<bool(double total_time, int slices, double delta, std::uint64_t seed)> skip;
  std::function<std::optional<RunRecord>(double total_time, int slices, double delta,
                                         std::uint64_t seed)>
      reload;
  std::function<void(double total_time, int slices, double delta, const RunRecord&)> persist;
};

struct BatchRun {
  double total_time = 0.0;
  int slices = 0;
  double delta = 0.0;
  RunRecord record;
};

/// Runs every (cell, replicate); individual run failures (numerical aborts)
/// are recorded as line-search-failure records and the batch continues.
std::vector<BatchRun> run_batch(const BatchSpec& spec);

/// Fraction of records whose final error is at or below the threshold.
double success_rate(std::span<const RunRecord> records, double threshold);

/// Inverse of the expected time to succeed:
///   mean failed time * (failed / successful) + mean successful time,
/// measured on per-run CPU seconds. Zero when nothing succeeded.
double success_speed(std::span<const RunRecord> records, double threshold);

struct SuccessCell {
  double total_time = 0.0;
  double delta = 0.0;
  int runs = 0;
  int successes = 0;
  double rate = 0.0;
  double speed = 0.0;
};

struct SuccessGrid {
  std::vector<double> times;
  std::vector<double> deltas;
  std::vector<SuccessCell> cells;  // time-major: cell(i_time * deltas.size() + i_delta)
};

SuccessGrid build_success_grid(std::span<const BatchRun> runs, double threshold);

struct WarmStartResult {
  std::uint64_t seed = 0;
  bool closed_converged = false;
  RunRecord closed_run;
  double direct_error = 0.0;   // pre-optimised field evaluated on the open problem
  RunRecord refined_run;       // refinement of the open problem from that field
};

/// Pre-optimise on the closed problem from a random field, evaluate the
/// optimal field directly on the open problem, then refine it there. Seeds
/// whose closed pre-optimisation misses closed_opts.error_threshold are
/// recorded and skipped.
std::vector<WarmStartResult> warm_start_compare(const GateProblem& open,
                                                const GateProblem& closed, int n_runs,
                                                double total_time, int slices, double delta,
                                                const OptimizerOptions& closed_opts,
                                                const OptimizerOptions& open_opts,
                                                std::uint64_t base_seed, int jobs = 1);

struct BlochTrajectories {
  Vector times;                // n_samples points spanning [0, T]
  std::vector<Matrix> bloch;   // one (n_samples x 3) table per qubit
};

/// State evolution from |0...0> (or psi0) under the piecewise-constant field,
/// reduced to per-qubit Bloch vectors at uniformly spaced times.
BlochTrajectories bloch_trajectories(const HamiltonianGenerator& gen, int n_qubits,
                                     const ControlField& field, int n_samples,
                                     const std::optional<ComplexVector>& psi0 = std::nullopt);

/// Same network with every actuator leaking onto the noise qubits and the
/// noise frequencies shifted by `detuning`.
QubitNetworkSpec leakage_scenario(const QubitNetworkSpec& spec, double detuning);

struct FieldStats {
  std::uint64_t seed = 0;
  double delta = 0.0;
  double total_time = 0.0;
  double init_fluence = 0.0;       // total over controls
  double final_fluence = 0.0;
  std::vector<double> init_fluence_per_control;
  std::vector<double> final_fluence_per_control;
  double max_amplitude = 0.0;      // of the final field
  double final_error = 0.0;
};

std::vector<FieldStats> field_statistics(std::span<const RunRecord> records);

}  // namespace qoct
