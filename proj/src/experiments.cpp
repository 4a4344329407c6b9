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

#include "qoct/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qoct {

namespace {

struct BatchTask {
  double total_time;
  int slices;
  double delta;
  std::uint64_t seed;
  size_t index;
};

}  // namespace

std::vector<BatchRun> run_batch(const BatchSpec& spec) {
  if (!spec.make_problem) throw std::invalid_argument("run_batch: missing problem factory");
  if (spec.runs_per_cell < 1) throw std::invalid_argument("run_batch: runs_per_cell must be >= 1");
  if (spec.times.empty() || spec.deltas.empty())
    throw std::invalid_argument("run_batch: empty time or delta axis");

  std::vector<BatchTask> tasks;
  size_t index = 0;
  for (const auto& [t, k] : spec.times)
    for (double delta : spec.deltas)
      for (int r = 0; r < spec.runs_per_cell; ++r)
        tasks.push_back({t, k, delta, spec.base_seed + std::uint64_t(r), index++});

  std::vector<BatchRun> runs(tasks.size());
  std::mutex sink_mutex;
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const BatchTask& task = tasks[i];
      BatchRun out;
      out.total_time = task.total_time;
      out.slices = task.slices;
      out.delta = task.delta;
      bool have_record = false;
      if (spec.skip && spec.skip(task.total_time, task.slices, task.delta, task.seed) &&
          spec.reload) {
        try {
          auto reloaded = spec.reload(task.total_time, task.slices, task.delta, task.seed);
          if (reloaded) {
            out.record = std::move(*reloaded);
            have_record = true;
          }
        } catch (...) {
          // Unreadable stored record: recompute below.
        }
      }
      if (!have_record) {
        try {
          const GateProblem problem = spec.make_problem(task.total_time, task.slices);
          const ControlField field0 = sample_initial_field(problem.n_controls(), task.slices,
                                                           task.total_time, task.delta, task.seed);
          OptimizerOptions opts = spec.options;
          opts.error_threshold = spec.threshold;
          out.record = bfgs_minimize(problem, field0, opts, task.seed, task.delta);
        } catch (const NonFiniteError& e) {
          out.record = e.partial;  // recorded failure; the batch continues
        } catch (const std::exception&) {
          out.record.seed = task.seed;
          out.record.final_error = std::numeric_limits<double>::infinity();
          out.record.termination = Termination::LineSearchFailure;
        }
        if (spec.persist) {
          std::lock_guard<std::mutex> lock(sink_mutex);
          spec.persist(task.total_time, task.slices, task.delta, out.record);
        }
      }
      runs[task.index] = std::move(out);
    }
  };

  const int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(size_t(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return runs;
}

double success_rate(std::span<const RunRecord> records, double threshold) {
  if (records.empty()) throw std::invalid_argument("success_rate: no records");
  int successes = 0;
  for (const auto& r : records)
    if (r.final_error <= threshold) ++successes;
  return double(successes) / double(records.size());
}

double success_speed(std::span<const RunRecord> records, double threshold) {
  if (records.empty()) throw std::invalid_argument("success_speed: no records");
  int n_success = 0, n_failed = 0;
  double success_time = 0.0, failed_time = 0.0;
  for (const auto& r : records) {
    if (r.final_error <= threshold) {
      ++n_success;
      success_time += r.cpu_seconds;
    } else {
      ++n_failed;
      failed_time += r.cpu_seconds;
    }
  }
  if (n_success == 0) return 0.0;
  double expected = success_time / n_success;
  if (n_failed > 0)
    expected += (failed_time / n_failed) * (double(n_failed) / double(n_success));
  return 1.0 / expected;
}

SuccessGrid build_success_grid(std::span<const BatchRun> runs, double threshold) {
  SuccessGrid grid;
  for (const auto& run : runs) {
    if (std::find(grid.times.begin(), grid.times.end(), run.total_time) == grid.times.end())
      grid.times.push_back(run.total_time);
    if (std::find(grid.deltas.begin(), grid.deltas.end(), run.delta) == grid.deltas.end())
      grid.deltas.push_back(run.delta);
  }
  std::sort(grid.times.begin(), grid.times.end());
  std::sort(grid.deltas.begin(), grid.deltas.end());
  grid.cells.resize(grid.times.size() * grid.deltas.size());
  for (size_t it = 0; it < grid.times.size(); ++it) {
    for (size_t id = 0; id < grid.deltas.size(); ++id) {
      std::vector<RunRecord> cell_records;
      for (const auto& run : runs)
        if (run.total_time == grid.times[it] && run.delta == grid.deltas[id])
          cell_records.push_back(run.record);
      SuccessCell& cell = grid.cells[it * grid.deltas.size() + id];
      cell.total_time = grid.times[it];
      cell.delta = grid.deltas[id];
      cell.runs = int(cell_records.size());
      if (!cell_records.empty()) {
        for (const auto& rec : cell_records)
          if (rec.final_error <= threshold) ++cell.successes;
        cell.rate = double(cell.successes) / double(cell.runs);
        cell.speed = success_speed(cell_records, threshold);
      }
    }
  }
  return grid;
}

std::vector<WarmStartResult> warm_start_compare(const GateProblem& open, const GateProblem& closed,
                                                int n_runs, double total_time, int slices,
                                                double delta, const OptimizerOptions& closed_opts,
                                                const OptimizerOptions& open_opts,
                                                std::uint64_t base_seed, int jobs) {
  if (open.n_controls() != closed.n_controls())
    throw std::invalid_argument("warm_start_compare: problems must share one control layout");
  if (n_runs < 1) throw std::invalid_argument("warm_start_compare: need at least one run");

  std::vector<WarmStartResult> results(static_cast<size_t>(n_runs));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_runs) return;
      WarmStartResult& res = results[size_t(i)];
      res.seed = base_seed + std::uint64_t(i);
      const ControlField field0 = sample_initial_field(closed.n_controls(), slices, total_time,
                                                       delta, res.seed);
      try {
        res.closed_run = bfgs_minimize(closed, field0, closed_opts, res.seed, delta);
      } catch (const NonFiniteError& e) {
        res.closed_run = e.partial;
        res.closed_converged = false;
        continue;
      }
      res.closed_converged = res.closed_run.final_error <= closed_opts.error_threshold;
      if (!res.closed_converged) continue;
      res.direct_error = evaluate_objective(open, res.closed_run.final_field, false).error;
      try {
        res.refined_run =
            bfgs_minimize(open, res.closed_run.final_field, open_opts, res.seed, delta);
      } catch (const NonFiniteError& e) {
        res.refined_run = e.partial;
      }
    }
  };

  const int pool_size = std::max(1, jobs);
  if (pool_size == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < pool_size; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

BlochTrajectories bloch_trajectories(const HamiltonianGenerator& gen, int n_qubits,
                                     const ControlField& field, int n_samples,
                                     const std::optional<ComplexVector>& psi0) {
  field.validate();
  if (n_samples < 2) throw std::invalid_argument("bloch_trajectories: need at least two samples");
  const Eigen::Index dim = gen.dim();
  if (dim != Eigen::Index(1) << n_qubits)
    throw std::invalid_argument("bloch_trajectories: generator dimension is not 2^n_qubits");
  ComplexVector psi = psi0.value_or(ComplexVector::Unit(dim, 0));
  if (psi.size() != dim) throw std::invalid_argument("bloch_trajectories: bad initial state");

  BlochTrajectories out;
  out.times = Vector::LinSpaced(n_samples, 0.0, field.total_time);
  out.bloch.assign(size_t(n_qubits), Matrix(n_samples, 3));

  // Eigensystems per slice let us evaluate the state at arbitrary times
  // inside a slice without extra exponentials.
  const int k_count = field.n_slices();
  std::vector<ComplexVector> at_slice_start(static_cast<size_t>(k_count) + 1);
  std::vector<SpectralSlice> eigs(static_cast<size_t>(k_count));
  at_slice_start[0] = psi;
  ComplexMatrix h(dim, dim);
  for (int p = 0; p < k_count; ++p) {
    h = gen.h0;
    for (int m = 0; m < gen.n_controls(); ++m) h += field.values(m, p) * gen.controls[size_t(m)];
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    SpectralSlice& s = eigs[size_t(p)];
    s.vectors = solver.eigenvectors();
    s.values = (-kImag) * solver.eigenvalues().cast<Complex>();
    ComplexVector phase(dim);
    for (Eigen::Index j = 0; j < dim; ++j) phase(j) = std::exp(s.values(j) * field.dt);
    at_slice_start[size_t(p) + 1] =
        s.vectors * phase.asDiagonal() * (s.vectors.adjoint() * at_slice_start[size_t(p)]);
  }

  for (int i = 0; i < n_samples; ++i) {
    const double t = out.times(i);
    if (t < -1e-12 || t > field.total_time * (1.0 + 1e-12))
      throw std::out_of_range("bloch_trajectories: sample time outside [0, T]");
    int p = std::min(int(t / field.dt), k_count - 1);
    const double tau = t - p * field.dt;
    const SpectralSlice& s = eigs[size_t(p)];
    ComplexVector phase(dim);
    for (Eigen::Index j = 0; j < dim; ++j) phase(j) = std::exp(s.values(j) * tau);
    const ComplexVector psi_t =
        s.vectors * phase.asDiagonal() * (s.vectors.adjoint() * at_slice_start[size_t(p)]);
    for (int q = 0; q < n_qubits; ++q) {
      const Eigen::Vector3d b = bloch_vector(reduced_qubit_state(psi_t, q, n_qubits));
      out.bloch[size_t(q)].row(i) = b.transpose();
    }
  }
  return out;
}

QubitNetworkSpec leakage_scenario(const QubitNetworkSpec& spec, double detuning) {
  if (spec.n2 == 0) throw std::invalid_argument("leakage_scenario: no noise qubits to leak onto");
  QubitNetworkSpec out = spec;
  for (auto& act : out.actuators) act.leakage = true;
  for (int q = spec.n1; q < spec.total_qubits(); ++q) out.omega(q) += detuning;
  return out;
}

std::vector<FieldStats> field_statistics(std::span<const RunRecord> records) {
  std::vector<FieldStats> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    FieldStats s;
    s.seed = r.seed;
    s.delta = r.init_delta;
    s.total_time = r.final_field.total_time;
    s.init_fluence = total_fluence(r.initial_field);
    s.final_fluence = total_fluence(r.final_field);
    for (int m = 0; m < r.initial_field.n_controls(); ++m)
      s.init_fluence_per_control.push_back(fluence(r.initial_field, m));
    for (int m = 0; m < r.final_field.n_controls(); ++m)
      s.final_fluence_per_control.push_back(fluence(r.final_field, m));
    s.max_amplitude = max_amplitude(r.final_field);
    s.final_error = r.final_error;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace qoct
