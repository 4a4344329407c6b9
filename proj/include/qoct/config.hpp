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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qoct/experiments.hpp"
#include "qoct/model.hpp"
#include "qoct/objectives.hpp"
#include "qoct/optimize.hpp"

namespace qoct {

/// Declarative description of an experiment. A run is reproducible from the
/// config plus a seed alone.
struct ProblemConfig {
  std::string name;                 // preset name or free-form label
  std::string task = "single";      // "single" | "warm-start"
  std::string model = "closed";     // "markovian" | "non-markovian" | "closed"
  int n1 = 1;
  int n2 = 0;
  std::vector<double> omega;        // resolved length n1 + n2
  double system_coupling = 1.0;     // Heisenberg strength between chained system qubits
  double system_noise_coupling = 0.0;
  /// Optional explicit coupling topology (pairs of qubit indices, 0-based).
  /// Empty means: system chain + round-robin noise attachment.
  std::vector<std::array<int, 2>> coupling_pairs;
  std::vector<LindbladChannel> channels;  // markovian only
  /// How a tabulated decoherence number r maps onto the Lindblad operator:
  /// "decay-rate" (default): V = sqrt(r) A, so r is the observable rate;
  /// "amplitude": V = r A, i.e. r is the operator prefactor and the
  /// effective rate is r^2.
  std::string rate_convention = "decay-rate";
  std::string gate = "Identity";
  double total_time = 5.0;
  int slices = 25;
  double delta = 0.1;
  bool leakage = false;
  double detuning = 0.0;
  OptimizerOptions optimizer;
  // Batch axes for scans; empty axes fall back to the single (T, K) / delta.
  std::vector<double> scan_times;
  std::vector<int> scan_slices;     // parallel to scan_times (same K for all when size 1)
  std::vector<double> scan_deltas;
  int runs = 1;
  std::uint64_t seed = 0;

  void normalise();                 // fill derived defaults; idempotent
  void validate() const;            // throws std::invalid_argument

  QubitNetworkSpec network() const;
  GateProblem problem() const { return problem_at(total_time, slices); }
  GateProblem problem_at(double total_time, int slices) const;
  /// Same network and control layout with channels/noise qubits removed.
  GateProblem closed_counterpart() const;
  TargetGate resolved_gate() const { return target_gate(gate, n1); }

  std::vector<std::pair<double, int>> scan_grid() const;

  std::string to_json_string() const;
  static ProblemConfig from_json_string(const std::string& text);
};

/// Noise-qubit frequency lists from which presets draw the first n2 entries.
std::vector<double> standard_noise_frequencies(int n1);

/// All bundled presets, one per studied system/gate/channel/time combination.
std::vector<std::string> preset_names();
bool has_preset(const std::string& name);
ProblemConfig preset(const std::string& name);

}  // namespace qoct
