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
#include <random>

#include "qoct/types.hpp"

namespace qoct {

/// Piecewise-constant control table. Row m holds the K amplitudes of control
/// m; slice p covers [p*dt, (p+1)*dt]. Flattened parameter vectors are
/// m-major: index(m, p) = m*K + p.
struct ControlField {
  Matrix values;         // M x K
  double dt = 0.0;       // slice duration, T/K
  double total_time = 0.0;

  int n_controls() const { return int(values.rows()); }
  int n_slices() const { return int(values.cols()); }
  int size() const { return int(values.size()); }

  Vector flatten() const;
  void unflatten(const Vector& v);

  void validate() const;
};

ControlField make_control_field(int n_controls, int n_slices, double total_time);

/// Identity of the RNG + transform used by sample_initial_field; recorded in
/// run records so results stay reproducible across platforms.
inline constexpr const char* kFieldSamplerId = "mt19937_64/box-muller";

/// Each entry i.i.d. Gaussian(0, delta^2), filled m-major, deterministic in
/// the seed on every platform.
ControlField sample_initial_field(int n_controls, int n_slices, double total_time, double delta,
                                  std::uint64_t seed);

/// Pulse fluence of control m: dt * sum_p f_mp^2 (squared L2 norm over [0,T]).
double fluence(const ControlField& field, int m);

/// Sum of the per-control fluences.
double total_fluence(const ControlField& field);

/// max_{m,p} |f_mp|.
double max_amplitude(const ControlField& field);

/// Portable Gaussian stream: Box-Muller over mt19937_64. The engine is
/// pinned by the standard; std::normal_distribution is not, so the
/// transform lives here.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}
  double operator()();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qoct
