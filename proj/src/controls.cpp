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

#include "qoct/controls.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qoct {

Vector ControlField::flatten() const {
  const int m_count = n_controls(), k_count = n_slices();
  Vector v(size());
  for (int m = 0; m < m_count; ++m)
    for (int p = 0; p < k_count; ++p) v(m * k_count + p) = values(m, p);
  return v;
}

void ControlField::unflatten(const Vector& v) {
  const int m_count = n_controls(), k_count = n_slices();
  if (v.size() != size()) throw std::invalid_argument("ControlField::unflatten: size mismatch");
  for (int m = 0; m < m_count; ++m)
    for (int p = 0; p < k_count; ++p) values(m, p) = v(m * k_count + p);
}

void ControlField::validate() const {
  if (n_controls() < 1 || n_slices() < 1)
    throw std::invalid_argument("ControlField: need at least one control and one slice");
  if (!(dt > 0.0) || !(total_time > 0.0))
    throw std::invalid_argument("ControlField: dt and total time must be positive");
  if (std::abs(dt * n_slices() - total_time) > 1e-12 * std::max(1.0, total_time))
    throw std::invalid_argument("ControlField: dt * K must equal T");
  if (!values.allFinite()) throw std::invalid_argument("ControlField: non-finite amplitude");
}

ControlField make_control_field(int n_controls, int n_slices, double total_time) {
  if (n_controls < 1 || n_slices < 1 || !(total_time > 0.0))
    throw std::invalid_argument("make_control_field: invalid shape");
  ControlField f;
  f.values = Matrix::Zero(n_controls, n_slices);
  f.total_time = total_time;
  f.dt = total_time / n_slices;
  return f;
}

double GaussianSampler::operator()() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Map to (0, 1] so the log stays finite.
  const double scale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (double(engine_() >> 11) + 1.0) * scale;
  const double u2 = double(engine_() >> 11) * scale;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

ControlField sample_initial_field(int n_controls, int n_slices, double total_time, double delta,
                                  std::uint64_t seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("sample_initial_field: delta must be positive");
  ControlField f = make_control_field(n_controls, n_slices, total_time);
  GaussianSampler gauss(seed);
  for (int m = 0; m < n_controls; ++m)
    for (int p = 0; p < n_slices; ++p) f.values(m, p) = delta * gauss();
  return f;
}

double fluence(const ControlField& field, int m) {
  if (m < 0 || m >= field.n_controls()) throw std::out_of_range("fluence: control index out of range");
  return field.dt * field.values.row(m).squaredNorm();
}

double total_fluence(const ControlField& field) {
  return field.dt * field.values.squaredNorm();
}

double max_amplitude(const ControlField& field) {
  if (field.size() == 0) return 0.0;
  return field.values.cwiseAbs().maxCoeff();
}

}  // namespace qoct
