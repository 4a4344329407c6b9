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

#include <filesystem>
#include <span>
#include <string>

#include "qoct/controls.hpp"
#include "qoct/experiments.hpp"
#include "qoct/optimize.hpp"

namespace qoct {

/// Shortest round-trip decimal form of a double; locale-independent.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Whole-file write through a temporary + rename, so partially written files
/// never appear under the final name.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

/// Field table as CSV: header "M,K,T", one values row, then one row of K
/// amplitudes per control. Round-trips bit-exactly at double precision.
std::string field_to_csv(const ControlField& field);
ControlField field_from_csv(const std::string& text);
void write_field_csv(const std::filesystem::path& path, const ControlField& field);
ControlField read_field_csv(const std::filesystem::path& path);

/// Run records as JSON documents (one per run), embedding both fields and the
/// full option set.
std::string run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(const std::string& text);
void write_run_record(const std::filesystem::path& path, const RunRecord& record);
RunRecord read_run_record(const std::filesystem::path& path);

/// history CSV: "iteration,error".
void write_history_csv(const std::filesystem::path& path, const RunRecord& record);

/// grid CSV: "T,delta,rate,speed,runs,successes".
void write_success_grid_csv(const std::filesystem::path& path, const SuccessGrid& grid);

/// trajectories CSV: "time,qubit,bx,by,bz".
void write_trajectories_csv(const std::filesystem::path& path, const BlochTrajectories& traj);

/// statistics CSV: "seed,delta,T,init_fluence,final_fluence,max_amp,final_error".
void write_field_stats_csv(const std::filesystem::path& path, std::span<const FieldStats> stats);

/// comparison CSV: "seed,direct_error,refined_error" (skipped seeds omitted).
void write_warm_start_csv(const std::filesystem::path& path,
                          std::span<const WarmStartResult> results);

}  // namespace qoct
