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

#include "qoct/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace qoct {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string read_whole_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json field_to_json(const ControlField& f) {
  json j;
  j["M"] = f.n_controls();
  j["K"] = f.n_slices();
  j["T"] = f.total_time;
  json rows = json::array();
  for (int m = 0; m < f.n_controls(); ++m) {
    json row = json::array();
    for (int p = 0; p < f.n_slices(); ++p) row.push_back(f.values(m, p));
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  return j;
}

ControlField field_from_json(const json& j) {
  ControlField f = make_control_field(j.at("M").get<int>(), j.at("K").get<int>(),
                                      j.at("T").get<double>());
  const json& rows = j.at("values");
  for (int m = 0; m < f.n_controls(); ++m)
    for (int p = 0; p < f.n_slices(); ++p) f.values(m, p) = rows.at(size_t(m)).at(size_t(p)).get<double>();
  return f;
}

json options_to_json(const OptimizerOptions& o) {
  json j;
  j["error_threshold"] = o.error_threshold;
  j["max_iterations"] = o.max_iterations;
  j["stall_window"] = o.stall_window;
  j["stall_ratio"] = o.stall_ratio;
  j["ls_sufficient_decrease"] = o.ls_sufficient_decrease;
  j["ls_contraction"] = o.ls_contraction;
  j["ls_max_backtracks"] = o.ls_max_backtracks;
  j["gradient_mode"] = o.gradient_mode == GradientMode::Analytic ? "analytic" : "finite-difference";
  j["fd_step"] = o.fd_step;
  return j;
}

OptimizerOptions options_from_json(const json& j) {
  OptimizerOptions o;
  o.error_threshold = j.value("error_threshold", o.error_threshold);
  o.max_iterations = j.value("max_iterations", o.max_iterations);
  o.stall_window = j.value("stall_window", o.stall_window);
  o.stall_ratio = j.value("stall_ratio", o.stall_ratio);
  o.ls_sufficient_decrease = j.value("ls_sufficient_decrease", o.ls_sufficient_decrease);
  o.ls_contraction = j.value("ls_contraction", o.ls_contraction);
  o.ls_max_backtracks = j.value("ls_max_backtracks", o.ls_max_backtracks);
  const std::string mode = j.value("gradient_mode", "analytic");
  o.gradient_mode = mode == "analytic" ? GradientMode::Analytic : GradientMode::FiniteDifference;
  o.fd_step = j.value("fd_step", o.fd_step);
  return o;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw std::runtime_error("parse_double: bad number '" + s + "'");
  return v;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.good()) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string field_to_csv(const ControlField& field) {
  std::string out = "M,K,T\n";
  out += std::to_string(field.n_controls()) + "," + std::to_string(field.n_slices()) + "," +
         format_double(field.total_time) + "\n";
  for (int m = 0; m < field.n_controls(); ++m) {
    for (int p = 0; p < field.n_slices(); ++p) {
      if (p) out += ",";
      out += format_double(field.values(m, p));
    }
    out += "\n";
  }
  return out;
}

ControlField field_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"M", "K", "T"})
    throw std::runtime_error("field_from_csv: missing M,K,T header");
  if (!std::getline(in, line)) throw std::runtime_error("field_from_csv: missing shape row");
  const auto shape = split_csv_line(line);
  if (shape.size() != 3) throw std::runtime_error("field_from_csv: bad shape row");
  const int m_count = std::stoi(shape[0]);
  const int k_count = std::stoi(shape[1]);
  ControlField f = make_control_field(m_count, k_count, parse_double(shape[2]));
  for (int m = 0; m < m_count; ++m) {
    if (!std::getline(in, line)) throw std::runtime_error("field_from_csv: missing value row");
    const auto cells = split_csv_line(line);
    if (int(cells.size()) != k_count) throw std::runtime_error("field_from_csv: bad value row");
    for (int p = 0; p < k_count; ++p) f.values(m, p) = parse_double(cells[size_t(p)]);
  }
  return f;
}

void write_field_csv(const std::filesystem::path& path, const ControlField& field) {
  atomic_write_file(path, field_to_csv(field));
}

ControlField read_field_csv(const std::filesystem::path& path) {
  return field_from_csv(read_whole_file(path));
}

std::string run_record_to_json(const RunRecord& record) {
  json j;
  j["seed"] = record.seed;
  j["rng_id"] = record.rng_id;
  j["init_delta"] = record.init_delta;
  j["options"] = options_to_json(record.options);
  j["initial_field"] = field_to_json(record.initial_field);
  j["final_field"] = field_to_json(record.final_field);
  j["history"] = record.history;
  j["iterations"] = record.iterations;
  j["final_objective"] = record.final_objective;
  j["final_error"] = record.final_error;
  j["final_fidelity"] = record.final_fidelity;
  j["wall_seconds"] = record.wall_seconds;
  j["cpu_seconds"] = record.cpu_seconds;
  j["termination"] = to_string(record.termination);
  j["skipped_updates"] = record.skipped_updates;
  return j.dump(2) + "\n";
}

RunRecord run_record_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunRecord r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.rng_id = j.value("rng_id", "");
  r.init_delta = j.value("init_delta", 0.0);
  r.options = options_from_json(j.at("options"));
  r.initial_field = field_from_json(j.at("initial_field"));
  r.final_field = field_from_json(j.at("final_field"));
  r.history = j.at("history").get<std::vector<double>>();
  r.iterations = j.at("iterations").get<int>();
  r.final_objective = j.at("final_objective").get<double>();
  r.final_error = j.at("final_error").get<double>();
  r.final_fidelity = j.at("final_fidelity").get<double>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.cpu_seconds = j.at("cpu_seconds").get<double>();
  r.termination = termination_from_string(j.at("termination").get<std::string>());
  r.skipped_updates = j.value("skipped_updates", 0);
  return r;
}

void write_run_record(const std::filesystem::path& path, const RunRecord& record) {
  atomic_write_file(path, run_record_to_json(record));
}

RunRecord read_run_record(const std::filesystem::path& path) {
  return run_record_from_json(read_whole_file(path));
}

void write_history_csv(const std::filesystem::path& path, const RunRecord& record) {
  std::string out = "iteration,error\n";
  for (size_t i = 0; i < record.history.size(); ++i)
    out += std::to_string(i) + "," + format_double(record.history[i]) + "\n";
  atomic_write_file(path, out);
}

void write_success_grid_csv(const std::filesystem::path& path, const SuccessGrid& grid) {
  std::string out = "T,delta,rate,speed,runs,successes\n";
  for (const auto& cell : grid.cells) {
    out += format_double(cell.total_time) + "," + format_double(cell.delta) + "," +
           format_double(cell.rate) + "," + format_double(cell.speed) + "," +
           std::to_string(cell.runs) + "," + std::to_string(cell.successes) + "\n";
  }
  atomic_write_file(path, out);
}

void write_trajectories_csv(const std::filesystem::path& path, const BlochTrajectories& traj) {
  std::string out = "time,qubit,bx,by,bz\n";
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    for (size_t q = 0; q < traj.bloch.size(); ++q) {
      out += format_double(traj.times(i)) + "," + std::to_string(q) + "," +
             format_double(traj.bloch[q](i, 0)) + "," + format_double(traj.bloch[q](i, 1)) + "," +
             format_double(traj.bloch[q](i, 2)) + "\n";
    }
  }
  atomic_write_file(path, out);
}

void write_field_stats_csv(const std::filesystem::path& path, std::span<const FieldStats> stats) {
  std::string out = "seed,delta,T,init_fluence,final_fluence,max_amp,final_error\n";
  for (const auto& s : stats) {
    out += std::to_string(s.seed) + "," + format_double(s.delta) + "," +
           format_double(s.total_time) + "," + format_double(s.init_fluence) + "," +
           format_double(s.final_fluence) + "," + format_double(s.max_amplitude) + "," +
           format_double(s.final_error) + "\n";
  }
  atomic_write_file(path, out);
}

void write_warm_start_csv(const std::filesystem::path& path,
                          std::span<const WarmStartResult> results) {
  std::string out = "seed,direct_error,refined_error\n";
  for (const auto& r : results) {
    if (!r.closed_converged) continue;
    out += std::to_string(r.seed) + "," + format_double(r.direct_error) + "," +
           format_double(r.refined_run.final_error) + "\n";
  }
  atomic_write_file(path, out);
}

}  // namespace qoct
