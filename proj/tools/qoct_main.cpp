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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qoct/config.hpp"
#include "qoct/experiments.hpp"
#include "qoct/io.hpp"

namespace fs = std::filesystem;
using namespace qoct;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonArgs {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::string out_dir;
  int jobs = 1;
  bool dry_run = false;
  bool resume = false;
};

fs::path resolve_out_dir(const CommonArgs& args) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (const char* env = std::getenv("QOCT_OUT"); env && *env) return env;
  return "qoct-out";
}

ProblemConfig load_config(const CommonArgs& args) {
  ProblemConfig config;
  if (!args.config_path.empty() && !args.preset_name.empty())
    throw std::invalid_argument("pass either --config or --preset, not both");
  if (!args.config_path.empty()) {
    config = ProblemConfig::from_json_string(slurp(args.config_path));
  } else if (!args.preset_name.empty()) {
    config = preset(args.preset_name);
  } else {
    throw std::invalid_argument("one of --config or --preset is required");
  }
  if (args.seed) config.seed = *args.seed;
  if (args.threshold) config.optimizer.error_threshold = *args.threshold;
  config.normalise();
  config.validate();
  return config;
}

std::string run_tag(double total_time, double delta, std::uint64_t seed) {
  return "T" + format_double(total_time) + "_d" + format_double(delta) + "_s" +
         std::to_string(seed);
}

int cmd_optimize(const CommonArgs& args) {
  const ProblemConfig config = load_config(args);
  const fs::path out = resolve_out_dir(args);
  if (args.dry_run) {
    std::cout << config.to_json_string();
    return kExitOk;
  }
  fs::create_directories(out);
  atomic_write_file(out / "config.json", config.to_json_string());

  if (config.task == "warm-start") {
    const GateProblem open = config.problem();
    const GateProblem closed = config.closed_counterpart();
    OptimizerOptions closed_opts = config.optimizer;
    const auto results =
        warm_start_compare(open, closed, config.runs, config.total_time, config.slices,
                           config.delta, closed_opts, config.optimizer, config.seed, args.jobs);
    for (const auto& res : results) {
      const std::string tag = run_tag(config.total_time, config.delta, res.seed);
      write_run_record(out / ("closed_" + tag + ".json"), res.closed_run);
      if (res.closed_converged)
        write_run_record(out / ("refined_" + tag + ".json"), res.refined_run);
    }
    write_warm_start_csv(out / "warm_start.csv", results);
    std::cout << "warm-start comparison written to " << (out / "warm_start.csv").string() << "\n";
    return kExitOk;
  }

  const GateProblem problem = config.problem();
  const ControlField field0 = sample_initial_field(problem.n_controls(), config.slices,
                                                   config.total_time, config.delta, config.seed);
  const std::string tag = run_tag(config.total_time, config.delta, config.seed);
  try {
    const RunRecord record =
        bfgs_minimize(problem, field0, config.optimizer, config.seed, config.delta);
    write_run_record(out / ("run_" + tag + ".json"), record);
    write_field_csv(out / ("field_initial_" + tag + ".csv"), record.initial_field);
    write_field_csv(out / ("field_final_" + tag + ".csv"), record.final_field);
    write_history_csv(out / ("history_" + tag + ".csv"), record);
    std::cout << "final_error=" << format_double(record.final_error)
              << " fidelity=" << format_double(record.final_fidelity)
              << " iterations=" << record.iterations << " termination="
              << to_string(record.termination) << "\n";
  } catch (const NonFiniteError& e) {
    write_run_record(out / ("run_" + tag + ".partial.json"), e.partial);
    std::cerr << "numerical abort: " << e.what() << " (partial record preserved)\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_scan(const CommonArgs& args) {
  const ProblemConfig config = load_config(args);
  const fs::path out = resolve_out_dir(args);
  if (args.dry_run) {
    std::cout << config.to_json_string();
    return kExitOk;
  }
  fs::create_directories(out / "records");
  atomic_write_file(out / "config.json", config.to_json_string());

  BatchSpec spec;
  spec.make_problem = [&config](double t, int k) { return config.problem_at(t, k); };
  spec.times = config.scan_grid();
  spec.deltas = config.scan_deltas;
  spec.runs_per_cell = config.runs;
  spec.base_seed = config.seed;
  spec.threshold = config.optimizer.error_threshold;
  spec.options = config.optimizer;
  spec.jobs = args.jobs;
  auto record_path = [&out](double t, double delta, std::uint64_t seed) {
    return out / "records" / ("run_" + run_tag(t, delta, seed) + ".json");
  };
  if (args.resume)
    spec.skip = [&record_path](double t, int, double delta, std::uint64_t seed) {
      return fs::exists(record_path(t, delta, seed));
    };
  spec.reload = [&record_path](double t, int, double delta,
                               std::uint64_t seed) -> std::optional<RunRecord> {
    const fs::path p = record_path(t, delta, seed);
    if (!fs::exists(p)) return std::nullopt;
    return read_run_record(p);
  };
  spec.persist = [&record_path](double t, int, double delta, const RunRecord& record) {
    write_run_record(record_path(t, delta, record.seed), record);
  };

  const auto runs = run_batch(spec);
  const SuccessGrid grid = build_success_grid(runs, spec.threshold);
  write_success_grid_csv(out / "grid.csv", grid);

  std::vector<RunRecord> records;
  records.reserve(runs.size());
  for (const auto& r : runs) records.push_back(r.record);
  const auto stats = field_statistics(records);
  write_field_stats_csv(out / "stats.csv", stats);
  std::cout << "grid written to " << (out / "grid.csv").string() << " (" << runs.size()
            << " runs)\n";
  return kExitOk;
}

int cmd_analyze(const std::string& records_dir, const std::string& mode, const CommonArgs& args,
                int bloch_samples) {
  const fs::path dir = records_dir;
  if (!fs::is_directory(dir)) {
    std::cerr << "no records directory at " << dir.string() << "\n";
    return kExitRuntime;
  }
  const fs::path out = resolve_out_dir(args);
  fs::create_directories(out);

  if (mode == "stats") {
    std::vector<RunRecord> records;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() != ".json") continue;
      const std::string stem = entry.path().filename().string();
      if (stem.rfind("run_", 0) == 0 || stem.rfind("refined_", 0) == 0)
        records.push_back(read_run_record(entry.path()));
    }
    if (records.empty()) {
      std::cerr << "no run records in " << dir.string() << "\n";
      return kExitRuntime;
    }
    std::sort(records.begin(), records.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });
    write_field_stats_csv(out / "stats.csv", field_statistics(records));
    std::cout << "stats for " << records.size() << " records written to "
              << (out / "stats.csv").string() << "\n";
    return kExitOk;
  }

  if (mode == "bloch") {
    // The scan layout keeps config.json one level above records/.
    fs::path config_path = dir / "config.json";
    if (!fs::exists(config_path)) config_path = dir.parent_path() / "config.json";
    if (!fs::exists(config_path)) {
      std::cerr << "bloch analysis needs a config.json beside the records\n";
      return kExitRuntime;
    }
    const ProblemConfig config = ProblemConfig::from_json_string(slurp(config_path));
    if (config.model == "markovian") {
      std::cerr << "bloch trajectories need a Hamiltonian (closed/non-markovian) model\n";
      return kExitRuntime;
    }
    int count = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string stem = entry.path().filename().string();
      if (entry.path().extension() != ".json" || stem.rfind("run_", 0) != 0) continue;
      const RunRecord record = read_run_record(entry.path());
      const GateProblem problem = config.problem();
      const auto traj = bloch_trajectories(problem.ham_gen, config.n1 + config.n2,
                                           record.final_field, bloch_samples);
      fs::path target = out / ("bloch_" + entry.path().stem().string() + ".csv");
      write_trajectories_csv(target, traj);
      ++count;
    }
    if (count == 0) {
      std::cerr << "no run records in " << dir.string() << "\n";
      return kExitRuntime;
    }
    std::cout << count << " trajectory files written to " << out.string() << "\n";
    return kExitOk;
  }

  if (mode == "compare") {
    std::vector<WarmStartResult> results;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string stem = entry.path().filename().string();
      if (entry.path().extension() != ".json" || stem.rfind("closed_", 0) != 0) continue;
      const fs::path refined = dir / ("refined_" + stem.substr(7));
      if (!fs::exists(refined)) continue;
      WarmStartResult res;
      res.closed_run = read_run_record(entry.path());
      res.refined_run = read_run_record(refined);
      res.seed = res.closed_run.seed;
      res.closed_converged = true;
      // Blue stem: the refinement history starts at the directly-evaluated error.
      res.direct_error =
          res.refined_run.history.empty() ? res.refined_run.final_error : res.refined_run.history.front();
      results.push_back(std::move(res));
    }
    if (results.empty()) {
      std::cerr << "no paired closed/refined records in " << dir.string() << "\n";
      return kExitRuntime;
    }
    std::sort(results.begin(), results.end(),
              [](const WarmStartResult& a, const WarmStartResult& b) { return a.seed < b.seed; });
    write_warm_start_csv(out / "compare.csv", results);
    std::cout << results.size() << " comparisons written to " << (out / "compare.csv").string()
              << "\n";
    return kExitOk;
  }

  std::cerr << "unknown analyze mode '" << mode << "'\n";
  return kExitUsage;
}

int cmd_presets(const std::string& emit_dir) {
  if (emit_dir.empty()) {
    for (const auto& name : preset_names()) std::cout << name << "\n";
    return kExitOk;
  }
  fs::create_directories(emit_dir);
  for (const auto& name : preset_names())
    atomic_write_file(fs::path(emit_dir) / (name + ".json"), preset(name).to_json_string());
  std::cout << preset_names().size() << " presets written to " << emit_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum gate synthesis under Markovian and noise-qubit dynamics"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string records_dir;
  std::string analyze_mode = "stats";
  std::string emit_dir;
  int bloch_samples = 200;

  auto add_common = [&args](CLI::App* cmd, bool with_jobs) {
    cmd->add_option("--config", args.config_path, "experiment configuration (JSON)");
    cmd->add_option("--preset", args.preset_name, "bundled preset name (see `qoct presets`)");
    cmd->add_option("--seed", args.seed, "base seed override");
    cmd->add_option("--threshold", args.threshold, "error threshold override");
    cmd->add_option("--out", args.out_dir, "output directory (default $QOCT_OUT or ./qoct-out)");
    cmd->add_flag("--dry-run", args.dry_run, "validate and print the resolved problem");
    if (with_jobs) cmd->add_option("--jobs", args.jobs, "parallel runs")->check(CLI::PositiveNumber);
  };

  CLI::App* optimize = app.add_subcommand("optimize", "run one optimisation (or warm-start pair)");
  add_common(optimize, true);
  CLI::App* scan = app.add_subcommand("scan", "run a multi-start (T, delta) grid");
  add_common(scan, true);
  scan->add_flag("--resume", args.resume, "skip runs whose records already exist");
  CLI::App* analyze = app.add_subcommand("analyze", "post-process stored run records");
  analyze->add_option("records", records_dir, "directory of run records")->required();
  analyze->add_option("--mode", analyze_mode, "stats | bloch | compare");
  analyze->add_option("--samples", bloch_samples, "trajectory sample count")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--out", args.out_dir, "output directory");
  CLI::App* presets_cmd = app.add_subcommand("presets", "list or emit bundled presets");
  presets_cmd->add_option("--emit", emit_dir, "write every preset as a JSON document into DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(args);
    if (scan->parsed()) return cmd_scan(args);
    if (analyze->parsed()) return cmd_analyze(records_dir, analyze_mode, args, bloch_samples);
    if (presets_cmd->parsed()) return cmd_presets(emit_dir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
