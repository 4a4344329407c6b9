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

#include "qoct/config.hpp"

#include <stdexcept>

#include <json.hpp>

namespace qoct {

namespace {

using nlohmann::json;

const char* channel_kind_name(ChannelKind k) {
  switch (k) {
    case ChannelKind::SpontaneousEmission: return "spontaneous-emission";
    case ChannelKind::DephasingZ: return "dephasing-z";
    case ChannelKind::DephasingX: return "dephasing-x";
    case ChannelKind::CorrelatedDephasingZ: return "correlated-dephasing-z";
  }
  return "unknown";
}

ChannelKind channel_kind_from_name(const std::string& s) {
  if (s == "spontaneous-emission") return ChannelKind::SpontaneousEmission;
  if (s == "dephasing-z") return ChannelKind::DephasingZ;
  if (s == "dephasing-x") return ChannelKind::DephasingX;
  if (s == "correlated-dephasing-z") return ChannelKind::CorrelatedDephasingZ;
  throw std::invalid_argument("unknown decoherence channel '" + s + "'");
}

std::vector<double> default_system_frequencies(int n1) {
  switch (n1) {
    case 1: return {1.0};
    case 2: return {0.95, 1.05};
    case 3: return {0.95, 1.0, 1.05};
    default: {
      std::vector<double> w(size_t(n1), 1.0);
      return w;
    }
  }
}

}  // namespace

std::vector<double> standard_noise_frequencies(int n1) {
  const double pi = 3.14159265358979323846;
  std::vector<double> base = {1.0 / (pi - 2.14), pi - 2.14, 1.0 / (pi - 2.1),
                              pi - 2.1,          1.0 / (pi - 2.0), pi - 2.0};
  if (n1 >= 2) base.resize(4);
  if (n1 >= 3) base.resize(2);
  return base;
}

void ProblemConfig::normalise() {
  if (model == "closed") n2 = 0;
  if (omega.empty()) {
    omega = default_system_frequencies(n1);
    const auto noise = standard_noise_frequencies(n1);
    for (int j = 0; j < n2; ++j) omega.push_back(noise[size_t(j) % noise.size()]);
  }
  if (n2 > 0 && system_noise_coupling == 0.0) system_noise_coupling = n1 == 1 ? 0.02 : 0.01;
  if (scan_times.empty()) scan_times = {total_time};
  if (scan_slices.empty()) scan_slices = {slices};
  if (scan_slices.size() == 1 && scan_times.size() > 1)
    scan_slices.assign(scan_times.size(), scan_slices.front());
  if (scan_deltas.empty()) scan_deltas = {delta};
  if (detuning != 0.0 && n2 > 0) {
    // Detuning folds into the resolved noise frequencies once.
    for (int j = n1; j < n1 + n2; ++j) omega[size_t(j)] += detuning;
    detuning = 0.0;
  }
}

void ProblemConfig::validate() const {
  if (model != "markovian" && model != "non-markovian" && model != "closed")
    throw std::invalid_argument("config: model must be markovian, non-markovian, or closed");
  if (model == "markovian" && n2 != 0)
    throw std::invalid_argument("config: the Markovian model takes no noise qubits");
  if (!channels.empty() && model != "markovian")
    throw std::invalid_argument("config: decoherence channels require the Markovian model");
  if (rate_convention != "decay-rate" && rate_convention != "amplitude")
    throw std::invalid_argument("config: rate_convention must be decay-rate or amplitude");
  if (task != "single" && task != "warm-start")
    throw std::invalid_argument("config: task must be single or warm-start");
  if (task == "warm-start" && model == "closed")
    throw std::invalid_argument("config: warm-start needs an open (markovian/non-markovian) model");
  if (n1 < 1 || n1 > 3) throw std::invalid_argument("config: supported system sizes are 1..3 qubits");
  if (n2 < 0 || n1 + n2 > 7)
    throw std::invalid_argument("config: at most 7 qubits in total are supported");
  if (int(omega.size()) != n1 + n2)
    throw std::invalid_argument("config: omega must list n1+n2 frequencies");
  if (slices < 1 || !(total_time > 0.0))
    throw std::invalid_argument("config: need K >= 1 and T > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("config: delta must be positive");
  if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
  if (scan_times.size() != scan_slices.size())
    throw std::invalid_argument("config: scan_times and scan_slices must pair up");
  network().validate();
  optimizer.validate();
  target_gate(gate, n1);
}

QubitNetworkSpec ProblemConfig::network() const {
  QubitNetworkSpec spec;
  spec.n1 = n1;
  spec.n2 = n2;
  spec.omega = Eigen::Map<const Vector>(omega.data(), Eigen::Index(omega.size()));
  const int n = n1 + n2;
  spec.gamma = Matrix::Zero(n, n);
  if (coupling_pairs.empty()) {
    for (int q = 0; q + 1 < n1; ++q) {
      spec.gamma(q, q + 1) = system_coupling;
      spec.gamma(q + 1, q) = system_coupling;
    }
    for (int j = 0; j < n2; ++j) {
      const int sys = j % n1;
      const int noise = n1 + j;
      spec.gamma(sys, noise) = system_noise_coupling;
      spec.gamma(noise, sys) = system_noise_coupling;
    }
  } else {
    for (const auto& [a, b] : coupling_pairs) {
      if (a < 0 || b < 0 || a >= n || b >= n || a == b)
        throw std::invalid_argument("config: bad coupling pair");
      const bool a_noise = a >= n1, b_noise = b >= n1;
      const double g = (a_noise || b_noise) ? system_noise_coupling : system_coupling;
      spec.gamma(a, b) = g;
      spec.gamma(b, a) = g;
    }
  }
  spec.actuators = QubitNetworkSpec::default_actuators(n1);
  if (leakage)
    for (auto& act : spec.actuators) act.leakage = true;
  return spec;
}

GateProblem ProblemConfig::problem_at(double t, int k) const {
  (void)t;
  (void)k;
  const QubitNetworkSpec spec = network();
  const TargetGate w = resolved_gate();
  if (model == "markovian") {
    LindbladSpec effective = channels;
    if (rate_convention == "amplitude")
      for (auto& ch : effective) ch.rate = ch.rate * ch.rate;
    return make_markovian_problem(spec, effective, w);
  }
  return make_hamiltonian_problem(spec, w);
}

GateProblem ProblemConfig::closed_counterpart() const {
  ProblemConfig closed = *this;
  closed.channels.clear();
  if (closed.model == "non-markovian") {
    closed.omega.resize(size_t(closed.n1));
    closed.n2 = 0;
    closed.coupling_pairs.clear();
    closed.leakage = false;
  }
  closed.model = "closed";
  return make_hamiltonian_problem(closed.network(), closed.resolved_gate());
}

std::vector<std::pair<double, int>> ProblemConfig::scan_grid() const {
  std::vector<std::pair<double, int>> grid;
  for (size_t i = 0; i < scan_times.size(); ++i)
    grid.emplace_back(scan_times[i], scan_slices[i]);
  return grid;
}

std::string ProblemConfig::to_json_string() const {
  json j;
  j["name"] = name;
  j["task"] = task;
  j["model"] = model;
  j["n1"] = n1;
  j["n2"] = n2;
  j["omega"] = omega;
  j["system_coupling"] = system_coupling;
  j["system_noise_coupling"] = system_noise_coupling;
  json pairs = json::array();
  for (const auto& [a, b] : coupling_pairs) pairs.push_back(json::array({a, b}));
  j["coupling_pairs"] = std::move(pairs);
  json chans = json::array();
  for (const auto& ch : channels) {
    json c;
    c["kind"] = channel_kind_name(ch.kind);
    c["rate"] = ch.rate;
    if (!ch.qubits.empty()) c["qubits"] = ch.qubits;
    chans.push_back(std::move(c));
  }
  j["channels"] = std::move(chans);
  j["rate_convention"] = rate_convention;
  j["gate"] = gate;
  j["T"] = total_time;
  j["K"] = slices;
  j["delta"] = delta;
  j["leakage"] = leakage;
  j["detuning"] = detuning;
  json opt;
  opt["error_threshold"] = optimizer.error_threshold;
  opt["max_iterations"] = optimizer.max_iterations;
  opt["stall_window"] = optimizer.stall_window;
  opt["stall_ratio"] = optimizer.stall_ratio;
  opt["ls_sufficient_decrease"] = optimizer.ls_sufficient_decrease;
  opt["ls_contraction"] = optimizer.ls_contraction;
  opt["ls_max_backtracks"] = optimizer.ls_max_backtracks;
  opt["gradient_mode"] =
      optimizer.gradient_mode == GradientMode::Analytic ? "analytic" : "finite-difference";
  opt["fd_step"] = optimizer.fd_step;
  j["optimizer"] = std::move(opt);
  j["scan_times"] = scan_times;
  j["scan_slices"] = scan_slices;
  j["scan_deltas"] = scan_deltas;
  j["runs"] = runs;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

ProblemConfig ProblemConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  ProblemConfig c;
  c.name = j.value("name", "");
  c.task = j.value("task", c.task);
  if (!j.contains("model")) throw std::invalid_argument("config: missing required field 'model'");
  c.model = j.at("model").get<std::string>();
  if (!j.contains("n1")) throw std::invalid_argument("config: missing required field 'n1'");
  c.n1 = j.at("n1").get<int>();
  c.n2 = j.value("n2", 0);
  c.omega = j.value("omega", std::vector<double>{});
  c.system_coupling = j.value("system_coupling", c.model == "markovian" ? 1.0 : 0.1);
  c.system_noise_coupling = j.value("system_noise_coupling", 0.0);
  if (j.contains("coupling_pairs"))
    for (const auto& p : j.at("coupling_pairs"))
      c.coupling_pairs.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
  if (j.contains("channels")) {
    for (const auto& ch : j.at("channels")) {
      LindbladChannel channel;
      channel.kind = channel_kind_from_name(ch.at("kind").get<std::string>());
      channel.rate = ch.at("rate").get<double>();
      if (ch.contains("qubits")) channel.qubits = ch.at("qubits").get<std::vector<int>>();
      c.channels.push_back(std::move(channel));
    }
  }
  c.rate_convention = j.value("rate_convention", c.rate_convention);
  if (!j.contains("gate")) throw std::invalid_argument("config: missing required field 'gate'");
  c.gate = j.at("gate").get<std::string>();
  if (!j.contains("T")) throw std::invalid_argument("config: missing required field 'T'");
  c.total_time = j.at("T").get<double>();
  if (!j.contains("K")) throw std::invalid_argument("config: missing required field 'K'");
  c.slices = j.at("K").get<int>();
  c.delta = j.value("delta", c.delta);
  c.leakage = j.value("leakage", false);
  c.detuning = j.value("detuning", 0.0);
  if (j.contains("optimizer")) {
    const json& opt = j.at("optimizer");
    c.optimizer.error_threshold = opt.value("error_threshold", c.optimizer.error_threshold);
    c.optimizer.max_iterations = opt.value("max_iterations", c.optimizer.max_iterations);
    c.optimizer.stall_window = opt.value("stall_window", c.optimizer.stall_window);
    c.optimizer.stall_ratio = opt.value("stall_ratio", c.optimizer.stall_ratio);
    c.optimizer.ls_sufficient_decrease =
        opt.value("ls_sufficient_decrease", c.optimizer.ls_sufficient_decrease);
    c.optimizer.ls_contraction = opt.value("ls_contraction", c.optimizer.ls_contraction);
    c.optimizer.ls_max_backtracks = opt.value("ls_max_backtracks", c.optimizer.ls_max_backtracks);
    const std::string mode = opt.value("gradient_mode", "analytic");
    c.optimizer.gradient_mode =
        mode == "analytic" ? GradientMode::Analytic : GradientMode::FiniteDifference;
    c.optimizer.fd_step = opt.value("fd_step", c.optimizer.fd_step);
  }
  c.scan_times = j.value("scan_times", std::vector<double>{});
  c.scan_slices = j.value("scan_slices", std::vector<int>{});
  c.scan_deltas = j.value("scan_deltas", std::vector<double>{});
  c.runs = j.value("runs", 1);
  c.seed = j.value("seed", std::uint64_t(0));
  c.normalise();
  return c;
}

}  // namespace qoct
