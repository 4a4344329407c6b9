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

#include <map>
#include <stdexcept>

#include "qoct/config.hpp"

namespace qoct {

namespace {

struct ChannelPreset {
  const char* token;
  std::vector<LindbladChannel> channels;
};

std::string time_token(double t) {
  const long long rounded = (long long)(t + 0.5);
  return "T" + std::to_string(rounded);
}

std::map<std::string, ProblemConfig> build_registry() {
  std::map<std::string, ProblemConfig> reg;

  auto add = [&reg](ProblemConfig c) {
    c.normalise();
    reg.emplace(c.name, std::move(c));
  };

  const std::vector<ChannelPreset> q1q2_channels = {
      {"none", {}},
      {"se02", {{ChannelKind::SpontaneousEmission, 0.02, {}}}},
      {"dz02", {{ChannelKind::DephasingZ, 0.02, {}}}},
      {"dx02", {{ChannelKind::DephasingX, 0.02, {}}}},
  };
  const std::vector<ChannelPreset> q3_channels = {
      {"none", {}},
      {"se02", {{ChannelKind::SpontaneousEmission, 0.02, {}}}},
      {"dz02", {{ChannelKind::DephasingZ, 0.02, {}}}},
      {"dx02", {{ChannelKind::DephasingX, 0.02, {}}}},
      {"czz02", {{ChannelKind::CorrelatedDephasingZ, 0.02, {}}}},
  };

  struct MarkovRow {
    int n1;
    std::vector<const char*> gates;
    const std::vector<ChannelPreset>* channels;
    std::vector<double> times;
    int slices;
    std::vector<double> deltas;
    double default_delta;
  };
  const std::vector<MarkovRow> markov_rows = {
      {1, {"hadamard", "identity", "t"}, &q1q2_channels, {5, 25}, 25, {0.1, 1, 10}, 0.1},
      {2, {"identity", "cnot"}, &q1q2_channels, {25, 50, 75, 100}, 150, {0.01, 0.1, 1, 10}, 0.1},
      {3, {"qft", "identity"}, &q3_channels, {150}, 300, {1}, 1.0},
  };
  for (const auto& row : markov_rows) {
    for (const char* gate : row.gates) {
      for (const auto& chan : *row.channels) {
        for (double t : row.times) {
          ProblemConfig c;
          c.model = chan.channels.empty() ? "closed" : "markovian";
          c.n1 = row.n1;
          c.n2 = 0;
          c.system_coupling = 1.0;
          c.channels = chan.channels;
          c.gate = gate;
          c.total_time = t;
          c.slices = row.slices;
          c.delta = row.default_delta;
          c.scan_times.assign(row.times.begin(), row.times.end());
          c.scan_slices.assign(row.times.size(), row.slices);
          c.scan_deltas = row.deltas;
          c.runs = 20;
          c.name = "markov-q" + std::to_string(row.n1) + "-" + gate + "-" + chan.token + "-" +
                   time_token(t);
          add(std::move(c));
        }
      }
    }
  }

  struct NoiseRow {
    int n1;
    std::vector<int> noise_counts;
    std::vector<const char*> gates;
    std::vector<double> times;
    int slices;
    double system_coupling;
    double system_noise_coupling;
    std::vector<double> deltas;
    double default_delta;
  };
  const std::vector<NoiseRow> noise_rows = {
      {1, {0, 1, 2, 4, 6}, {"hadamard", "identity", "t"}, {2, 3, 4, 25}, 25, 0.0, 0.02,
       {0.1, 1, 10}, 0.1},
      {2,
       {0, 1, 2, 4},
       {"identity", "cnot"},
       {25, 30, 35, 40, 45, 50, 55, 60, 65, 70, 75, 80, 85, 90, 95, 100, 125},
       150,
       0.1,
       0.01,
       {0.01, 0.05, 0.1, 0.5, 1, 5, 10},
       0.1},
      {3, {0, 2}, {"qft", "identity"}, {150, 300}, 300, 0.1, 0.01, {1}, 1.0},
  };
  for (const auto& row : noise_rows) {
    for (int n2 : row.noise_counts) {
      for (const char* gate : row.gates) {
        for (double t : row.times) {
          ProblemConfig c;
          c.model = n2 == 0 ? "closed" : "non-markovian";
          c.n1 = row.n1;
          c.n2 = n2;
          c.system_coupling = row.system_coupling;
          c.system_noise_coupling = row.system_noise_coupling;
          c.gate = gate;
          c.total_time = t;
          c.slices = row.slices;
          c.delta = row.default_delta;
          c.scan_times.assign(row.times.begin(), row.times.end());
          c.scan_slices.assign(row.times.size(), row.slices);
          c.scan_deltas = row.deltas;
          c.runs = 20;
          c.name = "nm-q" + std::to_string(row.n1) + "n" + std::to_string(n2) + "-" + gate + "-" +
                   time_token(t);
          add(std::move(c));
        }
      }
    }
  }

  return reg;
}

const std::map<std::string, ProblemConfig>& registry() {
  static const std::map<std::string, ProblemConfig> reg = build_registry();
  return reg;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  names.reserve(registry().size());
  for (const auto& [name, unused] : registry()) names.push_back(name);
  return names;
}

bool has_preset(const std::string& name) { return registry().count(name) != 0; }

ProblemConfig preset(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown preset '" + name + "'");
  return it->second;
}

}  // namespace qoct
