// Copyright 2026 The Sculpt Authors
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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sculpt/dynamics.hpp"
#include "sculpt/experiments.hpp"

namespace sculpt::cli {

/// Raised for anything the user must fix before a run starts (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;      // ideal | gates | protocol | noisemap | entanglement
  std::string gate;         // rsb | bs | subtract (gates only)
  std::string profile = "paper-2022";
  std::string out = ".";

  // ideal
  int n_min = 1;
  int n_max = 4;

  // protocol / noisemap
  std::string scenario = "with-ia";
  std::string gates = "realistic";
  std::string sideband = "red";
  std::string coupling = "both";
  double xi_gamma = 0.0;
  double xi_kappa = 0.0;
  int grid = 3;
  std::optional<double> tau3;
  std::optional<double> tau4;

  // gates
  double theta_max = 3.14159265358979;
  int theta_points = 16;
  int mode = 2;
  int nmax = 4;
  std::vector<std::string> pairs{"24", "12", "34", "13"};
  std::vector<double> scaled_taus{2, 5, 10, 20, 40, 80, 160, 320};
  bool noise = true;  // reference reservoirs in gate sweeps

  // numerics
  int cutoff = 4;
  int total_cap = 6;
  int workers = 1;
  double rtol = 1e-8;
  double atol = 1e-10;
  double macro_step = 0.002;
  double g0 = kDefaultG0;
  double ramp_ratio = kDefaultRampRatio;
  bool light_shift_compensation = true;
  bool as_printed_dephasing = false;

  void validate() const;
  SimulationSettings simulation() const;
  NoiseSpec reference_noise() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Strict: unknown keys and wrong types raise UsageError.
void merge_json(RunConfig& c, const nlohmann::json& j);
/// Applies SCULPT_<KEY> variables (upper-case key names).
void merge_env(RunConfig& c);

inline constexpr const char* kEnvPrefix = "SCULPT_";

}  // namespace sculpt::cli
