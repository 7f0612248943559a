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

#include "sculpt/dynamics.hpp"
#include "sculpt/fock.hpp"
#include "sculpt/laser_hamiltonian.hpp"

namespace sculpt {

enum class Scenario { with_ia, without_ia };
enum class GateModel { ideal, realistic };
enum class Coupling { both, gamma_only, kappa_only };

const char* to_string(Scenario s);
const char* to_string(GateModel m);
const char* to_string(Sideband s);
const char* to_string(Coupling c);

struct TauScan {
  double lo = 0.15;      // ms
  double hi = 1.0;       // ms
  double step = 0.03;    // ms, coarse grid
  double resolution = 1e-3;
};

struct SimulationSettings {
  TrapSpec trap = TrapSpec::paper_2022();
  PulseOptions pulse;
  IntegratorSettings integrator;
  TermSelection terms;
  int cutoff = 4;
  int total_cap = 6;          // cap on total phonon number, -1 for none
  double macro_step = 0.002;  // ms, Strang step for noisy runs
  int workers = 1;
  std::optional<double> tau3;  // fixes the subtraction times instead of optimizing
  std::optional<double> tau4;
  TauScan tau_scan;
};

struct SweepPoint {
  std::vector<double> coords;
  std::vector<double> values;
  bool failed = false;
  std::string error;
};

/// Rectangular grid; points are stored with the last axis varying fastest.
struct SweepGrid {
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> axis_values;
  std::vector<std::string> columns;
  std::vector<SweepPoint> points;

  std::size_t column(const std::string& name) const;
  double value(std::size_t point, const std::string& name) const { return points.at(point).values.at(column(name)); }
};

// Gate characterizations.
SweepGrid characterize_rsb(const std::vector<double>& thetas, const NoiseSpec& noise,
                           const SimulationSettings& settings = {}, int mode = 2);

struct ModePair {
  int j = 0;
  int k = 0;
};
SweepGrid characterize_bs(const std::vector<ModePair>& pairs, const std::vector<double>& thetas,
                          const NoiseSpec& noise, const SimulationSettings& settings = {});

/// Axes (scaled_tau = τ g0 η_mode, n). Each input |g, n⟩ runs through the full
/// subtraction gate and is compared with |g, n-1⟩.
SweepGrid characterize_subtraction(int mode, const std::vector<double>& scaled_taus, const std::vector<int>& ns,
                                   const NoiseSpec& noise, const SimulationSettings& settings = {},
                                   Sideband sideband = Sideband::red);

/// ⟨n_mode⟩ sampled at t/τ = s for s in `fractions` during the adiabatic sweep
/// that starts from |g, n⟩ (red) or |e, n⟩ (blue).
std::vector<double> subtraction_trajectory(int mode, double tau, int n, const std::vector<double>& fractions,
                                           const SimulationSettings& settings = {}, Sideband sideband = Sideband::red);

// Full protocol.
struct GateRecord {
  std::string name;
  double duration = 0.0;  // ms
  double isolated_fidelity = 1.0;
  double accumulated_fidelity = 1.0;
  double accumulated_time = 0.0;  // ms
  double probability = 1.0;       // branch probability of this gate
};

struct ProtocolLedger {
  Scenario scenario = Scenario::with_ia;
  GateModel model = GateModel::ideal;
  Sideband sideband = Sideband::red;
  std::vector<GateRecord> rows;
  double fidelity = 0.0;             // final state against the GHZ target
  double success_probability = 1.0;  // product of branch probabilities
  double uncorrected_fidelity = 0.0;  // after the second subtraction
  double uncorrected_success = 1.0;
  double tau3 = 0.0;
  double tau4 = 0.0;
  DensityOperator final_state;
  bool failed = false;
  std::string error;
};

ProtocolLedger run_protocol(Scenario scenario, GateModel model, const NoiseSpec& noise,
                            Sideband sideband = Sideband::red, const SimulationSettings& settings = {});

/// Runs several noise settings through one protocol. Drive propagators are
/// shared within a batch; batches are split over `settings.workers` threads.
std::vector<ProtocolLedger> run_protocol_batch(Scenario scenario, const std::vector<NoiseSpec>& noises,
                                               Sideband sideband = Sideband::red,
                                               const SimulationSettings& settings = {}, bool isolated = true);

/// Subtraction times maximizing the accumulated zero-noise fidelity. Cached per
/// scenario, sideband and settings.
std::pair<double, double> optimal_subtraction_times(Scenario scenario, Sideband sideband,
                                                    const SimulationSettings& settings = {});

/// Axes (xi_gamma, xi_kappa); columns fidelity, success, rho11, rho22, rho12_re, rho12_im.
SweepGrid noise_map(Scenario scenario, const std::vector<double>& xi_gamma, const std::vector<double>& xi_kappa,
                    Coupling coupling = Coupling::both, Sideband sideband = Sideband::red,
                    const NoiseSpec& reference = NoiseSpec::paper_2022(), const SimulationSettings& settings = {});

struct RhoElements {
  double rho11 = 0.0;
  double rho22 = 0.0;
  cplx rho12{0.0, 0.0};
};
RhoElements density_matrix_elements(const DensityOperator& rho);

}  // namespace sculpt
