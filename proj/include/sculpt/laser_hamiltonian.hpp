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

#include <array>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "sculpt/fock.hpp"

namespace sculpt {

/// Time unit is ms, angular frequencies are rad/ms.
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDefaultG0 = std::numbers::pi / 0.004;
inline constexpr double kDefaultRampRatio = 0.125;

struct TrapSpec {
  std::vector<double> nu;   // collective mode frequencies
  std::vector<double> eta;  // Lamb-Dicke parameters
  double omega_x = 0.0;
  double omega_z = 0.0;

  int num_modes() const { return static_cast<int>(nu.size()); }
  /// Throws std::invalid_argument on nonpositive or mismatched entries.
  void validate() const;

  /// Four-ion trap: nu = 2pi x (1270, 1159, 982, 702) rad/ms, eta = (0.067, 0.067, 0.076, 0.094).
  static TrapSpec paper_2022();
};

enum class GateKind { carrier, rsb, bsb, displacement, beam_splitter };
const char* to_string(GateKind kind);

enum class EnvelopeKind { soft_square, half_sine };

/// Coupling envelope g(t), zero outside [0, tau].
struct Envelope {
  EnvelopeKind kind = EnvelopeKind::soft_square;
  double g0 = kDefaultG0;
  double tau = 0.0;
  double t_r = 0.0;  // only for soft_square

  double value(double t) const;
  /// Integral of g over [0, t].
  double area(double t) const;
  /// Integral of g^2 over [0, t].
  double square_area(double t) const;
  double total_area() const { return area(tau); }
};

struct PulseShape {
  double g0 = kDefaultG0;
  double tau = 0.0;
  double t_r = 0.0;
};

/// Soft-edged square pulse: sin^2 ramps of length t_r around a flat top at g0.
double pulse_envelope(double t, const PulseShape& shape);

/// theta / (integral of g) for each gate family.
double angle_factor(GateKind kind, const TrapSpec& trap, int j, int k = 0);

/// Duration such that angle_factor * g0 * (tau - t_r) = theta with t_r = ratio * tau.
double duration_for_angle(GateKind kind, double theta, const TrapSpec& trap, int j, int k = 0,
                          double g0 = kDefaultG0, double ratio = kDefaultRampRatio);

/// delta(t) = offset + sweep * cos(pi t / tau) + shift_per_g2 * g(t)^2.
struct LaserBeam {
  double phi = 0.0;
  double offset = 0.0;
  double sweep = 0.0;
  double shift_per_g2 = 0.0;
};

struct LaserConfig {
  std::string label;
  GateKind kind = GateKind::carrier;
  int mode_j = 0;
  int mode_k = 0;
  Envelope envelope;
  std::array<LaserBeam, 2> lasers;

  double duration() const { return envelope.tau; }
  double detuning(int l, double t) const;
  /// Integral of the detuning over [0, t].
  double phase(int l, double t) const;
  /// Spin phase accumulated by the light-shift term; undo with exp(i z sigma_z / 2).
  double light_shift_phase() const;
};

struct PulseOptions {
  double g0 = kDefaultG0;
  double ramp_ratio = kDefaultRampRatio;
  /// Retune sideband lasers by -2 g(t)^2 / delta to cancel the off-resonant carrier light shift.
  bool light_shift_compensation = true;
};

/// Laser settings of the gate table; phi is the laser-level phase parameter.
LaserConfig gate_config(GateKind kind, const TrapSpec& trap, double theta, double phi, int j, int k = 0,
                        const PulseOptions& opts = {});

enum class Sideband { red, blue };

/// Adiabatic sideband sweep: delta = -+nu_k + Delta0 cos(pi t / tau), g = g0 sin(pi t / tau).
LaserConfig adiabatic_schedule(int mode, int n_max, double tau, const TrapSpec& trap, Sideband sideband = Sideband::red,
                               double phi = 0.0, const PulseOptions& opts = {});
double adiabatic_sweep_amplitude(int mode, int n_max, const TrapSpec& trap, double g0 = kDefaultG0);

/// Families of the interaction Hamiltonian; each can be switched off for ablation.
struct TermSelection {
  bool carrier = true;       // sigma_+ part of the zeroth-order term
  bool stark = true;         // eta^2 (n + 1/2) part of the zeroth-order term
  bool blue = true;          // sigma_+ a_j^dag
  bool red = true;           // sigma_+ a_j
  bool cross = true;         // sigma_+- a_j a_k^dag, j < k
  bool second_order = true;  // sigma_+- a_j^dag^2
};

/// H_I(t) precompiled on a space: one sparse pattern, coefficients refreshed per time.
class InteractionHamiltonian {
 public:
  InteractionHamiltonian(const ModeSpace& space, const TrapSpec& trap, TermSelection terms = {});

  const ModeSpace& space() const { return space_; }
  const TrapSpec& trap() const { return trap_; }
  std::size_t nonzeros() const { return static_cast<std::size_t>(pattern_.nonZeros()); }

  /// Writes H(t) into `out` (reuses storage).
  void evaluate(const LaserConfig& config, double t, SpMat& out) const;
  LinearOperator at(const LaserConfig& config, double t) const;

 private:
  struct Contribution {
    Eigen::Index slot;
    int coeff;        // index into the coefficient table
    cplx base;
    bool conjugate;   // use conj(coefficient)
  };
  void coefficients(const LaserConfig& config, double t, std::vector<cplx>& c, double& diag) const;

  ModeSpace space_;
  TrapSpec trap_;
  TermSelection terms_;
  SpMat pattern_;
  std::vector<Contribution> contributions_;
  std::vector<std::pair<Eigen::Index, double>> diagonal_;  // slot, sum eta^2 (n + 1/2)
  int num_coeffs_ = 0;
};

LinearOperator interaction_hamiltonian(const LaserConfig& config, const TrapSpec& trap, const ModeSpace& space,
                                       double t, TermSelection terms = {});

}  // namespace sculpt
