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

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sculpt/fock.hpp"
#include "sculpt/laser_hamiltonian.hpp"

namespace sculpt {

/// Reservoir couplings per mode. Heating rates are given as phonons per ms
/// (n̄γ), dephasing rates in 1/ms.
struct NoiseSpec {
  std::vector<double> heating_rates;
  std::vector<double> dephasing_rates;
  double nbar = 1e6;
  double scale_gamma = 1.0;
  double scale_kappa = 1.0;
  /// Use the literal a†a ρ a a† form for the third dissipator instead of D[n].
  bool as_printed_dephasing = false;

  static NoiseSpec none(int num_modes);
  static NoiseSpec paper_2022();

  void validate(int num_modes) const;
  double gamma(int mode) const;  // scaled γ_r = ξ_γ Γ_r / n̄
  double kappa(int mode) const;  // scaled κ_r
  bool is_zero() const;
};

enum class IntegratorMethod { dopri5, rk4 };

struct IntegratorSettings {
  IntegratorMethod method = IntegratorMethod::dopri5;
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.0;     // ms, 0 means unbounded
  double fixed_step = 1e-5;  // ms, rk4 only
  double min_step = 1e-14;   // ms, underflow guard
  void validate() const;
};

/// Raised when the adaptive step underflows; carries the time reached.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

class PositivityError : public std::runtime_error {
 public:
  PositivityError(const std::string& what, double min_eig) : std::runtime_error(what), min_eig_(min_eig) {}
  double min_eigenvalue() const { return min_eig_; }

 private:
  double min_eig_;
};

struct IntegrationStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Writes H(t) into the second argument.
using HamiltonianFn = std::function<void(double, SpMat&)>;

/// Solves i dX/dt = H(t) X column by column from t0 to t1.
Mat propagate(const HamiltonianFn& h, double t0, double t1, const Mat& x0, const IntegratorSettings& settings,
              IntegrationStats* stats = nullptr);

HamiltonianFn laser_drive(const InteractionHamiltonian& ham, const LaserConfig& config);

struct UnitaryResult {
  HybridState state;
  double norm_drift = 0.0;  // |‖ψ(τ)‖ − ‖ψ0‖|, never corrected
  IntegrationStats stats;
};

UnitaryResult evolve_unitary(const LaserConfig& config, const TrapSpec& trap, const HybridState& psi0,
                             const IntegratorSettings& settings = {}, TermSelection terms = {});
UnitaryResult evolve_unitary(const InteractionHamiltonian& ham, const LaserConfig& config, const HybridState& psi0,
                             const IntegratorSettings& settings = {});

/// Matrix-free reservoir part of the master equation.
class Dissipator {
 public:
  Dissipator(const ModeSpace& space, const NoiseSpec& noise);

  bool empty() const { return channels_.empty(); }
  /// out = D(rho)
  void apply(const Mat& rho, Mat& out) const;
  /// rho <- exp(D dt) rho with internal RK4 substeps.
  void step(Mat& rho, double dt) const;
  double max_rate() const { return max_rate_; }

 private:
  // Each channel contributes c (A ρ B − {C, ρ}/2) with C diagonal.
  struct Channel {
    SpMat left;
    SpMat right;
    Eigen::VectorXd anti;  // diagonal of c C / 2
  };
  std::vector<Channel> channels_;
  double max_rate_ = 0.0;
};

struct LindbladResult {
  DensityOperator rho;
  double trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  IntegrationStats stats;
};

/// Direct integration of the full master equation on a dense ρ.
LindbladResult evolve_lindblad(const LaserConfig& config, const TrapSpec& trap, const NoiseSpec& noise,
                               const DensityOperator& rho0, const IntegratorSettings& settings = {},
                               TermSelection terms = {});
LindbladResult evolve_lindblad(const InteractionHamiltonian& ham, const LaserConfig& config, const NoiseSpec& noise,
                               const DensityOperator& rho0, const IntegratorSettings& settings = {});

/// Strang splitting for a batch of density matrices that share one drive but
/// see different reservoirs. The drive propagator over each macro step is
/// computed once and applied to every member of the batch.
void evolve_lindblad_split(const HamiltonianFn& h, double t0, double t1, const std::vector<const Dissipator*>& diss,
                           std::vector<Mat>& rhos, const IntegratorSettings& settings, double macro_step,
                           IntegrationStats* stats = nullptr);

/// Smallest eigenvalue of the Hermitian part; throws PositivityError below -tol.
double check_positivity(const DensityOperator& rho, double tol = 1e-6);

double fidelity(const HybridState& a, const HybridState& b);
double fidelity(const DensityOperator& rho, const HybridState& b);

/// exp(+i ζ σz / 2), the frame correction for an accumulated light shift ζ.
void apply_virtual_z(HybridState& state, double zeta);
void apply_virtual_z(Mat& rho, const ModeSpace& space, double zeta);

}  // namespace sculpt
