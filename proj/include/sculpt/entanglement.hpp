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

#include <vector>

#include "sculpt/fock.hpp"

namespace sculpt {

/// Symmetric first-quantized amplitudes, index s_1 * d^{N-1} + ... + s_N.
struct ParticleExpansion {
  int num_particles = 0;
  int single_particle_dim = 0;
  Vec tensor;
};

/// Drops a product spin factor. Throws if spin and modes are entangled.
HybridState motional_part(const HybridState& state, double tol = 1e-10);

/// Requires a definite total particle number.
ParticleExpansion to_particle_basis(const HybridState& state);

/// Natural-log entropy; eigenvalues below 1e-15 contribute nothing.
double von_neumann_entropy(const Mat& rho);
double von_neumann_entropy(const DensityOperator& rho);

/// Maximum reduced entropy over nonempty proper mode subsets.
double mode_entanglement(const HybridState& state);
/// Maximum over particle-count splits k | N-k; zero for N < 2.
double particle_entanglement(const HybridState& state);
double particle_entanglement(const ParticleExpansion& expansion);

/// Normalized b_{-t} b_{+t} |sym4> on four spinless modes.
HybridState b_theta_state(double theta, int cutoff = 1);
/// Norm squared of b_{-t} b_{+t} |sym4> (the unnormalized branch weight).
double b_theta_weight(double theta);

struct EntropyRow {
  double theta = 0.0;
  double s_me = 0.0;
  double s_pe = 0.0;
  double sum = 0.0;
  double branch_weight = 0.0;
};

std::vector<EntropyRow> fig_a1_sweep(const std::vector<double>& thetas);

double binary_entropy(double p);

}  // namespace sculpt
