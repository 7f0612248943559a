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

#include <numbers>
#include <string>
#include <vector>

#include "sculpt/fock.hpp"
#include "sculpt/ideal_gates.hpp"

namespace sculpt {

/// Mixing angle of collective modes 2 and 4 for the four-ion chain.
inline constexpr double kLambda = 0.306277;

/// a_{c,k} = sum_l coefficients(k, l) a_{l,l}; rows are collective modes.
struct BasisMap {
  Eigen::MatrixXd coefficients;
  double lambda = kLambda;
};

BasisMap four_ion_basis_map(double lambda = kLambda);
bool is_orthogonal(const BasisMap& map, double tol = 1e-12);

/// Passive linear map a_l^dag -> sum_k r(k, l) a_k^dag on Fock amplitudes.
/// Exact when the cutoff is at least the largest total occupation present.
HybridState transform_modes(const HybridState& state, const Eigen::MatrixXd& r);

HybridState local_to_collective(const HybridState& state, const BasisMap& map);
HybridState collective_to_local(const HybridState& state, const BasisMap& map);
/// O_c = T O_l T^dag with T the state map; dense internally, small spaces only.
LinearOperator local_to_collective(const LinearOperator& op, const BasisMap& map);
LinearOperator collective_to_local(const LinearOperator& op, const BasisMap& map);

struct StepRecord {
  std::string gate;
  double probability = 1.0;
};

struct ProtocolResult {
  HybridState final_state;  // normalized
  double success_prob = 1.0;
  cplx overlap_with_target{0.0, 0.0};
  double overlap_magnitude = 0.0;
  double fidelity = 0.0;  // squared overlap
  std::vector<StepRecord> step_log;
};

HybridState prepare_sym(const ModeSpace& space);

/// Sum over p <= n of a_p plus sum over q > n of exp(i 2 (j+q) pi / n) a_q.
/// Phase pattern on modes q > n: printed uses e^{i2(j+q)pi/n}, mode_independent drops the q term.
enum class AjPhases { printed, mode_independent };

LinearOperator subtraction_Aj(const ModeSpace& space, int j, int n, AjPhases phases = AjPhases::printed);

enum class GhzConvention { main, appendix_b };

/// main: (|1..1 0..0> + (-1)^{n+1} |0..0 1..1>)/sqrt2.
/// appendix_b: (a1^dag a3^dag ... + a2^dag a4^dag ...)|0>/sqrt2.
HybridState ghz_target(const ModeSpace& space, int n, GhzConvention convention);

/// Applies the product of the n subtraction operators to |sym_2n>.
ProtocolResult sculpt_J(int n, AjPhases phases = AjPhases::printed);

struct ScenarioResult {
  HybridState post_beam_splitter;  // normalized, before the subtractions
  ProtocolResult uncorrected;      // after both subtractions
  ProtocolResult corrected;        // after the sideband correction and spin selection
};

/// Collective-mode space used by both four-mode scenarios.
ModeSpace scenario_space(int cutoff = 4);
/// Local |sym4> expressed in collective modes.
HybridState local_sym4_in_collective(const ModeSpace& space, const BasisMap& map);
ScenarioResult scenario_with_ia(int cutoff = 4);
ScenarioResult scenario_without_ia(int cutoff = 4);

/// Gate parameters of the with-ia beam splitter B~_{2,4}.
double with_ia_bs_theta(double lambda = kLambda);

/// Cyclic index x (+) y = 1 + (x + y - 1) mod 2n.
int cyc(int x, int y, int n);

enum class GeneralVariant { ladder, arithmetic };

/// Where the sideband correction is applied in the arithmetic variant.
/// `partner` acts on modes 2i (+) 1 with the occupied branch scaled by
/// cos(theta/2); with the beam-splitter convention used here this is where
/// the surplus sqrt2 sits. `even` acts on modes 2i.
enum class CorrectionModes { partner, even };

struct GeneralOptions {
  double correction_theta = std::numbers::pi / 2.0;
  CorrectionModes correction_modes = CorrectionModes::partner;
  int max_n = 4;
};

ProtocolResult general_sculpt(int n, GeneralVariant variant, bool rsb_correction,
                              const GeneralOptions& opts = {});

double closed_form_overlap(int n);
double closed_form_success(int n, bool corrected);

}  // namespace sculpt
