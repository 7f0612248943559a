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

#include "sculpt/fock.hpp"

namespace sculpt {

struct GateParams {
  double theta = 0.0;
  double phi = 0.0;
  int mode_j = 0;
  int mode_k = 0;
};

/// |g> -> cos(t/2)|g> - i e^{i phi} sin(t/2)|e>,
/// |e> -> cos(t/2)|e> - i e^{-i phi} sin(t/2)|g>.
LinearOperator carrier(const ModeSpace& space, double theta, double phi);

/// |e,n> <-> |g,n+1> with mixing angle theta*sqrt(n+1)/2.
/// |e,n> -> c|e,n> - i e^{i phi} s|g,n+1>.
LinearOperator rsb(const ModeSpace& space, int mode, double theta, double phi);

/// |e,n+1> <-> |g,n> with mixing angle theta*sqrt(n+1)/2.
/// |e,n+1> -> c|e,n+1> - i e^{i phi} s|g,n>.
LinearOperator bsb(const ModeSpace& space, int mode, double theta, double phi);

/// exp(theta (a^dag e^{i phi} - a e^{-i phi})) on one mode.
LinearOperator displacement(const ModeSpace& space, int mode, double theta, double phi);
/// False when theta^2 exceeds cutoff/4 and the truncated result is unreliable.
bool displacement_within_cutoff(const ModeSpace& space, double theta);

/// Two-mode beam splitter fixed by its Heisenberg action
///   B a_j B^dag = cos(t/2) a_j - i e^{i phi} sin(t/2) a_k,
///   B a_k B^dag = cos(t/2) a_k - i e^{-i phi} sin(t/2) a_j,
/// i.e. B = exp[i t/2 (a_j^dag a_k e^{i phi} + a_j a_k^dag e^{-i phi})].
LinearOperator beam_splitter(const ModeSpace& space, int j, int k, double theta, double phi);

struct Branch {
  HybridState state;         // not renormalized
  double probability = 0.0;  // relative to the input norm squared
};

/// Removes the vacuum component of `mode` and shifts n -> n-1 without sqrt(n).
/// probability == 0 marks an impossible branch.
Branch arithmetic_subtract(const HybridState& state, int mode);

/// Projects onto a spin branch. Throws std::domain_error for a zero branch.
Branch post_select_spin(const HybridState& state, Spin branch);

}  // namespace sculpt
