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

#include "sculpt/entanglement.hpp"

#include <cmath>
#include <stdexcept>

namespace sculpt {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double entropy_of(const Eigen::VectorXd& evals) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    const double p = evals[i];
    if (p > 1e-15) s -= p * std::log(p);
  }
  return s;
}

LinearOperator b_op(const ModeSpace& sp, double theta, double sign) {
  const double r2 = 1.0 / std::sqrt(2.0);
  SpMat m = std::sin(theta) * ladder_lower(sp, 1).sparse() +
            sign * std::cos(theta) * ladder_lower(sp, 2).sparse() +
            cplx(r2, 0.0) * ladder_lower(sp, 3).sparse() -
            cplx(sign * r2, 0.0) * ladder_lower(sp, 4).sparse();
  return LinearOperator(sp, SpMat(cplx(r2, 0.0) * m));
}

HybridState b_theta_raw(double theta, int cutoff) {
  ModeSpace sp(4, cutoff, false);
  std::vector<int> ones{1, 1, 1, 1};
  HybridState psi = basis_state(sp, ones);
  psi = apply(b_op(sp, theta, +1.0), psi);
  return apply(b_op(sp, theta, -1.0), psi);
}

}  // namespace

HybridState motional_part(const HybridState& state, double tol) {
  if (!state.space.has_spin()) return state;
  const ModeSpace& sp = state.space;
  const auto md = static_cast<Eigen::Index>(sp.motional_dim());
  Mat blocks(md, 2);
  blocks.col(0) = state.amplitudes.head(md);
  blocks.col(1) = state.amplitudes.tail(md);
  Eigen::JacobiSVD<Mat> svd(blocks, Eigen::ComputeThinU);
  const auto sv = svd.singularValues();
  if (sv[1] > tol * std::max(sv[0], 1.0))
    throw std::invalid_argument("spin is entangled with the modes; entropy needs a product spin");
  ModeSpace msp(sp.num_modes(), sp.cutoff(), false, sp.total_cap());
  Vec v = svd.matrixU().col(0) * sv[0];
  // Fix the gauge so the largest amplitude is real and positive.
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (std::abs(v[k]) > 0) v *= std::conj(v[k]) / std::abs(v[k]);
  return HybridState(msp, v);
}

ParticleExpansion to_particle_basis(const HybridState& input) {
  const HybridState st = motional_part(input);
  const ModeSpace& sp = st.space;
  int total = -1;
  for (std::size_t i = 0; i < sp.dim(); ++i) {
    if (std::abs(st.amplitudes[static_cast<Eigen::Index>(i)]) < 1e-14) continue;
    const int t = sp.total_occupation(i);
    if (total >= 0 && t != total) throw std::invalid_argument("to_particle_basis: indefinite particle number");
    total = t;
  }
  if (total < 0) throw std::invalid_argument("to_particle_basis: zero state");
  const int m = sp.num_modes();
  ParticleExpansion pe;
  pe.num_particles = total;
  pe.single_particle_dim = m;
  const auto size = static_cast<Eigen::Index>(std::llround(std::pow(double(m), total)));
  pe.tensor = Vec::Zero(size);
  std::vector<int> counts(static_cast<std::size_t>(m));
  for (Eigen::Index s = 0; s < size; ++s) {
    std::fill(counts.begin(), counts.end(), 0);
    Eigen::Index rest = s;
    for (int p = 0; p < total; ++p) {
      ++counts[static_cast<std::size_t>(rest % m)];
      rest /= m;
    }
    auto idx = sp.find(counts);
    if (!idx) continue;
    double w = 1.0;
    for (int c : counts) w *= factorial(c);
    pe.tensor[s] = st.amplitudes[static_cast<Eigen::Index>(*idx)] * std::sqrt(w / factorial(total));
  }
  return pe;
}

double von_neumann_entropy(const Mat& rho) {
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) throw std::invalid_argument("von_neumann_entropy: trace is not 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  return entropy_of(es.eigenvalues());
}

double von_neumann_entropy(const DensityOperator& rho) { return von_neumann_entropy(rho.matrix); }

double mode_entanglement(const HybridState& input) {
  const HybridState st = normalize(motional_part(input)).state;
  const int m = st.space.num_modes();
  double best = 0.0;
  // Complementary subsets share their entropy, so mode 1 can stay on the far side.
  for (unsigned mask = 1; mask < (1u << (m - 1)); ++mask) {
    std::vector<int> keep;
    for (int k = 0; k < m - 1; ++k)
      if (mask & (1u << k)) keep.push_back(k + 2);
    best = std::max(best, von_neumann_entropy(reduced_density(st, keep)));
  }
  return best;
}

double particle_entanglement(const ParticleExpansion& pe) {
  const int n = pe.num_particles;
  if (n < 2) return 0.0;
  const Eigen::Index d = pe.single_particle_dim;
  const double nrm = pe.tensor.norm();
  double best = 0.0;
  for (int k = 1; k <= n / 2; ++k) {
    const auto rows = static_cast<Eigen::Index>(std::llround(std::pow(double(d), n - k)));
    const auto cols = static_cast<Eigen::Index>(std::llround(std::pow(double(d), k)));
    // Column-major map: the k slowest particle labels form the column index.
    Eigen::Map<const Mat> mat(pe.tensor.data(), rows, cols);
    Eigen::JacobiSVD<Mat> svd(mat / nrm);
    Eigen::VectorXd p = svd.singularValues().array().square();
    best = std::max(best, entropy_of(p));
  }
  return best;
}

double particle_entanglement(const HybridState& state) {
  return particle_entanglement(to_particle_basis(state));
}

HybridState b_theta_state(double theta, int cutoff) {
  return normalize(b_theta_raw(theta, cutoff)).state;
}

double b_theta_weight(double theta) { return b_theta_raw(theta, 1).amplitudes.squaredNorm(); }

double binary_entropy(double p) {
  double s = 0.0;
  if (p > 0.0) s -= p * std::log(p);
  if (p < 1.0) s -= (1.0 - p) * std::log(1.0 - p);
  return s;
}

std::vector<EntropyRow> fig_a1_sweep(const std::vector<double>& thetas) {
  if (thetas.empty()) throw std::invalid_argument("fig_a1_sweep: empty grid");
  std::vector<EntropyRow> rows;
  rows.reserve(thetas.size());
  for (double t : thetas) {
    const HybridState st = b_theta_state(t);
    EntropyRow r;
    r.theta = t;
    r.s_me = mode_entanglement(st);
    r.s_pe = particle_entanglement(st);
    r.sum = r.s_me + r.s_pe;
    r.branch_weight = b_theta_weight(t);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace sculpt
