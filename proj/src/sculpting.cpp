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

#include "sculpt/sculpting.hpp"

#include <cmath>
#include <stdexcept>

namespace sculpt {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

LinearOperator creation_form(const ModeSpace& space, const Eigen::MatrixXd& r, int l) {
  SpMat acc(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  for (int k = 1; k <= space.num_modes(); ++k) {
    const double c = r(k - 1, l - 1);
    if (c != 0.0) acc += cplx(c, 0.0) * ladder_raise(space, k).sparse();
  }
  return LinearOperator(space, std::move(acc));
}

Mat transform_matrix(const ModeSpace& space, const Eigen::MatrixXd& r) {
  const auto d = static_cast<Eigen::Index>(space.dim());
  Mat t(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    HybridState e(space);
    e.amplitudes[i] = 1.0;
    t.col(i) = transform_modes(e, r).amplitudes;
  }
  return t;
}

ProtocolResult finish(const HybridState& raw, const HybridState& target,
                      std::vector<StepRecord> steps) {
  ProtocolResult out;
  Normalized nz = normalize(raw);
  out.final_state = std::move(nz.state);
  out.success_prob = 1.0;
  for (const auto& s : steps) out.success_prob *= s.probability;
  out.overlap_with_target = inner_product(target, out.final_state);
  out.overlap_magnitude = std::abs(out.overlap_with_target);
  out.fidelity = out.overlap_magnitude * out.overlap_magnitude;
  out.step_log = std::move(steps);
  return out;
}

void subtract(HybridState& psi, int mode, std::vector<StepRecord>& log) {
  Branch b = arithmetic_subtract(psi, mode);
  if (!(b.probability > 0.0)) throw std::domain_error("subtraction branch is impossible");
  log.push_back({"S" + std::to_string(mode), b.probability});
  psi = std::move(b.state);
}

ScenarioResult scenario_tail(HybridState psi, std::vector<StepRecord> log) {
  const ModeSpace& sp = psi.space;
  ScenarioResult res;
  res.post_beam_splitter = normalize(psi).state;
  subtract(psi, 3, log);
  subtract(psi, 4, log);
  const HybridState target = ghz_target(sp, 2, GhzConvention::main);
  res.uncorrected = finish(psi, target, log);
  psi = apply(rsb(sp, 2, 2.0 * kPi / 3.0, kPi / 2.0), psi);
  Branch sel = post_select_spin(psi, Spin::g);
  log.push_back({"RSB2+select(g)", sel.probability});
  res.corrected = finish(sel.state, target, log);
  return res;
}

}  // namespace

BasisMap four_ion_basis_map(double lambda) {
  const double c = std::cos(lambda), s = std::sin(lambda), r2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd m(4, 4);
  m << 0.5, 0.5, 0.5, 0.5,
      -c * r2, -s * r2, s * r2, c * r2,
      0.5, -0.5, -0.5, 0.5,
      -s * r2, c * r2, -c * r2, s * r2;
  return BasisMap{m, lambda};
}

bool is_orthogonal(const BasisMap& map, double tol) {
  const auto& m = map.coefficients;
  if (m.rows() != m.cols()) return false;
  return (m * m.transpose() - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

HybridState transform_modes(const HybridState& state, const Eigen::MatrixXd& r) {
  const ModeSpace& sp = state.space;
  if (r.rows() != sp.num_modes() || r.cols() != sp.num_modes())
    throw std::invalid_argument("transform_modes: coefficient matrix has the wrong shape");
  std::vector<LinearOperator> forms;
  for (int l = 1; l <= sp.num_modes(); ++l) forms.push_back(creation_form(sp, r, l));
  std::vector<int> zeros(static_cast<std::size_t>(sp.num_modes()), 0);
  HybridState out(sp);
  for (std::size_t i = 0; i < sp.dim(); ++i) {
    const cplx c = state.amplitudes[static_cast<Eigen::Index>(i)];
    if (c == cplx(0.0, 0.0)) continue;
    const Spin s = sp.spin(i);
    Vec v = Vec::Zero(static_cast<Eigen::Index>(sp.dim()));
    v[static_cast<Eigen::Index>(sp.index(zeros, s))] = 1.0;
    double fact = 1.0;
    for (int l = 1; l <= sp.num_modes(); ++l) {
      const int n = sp.occupation(i, l);
      for (int t = 0; t < n; ++t) v = forms[static_cast<std::size_t>(l - 1)].apply(v);
      fact *= factorial(n);
    }
    out.amplitudes += (c / std::sqrt(fact)) * v;
  }
  return out;
}

HybridState local_to_collective(const HybridState& state, const BasisMap& map) {
  if (!is_orthogonal(map)) throw std::invalid_argument("local_to_collective: basis map is not orthogonal");
  return transform_modes(state, map.coefficients);
}

HybridState collective_to_local(const HybridState& state, const BasisMap& map) {
  if (!is_orthogonal(map)) throw std::invalid_argument("collective_to_local: basis map is not orthogonal");
  return transform_modes(state, map.coefficients.transpose());
}

LinearOperator local_to_collective(const LinearOperator& op, const BasisMap& map) {
  if (!is_orthogonal(map)) throw std::invalid_argument("local_to_collective: basis map is not orthogonal");
  const Mat t = transform_matrix(op.space(), map.coefficients);
  const Mat o = t * op.dense() * t.adjoint();
  return LinearOperator(op.space(), SpMat(o.sparseView(1.0, 1e-14)));
}

LinearOperator collective_to_local(const LinearOperator& op, const BasisMap& map) {
  if (!is_orthogonal(map)) throw std::invalid_argument("collective_to_local: basis map is not orthogonal");
  const Mat t = transform_matrix(op.space(), map.coefficients.transpose());
  const Mat o = t * op.dense() * t.adjoint();
  return LinearOperator(op.space(), SpMat(o.sparseView(1.0, 1e-14)));
}

HybridState prepare_sym(const ModeSpace& space) {
  if (space.cutoff() < 1) throw std::invalid_argument("prepare_sym: cutoff must be >= 1");
  std::vector<int> ones(static_cast<std::size_t>(space.num_modes()), 1);
  return basis_state(space, ones, space.has_spin() ? Spin::g : Spin::none);
}

LinearOperator subtraction_Aj(const ModeSpace& space, int j, int n, AjPhases phases) {
  if (n < 1 || j < 0 || j > n - 1) throw std::invalid_argument("subtraction_Aj: need 0 <= j < n");
  if (space.num_modes() != 2 * n) throw std::invalid_argument("subtraction_Aj: space must have 2n modes");
  SpMat acc(static_cast<Eigen::Index>(space.dim()), static_cast<Eigen::Index>(space.dim()));
  for (int p = 1; p <= n; ++p) acc += ladder_lower(space, p).sparse();
  for (int q = n + 1; q <= 2 * n; ++q) {
    const int shift = phases == AjPhases::printed ? q : 0;
    acc += std::polar(1.0, 2.0 * (j + shift) * kPi / n) * ladder_lower(space, q).sparse();
  }
  return LinearOperator(space, std::move(acc));
}

HybridState ghz_target(const ModeSpace& space, int n, GhzConvention convention) {
  if (space.num_modes() != 2 * n) throw std::invalid_argument("ghz_target: space must have 2n modes");
  const Spin s = space.has_spin() ? Spin::g : Spin::none;
  std::vector<int> a(static_cast<std::size_t>(2 * n), 0), b = a;
  double sign = 1.0;
  for (int i = 0; i < 2 * n; ++i) {
    const bool first = convention == GhzConvention::main ? i < n : i % 2 == 0;
    (first ? a : b)[static_cast<std::size_t>(i)] = 1;
  }
  if (convention == GhzConvention::main && n % 2 == 0) sign = -1.0;
  HybridState out = basis_state(space, a, s);
  out.amplitudes[static_cast<Eigen::Index>(space.index(b, s))] += sign;
  out.amplitudes /= std::sqrt(2.0);
  return out;
}

ProtocolResult sculpt_J(int n, AjPhases phases) {
  if (n < 1) throw std::invalid_argument("sculpt_J: n must be >= 1");
  ModeSpace sp(2 * n, 1, false);
  HybridState psi = prepare_sym(sp);
  for (int j = 0; j < n; ++j) psi = apply(subtraction_Aj(sp, j, n, phases), psi);
  return finish(psi, ghz_target(sp, n, GhzConvention::main), {});
}

ModeSpace scenario_space(int cutoff) {
  if (cutoff < 4) throw std::invalid_argument("four-mode scenarios need cutoff >= 4");
  return ModeSpace(4, cutoff, true);
}

HybridState local_sym4_in_collective(const ModeSpace& space, const BasisMap& map) {
  return local_to_collective(prepare_sym(space), map);
}

double with_ia_bs_theta(double lambda) { return 2.0 * lambda - kPi / 2.0; }

ScenarioResult scenario_with_ia(int cutoff) {
  const ModeSpace sp = scenario_space(cutoff);
  HybridState psi = local_sym4_in_collective(sp, four_ion_basis_map());
  psi = apply(beam_splitter(sp, 2, 4, with_ia_bs_theta(), -kPi / 2.0), psi);
  return scenario_tail(std::move(psi), {{"B~24", 1.0}});
}

ScenarioResult scenario_without_ia(int cutoff) {
  const ModeSpace sp = scenario_space(cutoff);
  HybridState psi = prepare_sym(sp);
  std::vector<StepRecord> log;
  for (auto [j, k] : {std::pair{1, 2}, {3, 4}, {1, 3}, {2, 4}}) {
    psi = apply(beam_splitter(sp, j, k, kPi / 2.0, -kPi / 2.0), psi);
    log.push_back({"B" + std::to_string(j) + std::to_string(k), 1.0});
  }
  return scenario_tail(std::move(psi), std::move(log));
}

int cyc(int x, int y, int n) { return 1 + ((x + y - 1) % (2 * n) + 2 * n) % (2 * n); }

ProtocolResult general_sculpt(int n, GeneralVariant variant, bool rsb_correction,
                              const GeneralOptions& opts) {
  if (n < 1) throw std::invalid_argument("general_sculpt: n must be >= 1");
  if (n > opts.max_n) throw std::length_error("general_sculpt: n exceeds the configured maximum");
  const int m = 2 * n;
  std::vector<StepRecord> log;

  if (variant == GeneralVariant::ladder) {
    ModeSpace sp(m, 2, false, m);
    HybridState psi = prepare_sym(sp);
    for (int j = 0; j < n; ++j) {
      const int x = 2 * j;
      SpMat f = 0.5 * (ladder_lower(sp, cyc(x, 1, n)).sparse() - ladder_lower(sp, cyc(x, 2, n)).sparse() +
                       ladder_lower(sp, cyc(x, 3, n)).sparse() + ladder_lower(sp, cyc(x, 4, n)).sparse());
      psi = apply(LinearOperator(sp, std::move(f)), psi);
    }
    for (int j = 1; j <= n; ++j) psi = apply(beam_splitter(sp, 2 * j - 1, 2 * j, kPi / 2.0, -kPi / 2.0), psi);
    return finish(psi, ghz_target(sp, n, GhzConvention::appendix_b), std::move(log));
  }

  ModeSpace sp(m, 4, rsb_correction, m);
  HybridState psi = prepare_sym(sp);
  for (int l = 1; l <= n; ++l)
    psi = apply(beam_splitter(sp, 2 * l - 1, 2 * l, -kPi / 2.0, -kPi / 2.0), psi);
  for (int k = 1; k <= n; ++k)
    psi = apply(beam_splitter(sp, 2 * k, cyc(2 * k, 1, n), -kPi / 2.0, -kPi / 2.0), psi);
  for (int j = 1; j <= n; ++j) subtract(psi, 2 * j, log);
  if (rsb_correction) {
    for (int i = 1; i <= n; ++i) {
      const int mode = opts.correction_modes == CorrectionModes::partner ? cyc(2 * i, 1, n) : 2 * i;
      psi = apply(rsb(sp, mode, opts.correction_theta, kPi / 2.0), psi);
      Branch b = post_select_spin(psi, Spin::g);
      log.push_back({"RSB" + std::to_string(mode) + "+select(g)", b.probability});
      psi = std::move(b.state);
    }
  }
  for (int h = 1; h <= n; ++h)
    psi = apply(beam_splitter(sp, 2 * h, cyc(2 * h, 1, n), kPi / 2.0, -kPi / 2.0), psi);
  return finish(psi, ghz_target(sp, n, GhzConvention::appendix_b), std::move(log));
}

double closed_form_overlap(int n) {
  if (n < 1) throw std::invalid_argument("closed_form_overlap: n must be >= 1");
  const double r2 = std::sqrt(2.0);
  return (std::pow(r2 - 1.0, n) + std::pow(r2 + 1.0, n)) / std::sqrt(std::pow(2.0, n) * (std::pow(3.0, n) + 1.0));
}

double closed_form_success(int n, bool corrected) {
  if (n < 1) throw std::invalid_argument("closed_form_success: n must be >= 1");
  if (corrected) return std::pow(2.0, -(2 * n - 1));
  return (std::pow(3.0, n) + 1.0) / std::pow(2.0, 3 * n - 1);
}

}  // namespace sculpt
