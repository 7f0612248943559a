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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"

using namespace sculpt;

namespace {

constexpr double kPi = std::numbers::pi;

double product_of_steps(const ProtocolResult& r) {
  double p = 1.0;
  for (const auto& s : r.step_log) p *= s.probability;
  return p;
}

// Independent oracle: product of linear forms in collective creation operators acting on vacuum.
HybridState product_state(const ModeSpace& sp, const std::vector<std::array<double, 4>>& rows) {
  HybridState psi = basis_state(sp, {0, 0, 0, 0}, Spin::g);
  for (const auto& row : rows) {
    Vec next = Vec::Zero(static_cast<Eigen::Index>(sp.dim()));
    for (int k = 0; k < 4; ++k) next += row[static_cast<std::size_t>(k)] * ladder_raise(sp, k + 1).apply(psi.amplitudes);
    psi.amplitudes = next;
  }
  return normalize(psi).state;
}

HybridState eq11_oracle(const ModeSpace& sp) {
  return product_state(sp, {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}});
}

double phase_free_distance(const HybridState& a, const HybridState& b) {
  const cplx ov = inner_product(a, b);
  const cplx ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1.0, 0.0);
  return (a.amplitudes * ph - b.amplitudes).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(BasisMap, OrthogonalAndFirstRow) {
  const BasisMap m = four_ion_basis_map();
  EXPECT_TRUE(is_orthogonal(m));
  EXPECT_DOUBLE_EQ(m.lambda, 0.306277);
  BasisMap bad = m;
  bad.coefficients(0, 0) = 0.7;
  EXPECT_FALSE(is_orthogonal(bad));
  EXPECT_THROW(local_to_collective(HybridState(scenario_space()), bad), std::invalid_argument);
}

TEST(BasisMap, VacuumAndSinglePhonon) {
  const ModeSpace sp(4, 2, false);
  const BasisMap m = four_ion_basis_map();
  const auto vac = basis_state(sp, {0, 0, 0, 0});
  EXPECT_LT(phase_free_distance(local_to_collective(vac, m), vac), 1e-15);
  // Collective phonon 1 is the uniform superposition of local phonons.
  const auto c1 = basis_state(sp, {1, 0, 0, 0});
  const auto local = collective_to_local(c1, m);
  for (int l = 1; l <= 4; ++l) {
    std::vector<int> o(4, 0);
    o[static_cast<std::size_t>(l - 1)] = 1;
    EXPECT_NEAR(std::abs(local.amplitudes[static_cast<Eigen::Index>(sp.index(o))] - 0.5), 0.0, 1e-15);
  }
}

TEST(BasisMap, RoundTripRandomStates) {
  std::mt19937 rng(17);
  std::normal_distribution<double> nd;
  const ModeSpace sp(4, 3, true, 3);
  const BasisMap m = four_ion_basis_map();
  for (int t = 0; t < 3; ++t) {
    HybridState psi(sp);
    for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) psi.amplitudes[i] = cplx(nd(rng), nd(rng));
    const auto back = collective_to_local(local_to_collective(psi, m), m);
    EXPECT_LT((back.amplitudes - psi.amplitudes).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(norm(local_to_collective(psi, m)), norm(psi), 1e-12);
  }
}

TEST(BasisMap, OperatorMapMatchesStateMap) {
  const ModeSpace sp(4, 2, false, 2);
  const BasisMap m = four_ion_basis_map();
  const auto op = ladder_raise(sp, 2).compose(ladder_lower(sp, 1));
  const auto psi = basis_state(sp, {1, 0, 1, 0});
  const auto lhs = apply(local_to_collective(op, m), local_to_collective(psi, m));
  const auto rhs = local_to_collective(apply(op, psi), m);
  EXPECT_LT((lhs.amplitudes - rhs.amplitudes).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PrepareSym, BasisState) {
  const auto sp = scenario_space();
  const auto s = prepare_sym(sp);
  EXPECT_NEAR(norm(s), 1.0, 0.0);
  EXPECT_NEAR(std::abs(s.amplitudes[static_cast<Eigen::Index>(sp.index(std::vector<int>{1, 1, 1, 1}, Spin::g))]), 1.0, 0.0);
  EXPECT_THROW(prepare_sym(make_space(2, 0, false)), std::invalid_argument);
}

TEST(PrepareSym, GateSequenceMatchesDirect) {
  // Per mode: carrier pi to |e>, then rsb pi moves the excitation into the mode.
  const ModeSpace sp(4, 2, true);
  HybridState psi = basis_state(sp, {0, 0, 0, 0}, Spin::g);
  for (int mode = 1; mode <= 4; ++mode) {
    psi = apply(carrier(sp, kPi, kPi / 2), psi);
    psi = apply(rsb(sp, mode, kPi, kPi / 2), psi);
  }
  EXPECT_NEAR(std::abs(inner_product(prepare_sym(sp), psi)), 1.0, 1e-12);
}

TEST(SubtractionAj, Phases) {
  const ModeSpace s2(2, 1, false);
  const Mat a0 = subtraction_Aj(s2, 0, 1).dense();
  EXPECT_LT((a0 - (ladder_lower(s2, 1) + ladder_lower(s2, 2)).dense()).cwiseAbs().maxCoeff(), 1e-12);
  const ModeSpace s4(4, 1, false);
  const Mat b0 = subtraction_Aj(s4, 0, 2).dense();
  const Mat ref = (ladder_lower(s4, 1) + ladder_lower(s4, 2) - ladder_lower(s4, 3) + ladder_lower(s4, 4)).dense();
  EXPECT_LT((b0 - ref).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(subtraction_Aj(s4, 2, 2), std::invalid_argument);
  const auto out = apply(subtraction_Aj(s4, 1, 2), basis_state(s4, {1, 0, 1, 1}));
  for (std::size_t i = 0; i < s4.dim(); ++i)
    if (std::abs(out.amplitudes[static_cast<Eigen::Index>(i)]) > 0) EXPECT_EQ(s4.total_occupation(i), 2);
}

TEST(SculptJ, PrintedPhasesGiveSymmetricSign) {
  // With the q-dependent phases the two surviving terms always add with a + sign.
  for (int n = 1; n <= 3; ++n) {
    const auto r = sculpt_J(n);
    const auto& sp = r.final_state.space;
    std::vector<int> a(static_cast<std::size_t>(2 * n), 0), b = a;
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(n + i)] = 1;
    const cplx ca = r.final_state.amplitudes[static_cast<Eigen::Index>(sp.index(a))];
    const cplx cb = r.final_state.amplitudes[static_cast<Eigen::Index>(sp.index(b))];
    EXPECT_NEAR(std::abs(ca), 1.0 / std::sqrt(2.0), 1e-12) << n;
    EXPECT_NEAR(std::abs(cb / ca - 1.0), 0.0, 1e-12) << n;
    EXPECT_NEAR(r.fidelity, n % 2 == 1 ? 1.0 : 0.0, 1e-12) << n;
  }
}

TEST(SculptJ, ModeIndependentPhasesMatchGhzTargets) {
  for (int n = 1; n <= 4; ++n) {
    const auto r = sculpt_J(n, AjPhases::mode_independent);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-12) << n;
    Mat ntot = Mat::Zero(r.final_state.space.dim(), r.final_state.space.dim());
    for (int m = 1; m <= 2 * n; ++m) ntot += number_op(r.final_state.space, m).dense();
    EXPECT_NEAR(std::abs(r.final_state.amplitudes.dot(ntot * r.final_state.amplitudes) - double(n)), 0.0, 1e-12);
  }
}

TEST(GhzTarget, Conventions) {
  const ModeSpace sp(4, 1, false);
  const auto main = ghz_target(sp, 2, GhzConvention::main);
  EXPECT_NEAR(main.amplitudes[static_cast<Eigen::Index>(sp.index(std::vector<int>{1, 1, 0, 0}))].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(main.amplitudes[static_cast<Eigen::Index>(sp.index(std::vector<int>{0, 0, 1, 1}))].real(), -1 / std::sqrt(2.0), 1e-15);
  const auto b = ghz_target(sp, 2, GhzConvention::appendix_b);
  EXPECT_NEAR(b.amplitudes[static_cast<Eigen::Index>(sp.index(std::vector<int>{1, 0, 1, 0}))].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(b.amplitudes[static_cast<Eigen::Index>(sp.index(std::vector<int>{0, 1, 0, 1}))].real(), 1 / std::sqrt(2.0), 1e-15);
  const ModeSpace s2(2, 1, false);
  const auto one = ghz_target(s2, 1, GhzConvention::main);
  EXPECT_NEAR(one.amplitudes[1].real(), one.amplitudes[2].real(), 1e-15);
}

TEST(Scenarios, WithInteractionAlgebra) {
  const auto r = scenario_with_ia();
  const auto& sp = r.post_beam_splitter.space;
  EXPECT_LT(phase_free_distance(r.post_beam_splitter, eq11_oracle(sp)), 1e-12);
  EXPECT_NEAR(r.uncorrected.overlap_magnitude, 3.0 / std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(r.uncorrected.fidelity, 0.9, 1e-12);
  EXPECT_NEAR(r.uncorrected.success_prob, 5.0 / 16.0, 1e-12);
  EXPECT_NEAR(r.corrected.fidelity, 1.0, 1e-12);
  EXPECT_NEAR(r.corrected.success_prob, 1.0 / 8.0, 1e-12);
  // Unnormalized-ledger consistency.
  EXPECT_NEAR(r.corrected.success_prob, product_of_steps(r.corrected), 1e-12);
  const cplx a = r.uncorrected.final_state.amplitudes[static_cast<Eigen::Index>(sp.index(std::vector<int>{1, 1, 0, 0}, Spin::g))];
  const cplx b = r.uncorrected.final_state.amplitudes[static_cast<Eigen::Index>(sp.index(std::vector<int>{0, 0, 1, 1}, Spin::g))];
  EXPECT_NEAR(std::abs(a / b + 2.0), 0.0, 1e-12);
}

TEST(Scenarios, WithoutInteractionAlgebra) {
  const auto a = scenario_with_ia();
  const auto b = scenario_without_ia();
  EXPECT_LT(phase_free_distance(a.post_beam_splitter, b.post_beam_splitter), 1e-12);
  EXPECT_NEAR(b.corrected.fidelity, 1.0, 1e-12);
  EXPECT_NEAR(b.corrected.success_prob, 0.125, 1e-12);
  EXPECT_NEAR(b.uncorrected.success_prob, 5.0 / 16.0, 1e-12);
}

TEST(Scenarios, BeamSplitterOrderMatters) {
  const auto sp = scenario_space();
  HybridState ref = prepare_sym(sp), alt = prepare_sym(sp);
  for (auto [j, k] : {std::pair{1, 2}, {3, 4}, {1, 3}, {2, 4}}) ref = apply(beam_splitter(sp, j, k, kPi / 2, -kPi / 2), ref);
  for (auto [j, k] : {std::pair{1, 2}, {1, 3}, {3, 4}, {2, 4}}) alt = apply(beam_splitter(sp, j, k, kPi / 2, -kPi / 2), alt);
  EXPECT_GT(phase_free_distance(ref, alt), 1e-3);
}

TEST(General, CyclicIndex) {
  EXPECT_EQ(cyc(4, 1, 2), 1);
  EXPECT_EQ(cyc(2, 1, 2), 3);
  EXPECT_EQ(cyc(6, 3, 3), 3);
  EXPECT_EQ(cyc(1, 0, 2), 1);
}

TEST(General, LadderVariantExact) {
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(general_sculpt(n, GeneralVariant::ladder, false).fidelity, 1.0, 1e-12) << n;
}

TEST(General, ArithmeticClosedForms) {
  for (int n = 1; n <= 4; ++n) {
    const auto u = general_sculpt(n, GeneralVariant::arithmetic, false);
    EXPECT_NEAR(u.success_prob, closed_form_success(n, false), 1e-10) << n;
    EXPECT_NEAR(u.overlap_magnitude, closed_form_overlap(n), 1e-10) << n;
    const auto c = general_sculpt(n, GeneralVariant::arithmetic, true);
    EXPECT_NEAR(c.success_prob, closed_form_success(n, true), 1e-10) << n;
    EXPECT_NEAR(c.fidelity, 1.0, 1e-10) << n;
    EXPECT_NEAR(c.success_prob, product_of_steps(c), 1e-12);
  }
  EXPECT_THROW(general_sculpt(5, GeneralVariant::arithmetic, false), std::length_error);
}

TEST(General, EvenModeCorrectionIsNotExact) {
  GeneralOptions opts;
  opts.correction_modes = CorrectionModes::even;
  opts.correction_theta = kPi / 4;
  const auto r = general_sculpt(2, GeneralVariant::arithmetic, true, opts);
  EXPECT_LT(r.fidelity, 1.0 - 1e-6);
}

TEST(ClosedForms, Values) {
  EXPECT_NEAR(closed_form_overlap(2), 3.0 / std::sqrt(10.0), 1e-15);
  EXPECT_NEAR(closed_form_success(1, false), 1.0, 0.0);
  EXPECT_NEAR(closed_form_success(2, false), 5.0 / 16.0, 1e-15);
  EXPECT_NEAR(closed_form_success(3, true), 1.0 / 32.0, 0.0);
  EXPECT_THROW(closed_form_overlap(0), std::invalid_argument);
}
