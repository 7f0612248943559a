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

#include "sculpt/fock.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

using namespace sculpt;

namespace {

Vec random_vec(std::size_t d, std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(n(rng), n(rng));
  return v;
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(ModeSpace, Dimensions) {
  EXPECT_EQ(make_space(4, 4, true).dim(), 1250u);
  EXPECT_EQ(make_space(1, 0, false).dim(), 1u);
  EXPECT_EQ(make_space(2, 1, true).dim(), 8u);
  EXPECT_EQ(ModeSpace(4, 4, true, 5).dim(), 244u);
  EXPECT_EQ(ModeSpace(4, 4, true, 16).dim(), 1250u);
}

TEST(ModeSpace, RejectsBadInput) {
  EXPECT_THROW(make_space(0, 3, false), std::invalid_argument);
  EXPECT_THROW(make_space(2, -1, false), std::invalid_argument);
  EXPECT_THROW(ModeSpace(30, 9, true), std::length_error);
  EXPECT_THROW(ModeSpace(4, 4, true, -1, 100), std::length_error);
}

TEST(ModeSpace, SmallOrderingMatchesHandEnumeration) {
  const ModeSpace sp = make_space(2, 1, true);
  const std::vector<std::pair<std::vector<int>, Spin>> expected = {
      {{0, 0}, Spin::g}, {{0, 1}, Spin::g}, {{1, 0}, Spin::g}, {{1, 1}, Spin::g},
      {{0, 0}, Spin::e}, {{0, 1}, Spin::e}, {{1, 0}, Spin::e}, {{1, 1}, Spin::e}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto l = sp.label(i);
    EXPECT_EQ(l.occupations, expected[i].first) << i;
    EXPECT_EQ(l.spin, expected[i].second) << i;
  }
}

TEST(ModeSpace, OdometerOracle) {
  const ModeSpace sp = make_space(3, 2, false);
  std::size_t k = 0;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int c = 0; c <= 2; ++c) {
        std::vector<int> occ{a, b, c};
        EXPECT_EQ(basis_index(sp, occ), k);
        ++k;
      }
}

TEST(ModeSpace, RoundTripAllIndices) {
  for (const ModeSpace& sp : {make_space(3, 2, true), ModeSpace(4, 4, true, 5), ModeSpace(6, 4, false, 6)}) {
    for (std::size_t i = 0; i < sp.dim(); ++i) {
      const auto l = sp.label(i);
      EXPECT_EQ(sp.index(l.occupations, l.spin), i);
    }
  }
}

TEST(ModeSpace, CappedOrderingIsLexicographicFilter) {
  const ModeSpace full = make_space(3, 3, false);
  const ModeSpace cap(3, 3, false, 4);
  std::size_t k = 0;
  for (std::size_t i = 0; i < full.dim(); ++i) {
    const auto l = full.label(i);
    int s = 0;
    for (int v : l.occupations) s += v;
    if (s > 4) {
      EXPECT_FALSE(cap.find(l.occupations).has_value());
      continue;
    }
    EXPECT_EQ(cap.index(l.occupations), k++);
  }
  EXPECT_EQ(k, cap.dim());
}

TEST(ModeSpace, IndexErrors) {
  const ModeSpace sp = make_space(2, 2, true);
  std::vector<int> bad{3, 0};
  EXPECT_THROW(sp.index(bad, Spin::g), std::out_of_range);
  std::vector<int> ok{0, 0};
  EXPECT_EQ(sp.index(ok, Spin::g), 0u);
  EXPECT_THROW(sp.index(ok, Spin::none), std::invalid_argument);
}

TEST(Ladder, Oracles) {
  const ModeSpace sp = make_space(1, 4, false);
  const auto a = ladder_lower(sp, 1);
  auto s1 = apply(a, basis_state(sp, {1}));
  EXPECT_NEAR(std::abs(inner_product(basis_state(sp, {0}), s1) - 1.0), 0.0, 1e-15);
  auto s3 = apply(a, basis_state(sp, {3}));
  EXPECT_NEAR(std::abs(inner_product(basis_state(sp, {2}), s3) - std::sqrt(3.0)), 0.0, 1e-15);
  EXPECT_NEAR(norm(apply(a, basis_state(sp, {0}))), 0.0, 0.0);

  Eigen::SelfAdjointEigenSolver<Mat> es(number_op(sp, 1).dense());
  for (int n = 0; n <= 4; ++n) EXPECT_NEAR(es.eigenvalues()[n], n, 1e-12);
  const Mat nn = ladder_raise(sp, 1).compose(a).dense();
  EXPECT_LT(max_abs(nn - number_op(sp, 1).dense()), 1e-14);
}

TEST(Ladder, TruncatedCommutator) {
  const ModeSpace sp = make_space(2, 3, true);
  for (int m = 1; m <= 2; ++m) {
    const Mat a = ladder_lower(sp, m).dense();
    const Mat ad = ladder_raise(sp, m).dense();
    Mat expect = Mat::Identity(sp.dim(), sp.dim());
    for (std::size_t i = 0; i < sp.dim(); ++i)
      if (sp.occupation(i, m) == sp.cutoff()) expect(i, i) -= double(sp.cutoff() + 1);
    EXPECT_LT(max_abs(a * ad - ad * a - expect), 1e-12);
    EXPECT_LT(max_abs(ad - a.adjoint()), 0.0 + 1e-15);
  }
}

TEST(Arithmetic, ShiftWithoutSqrt) {
  const ModeSpace sp = make_space(1, 5, false);
  const auto s = arithmetic_lower(sp, 1);
  auto r = apply(s, basis_state(sp, {4}));
  EXPECT_NEAR(std::abs(inner_product(basis_state(sp, {3}), r)), 1.0, 1e-15);
  EXPECT_NEAR(norm(apply(s, basis_state(sp, {0}))), 0.0, 0.0);
  const Mat S = s.dense();
  const Mat Sd = arithmetic_raise(sp, 1).dense();
  EXPECT_LT(max_abs(Sd - S.adjoint()), 1e-15);
  // S^dag S + |0><0| = 1
  EXPECT_LT(max_abs(Sd * S + vacuum_projector(sp, 1).dense() - Mat::Identity(6, 6)), 1e-15);
  // S S^dag = 1 away from the truncation edge
  const Mat ssd = S * Sd;
  for (int n = 0; n < 5; ++n) EXPECT_NEAR(std::abs(ssd(n, n) - 1.0), 0.0, 1e-15);
}

TEST(Arithmetic, PreservesInnerProductsWithoutVacuum) {
  std::mt19937 rng(7);
  const ModeSpace sp = make_space(3, 3, true);
  const auto s = arithmetic_lower(sp, 2);
  const auto p0 = vacuum_projector(sp, 2);
  for (int trial = 0; trial < 20; ++trial) {
    HybridState a(sp, random_vec(sp.dim(), rng)), b(sp, random_vec(sp.dim(), rng));
    a.amplitudes -= p0.apply(a.amplitudes);
    b.amplitudes -= p0.apply(b.amplitudes);
    const cplx before = inner_product(a, b);
    const cplx after = inner_product(apply(s, a), apply(s, b));
    EXPECT_LT(std::abs(before - after), 1e-12 * (1.0 + std::abs(before)));
  }
}

TEST(Spin, Operators) {
  const ModeSpace sp = make_space(1, 1, true);
  const auto g = basis_state(sp, {0}, Spin::g), e = basis_state(sp, {0}, Spin::e);
  EXPECT_NEAR(std::abs(inner_product(g, apply(spin_op(sp, SpinOp::z), g)) + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(inner_product(e, apply(spin_op(sp, SpinOp::plus), g)) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(norm(apply(spin_op(sp, SpinOp::plus), e)), 0.0, 0.0);
  const Mat x = spin_op(sp, SpinOp::x).dense();
  EXPECT_LT(max_abs(x * x - Mat::Identity(4, 4)), 1e-15);
  const Mat y = spin_op(sp, SpinOp::y).dense(), z = spin_op(sp, SpinOp::z).dense();
  EXPECT_LT(max_abs(x * y - kI * z), 1e-15);
  const Mat p = spin_op(sp, SpinOp::plus).dense();
  EXPECT_LT(max_abs(p - 0.5 * (x + kI * y)), 1e-15);
  EXPECT_THROW(spin_op(make_space(2, 1, false), SpinOp::x), std::invalid_argument);
}

TEST(Apply, IdentityAndNumber) {
  const ModeSpace sp = make_space(2, 3, false);
  const auto s = basis_state(sp, {2, 1});
  EXPECT_LT((apply(LinearOperator::identity(sp), s).amplitudes - s.amplitudes).norm(), 1e-15);
  EXPECT_NEAR(std::abs(expectation(number_op(sp, 1), s) - 2.0), 0.0, 1e-15);
  EXPECT_LT((apply(number_op(sp, 1), s).amplitudes - 2.0 * s.amplitudes).norm(), 1e-15);
}

TEST(Apply, RandomSparseMatchesDense) {
  std::mt19937 rng(11);
  const ModeSpace sp = make_space(3, 1, true);  // dim 16
  ASSERT_LE(sp.dim(), 64u);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(sp.dim()) - 1);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (int k = 0; k < 40; ++k) t.emplace_back(pick(rng), pick(rng), cplx(nd(rng), nd(rng)));
    SpMat m(sp.dim(), sp.dim());
    m.setFromTriplets(t.begin(), t.end());
    LinearOperator op(sp, m);
    const Vec x = random_vec(sp.dim(), rng);
    EXPECT_LT((op.apply(x) - Mat(m) * x).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Apply, ComposeIsFunctorial) {
  std::mt19937 rng(3);
  const ModeSpace sp = make_space(2, 2, true);
  const std::vector<LinearOperator> ops = {ladder_lower(sp, 1), ladder_raise(sp, 2), spin_op(sp, SpinOp::y),
                                           arithmetic_lower(sp, 2), number_op(sp, 1)};
  for (const auto& a : ops)
    for (const auto& b : ops) {
      const Vec x = random_vec(sp.dim(), rng);
      const auto ab = a.compose(b);
      EXPECT_EQ(ab.num_factors(), 2u);
      EXPECT_LT((ab.apply(x) - a.apply(b.apply(x))).norm(), 1e-13);
      EXPECT_LT((ab.apply(x) - a.dense() * (b.dense() * x)).norm(), 1e-12);
      EXPECT_LT(max_abs(ab.adjoint().dense() - ab.dense().adjoint()), 1e-13);
    }
}

TEST(States, NormalizeAndInner) {
  const ModeSpace sp = make_space(2, 1, false);
  const auto x = basis_state(sp, {1, 0}), y = basis_state(sp, {0, 1});
  EXPECT_NEAR(inner_product(x, x).real(), 1.0, 0.0);
  HybridState z(sp, (2.0 * x.amplitudes - y.amplitudes) / std::sqrt(5.0));
  const auto n = normalize(z);
  EXPECT_NEAR(n.norm2, 1.0, 1e-15);
  HybridState w(sp, 0.5 * x.amplitudes);
  EXPECT_NEAR(normalize(w).norm2, 0.25, 1e-15);
  EXPECT_THROW(normalize(HybridState(sp)), std::domain_error);
  EXPECT_NEAR(expectation(number_op(make_space(1, 4, false), 1), basis_state(make_space(1, 4, false), {3})).real(),
              3.0, 1e-15);
}

TEST(PartialTrace, ProductState) {
  const ModeSpace sp = make_space(2, 2, true);
  const auto psi = basis_state(sp, {2, 1}, Spin::e);
  const auto r = partial_trace(DensityOperator::pure(psi), {1});
  ASSERT_EQ(r.space.dim(), 3u);
  EXPECT_NEAR(r.matrix(2, 2).real(), 1.0, 1e-15);
  EXPECT_NEAR(r.matrix.cwiseAbs().sum(), 1.0, 1e-15);
  const auto rs = partial_trace(DensityOperator::pure(psi), {0});
  EXPECT_NEAR(rs.matrix(1, 1).real(), 1.0, 1e-15);
}

TEST(PartialTrace, BellLike) {
  const ModeSpace sp = make_space(2, 1, false);
  HybridState psi(sp, (basis_state(sp, {1, 0}).amplitudes + basis_state(sp, {0, 1}).amplitudes) / std::sqrt(2.0));
  const auto r = partial_trace(DensityOperator::pure(psi), {1});
  EXPECT_NEAR(r.matrix(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(r.matrix(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(r.matrix(0, 1)), 0.0, 1e-15);
  EXPECT_THROW(partial_trace(DensityOperator::pure(psi), {}), std::invalid_argument);
}

TEST(PartialTrace, IndexSummationOracle) {
  std::mt19937 rng(5);
  const ModeSpace sp = make_space(3, 2, false);
  HybridState psi(sp, random_vec(sp.dim(), rng));
  psi = normalize(psi).state;
  const auto rho = DensityOperator::pure(psi);
  // keep modes {1,3}: sum over n2
  Mat oracle = Mat::Zero(9, 9);
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c)
      for (int a2 = 0; a2 < 3; ++a2)
        for (int c2 = 0; c2 < 3; ++c2)
          for (int b = 0; b < 3; ++b) {
            std::vector<int> i{a, b, c}, j{a2, b, c2};
            oracle(a * 3 + c, a2 * 3 + c2) += rho.matrix(sp.index(i), sp.index(j));
          }
  const auto r = partial_trace(rho, {3, 1});
  EXPECT_LT(max_abs(r.matrix - oracle), 1e-14);
  EXPECT_LT(max_abs(reduced_density(psi, {1, 3}).matrix - oracle), 1e-14);
  EXPECT_NEAR(std::abs(r.trace() - 1.0), 0.0, 1e-13);
  EXPECT_LT(r.hermiticity_error(), 1e-15);
}

TEST(PartialTrace, NestedKeepSets) {
  std::mt19937 rng(9);
  const ModeSpace sp = make_space(3, 1, true);
  HybridState psi = normalize(HybridState(sp, random_vec(sp.dim(), rng))).state;
  const auto rho = DensityOperator::pure(psi);
  const auto a = partial_trace(partial_trace(rho, {0, 1, 3}), {0, 2});  // modes renumbered 1,2
  const auto b = partial_trace(rho, {0, 3});
  EXPECT_LT(max_abs(a.matrix - b.matrix), 1e-14);
}

TEST(Snapshot, RoundTripIsBitExact) {
  std::mt19937 rng(13);
  const ModeSpace sp(4, 4, true, 5);
  const HybridState psi(sp, random_vec(sp.dim(), rng));
  std::stringstream ss;
  write_snapshot(ss, psi);
  const auto back = read_snapshot(ss);
  EXPECT_EQ(back.space, sp);
  EXPECT_EQ((back.amplitudes - psi.amplitudes).cwiseAbs().maxCoeff(), 0.0);
  std::stringstream bad("sculpt-state 2\n");
  EXPECT_THROW(read_snapshot(bad), std::runtime_error);
}
