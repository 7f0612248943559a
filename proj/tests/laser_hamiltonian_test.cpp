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

#include "sculpt/laser_hamiltonian.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace sculpt;

namespace {

constexpr double kPi = std::numbers::pi;

double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

TrapSpec two_mode_trap() {
  TrapSpec t;
  t.nu = {kTwoPi * 1270.0, kTwoPi * 1159.0};
  t.eta = {0.067, 0.081};
  t.omega_x = kTwoPi * 1270.0;
  t.omega_z = kTwoPi * 519.0;
  return t;
}

// Direct dense assembly of the interaction Hamiltonian, term by term.
Mat oracle(const LaserConfig& c, const TrapSpec& trap, const ModeSpace& sp, double t) {
  const int m = trap.num_modes();
  const Mat sp_ = spin_op(sp, SpinOp::plus).dense();
  const Mat sm = spin_op(sp, SpinOp::minus).dense();
  const Mat id = Mat::Identity(static_cast<Eigen::Index>(sp.dim()), static_cast<Eigen::Index>(sp.dim()));
  std::vector<Mat> a, ad, n;
  for (int j = 1; j <= m; ++j) {
    a.push_back(ladder_lower(sp, j).dense());
    ad.push_back(ladder_raise(sp, j).dense());
    n.push_back(number_op(sp, j).dense());
  }
  const double g = c.envelope.value(t);
  Mat h = Mat::Zero(id.rows(), id.cols());
  auto hc = [](const Mat& x) { return Mat(x + x.adjoint()); };
  for (int l = 0; l < 2; ++l) {
    const double phi = c.lasers[static_cast<std::size_t>(l)].phi;
    const double big = simpson([&](double s) { return c.detuning(l, s); }, 0.0, t);
    const cplx w = std::polar(1.0, phi - big);
    Mat stark = Mat::Zero(id.rows(), id.cols());
    for (int j = 0; j < m; ++j) stark += trap.eta[j] * trap.eta[j] * (n[j] + 0.5 * id);
    h += hc(0.5 * g * w * sp_) - g * std::cos(phi - big) * stark;
    for (int j = 0; j < m; ++j) {
      const double nu = trap.nu[j], e = trap.eta[j];
      h += hc(0.5 * g * e * std::polar(1.0, phi + kPi / 2) * std::polar(1.0, -(big - nu * t)) * sp_ * ad[j]);
      h += hc(0.5 * g * e * std::polar(1.0, phi + kPi / 2) * std::polar(1.0, -(big + nu * t)) * sp_ * a[j]);
      h -= hc(0.25 * g * e * e *
              (std::polar(1.0, phi) * std::polar(1.0, -(big - 2 * nu * t)) * sp_ * ad[j] * ad[j] +
               std::polar(1.0, -phi) * std::polar(1.0, big + 2 * nu * t) * sm * ad[j] * ad[j]));
      for (int k = j + 1; k < m; ++k) {
        const double dnu = trap.nu[k] - nu;
        h -= hc(0.5 * g * e * trap.eta[k] *
                (std::polar(1.0, phi) * std::polar(1.0, -(big - dnu * t)) * sp_ * a[j] * ad[k] +
                 std::polar(1.0, -phi) * std::polar(1.0, big + dnu * t) * sm * a[j] * ad[k]));
      }
    }
  }
  return h;
}

LaserConfig generic_config() {
  LaserConfig c;
  c.envelope = Envelope{EnvelopeKind::soft_square, 700.0, 0.03, 0.004};
  c.lasers[0] = LaserBeam{0.3, -7000.0, 150.0, 2.0 / 7000.0};
  c.lasers[1] = LaserBeam{-1.1, 650.0, 0.0, 0.0};
  return c;
}

}  // namespace

TEST(Trap, ReferenceValues) {
  const TrapSpec t = TrapSpec::paper_2022();
  ASSERT_EQ(t.num_modes(), 4);
  EXPECT_DOUBLE_EQ(t.nu[0], kTwoPi * 1270.0);
  EXPECT_DOUBLE_EQ(t.nu[3], kTwoPi * 702.0);
  EXPECT_DOUBLE_EQ(t.eta[3], 0.094);
  EXPECT_DOUBLE_EQ(t.omega_z, kTwoPi * 519.0);
  TrapSpec bad = t;
  bad.eta.pop_back();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Envelope, AreasMatchQuadrature) {
  for (auto kind : {EnvelopeKind::soft_square, EnvelopeKind::half_sine}) {
    const Envelope e{kind, 785.0, 0.2, 0.025};
    for (double t : {0.0, 0.01, 0.025, 0.1, 0.18, 0.2}) {
      // Relative tolerances: the quadrature itself is good to about 1e-10.
      const double a = simpson([&](double s) { return e.value(s); }, 0.0, t);
      const double a2 = simpson([&](double s) { return e.value(s) * e.value(s); }, 0.0, t);
      EXPECT_NEAR(e.area(t), a, 1e-9 * std::max(1.0, a));
      EXPECT_NEAR(e.square_area(t), a2, 1e-9 * std::max(1.0, a2));
    }
  }
  const Envelope sq{EnvelopeKind::soft_square, 2.0, 1.0, 0.125};
  EXPECT_NEAR(sq.total_area(), 2.0 * (1.0 - 0.125), 1e-14);
  EXPECT_DOUBLE_EQ(sq.value(0.5), 2.0);
  EXPECT_DOUBLE_EQ(sq.value(1.5), 0.0);
}

TEST(Durations, AngleRelation) {
  const TrapSpec t = TrapSpec::paper_2022();
  for (auto kind : {GateKind::carrier, GateKind::rsb, GateKind::bsb, GateKind::displacement, GateKind::beam_splitter}) {
    const double theta = 1.3;
    const LaserConfig c = gate_config(kind, t, theta, 0.2, 2, 4, {});
    EXPECT_NEAR(angle_factor(kind, t, 2, 4) * c.envelope.total_area(), theta, 1e-12) << to_string(kind);
    EXPECT_LT(duration_for_angle(kind, 1.0, t, 2, 4, kDefaultG0, 0.125),
              duration_for_angle(kind, 2.0, t, 2, 4, kDefaultG0, 0.125));
  }
  EXPECT_THROW(duration_for_angle(GateKind::rsb, 0.0, t, 2, 0, kDefaultG0, 0.125), std::invalid_argument);
  EXPECT_THROW(duration_for_angle(GateKind::rsb, -1.0, t, 2, 0, kDefaultG0, 0.125), std::invalid_argument);
  EXPECT_THROW(gate_config(GateKind::rsb, t, 1.0, 0.0, 5, 0, {}), std::out_of_range);
  EXPECT_THROW(gate_config(GateKind::beam_splitter, t, 1.0, 0.0, 2, 2, {}), std::invalid_argument);
}

TEST(GateConfig, DetuningAndPhaseTable) {
  const TrapSpec t = TrapSpec::paper_2022();
  PulseOptions plain;
  plain.light_shift_compensation = false;
  const double phi = 0.4, nu2 = t.nu[1], nu4 = t.nu[3];
  struct Row {
    GateKind kind;
    double d1, d2, p1, p2;
  };
  const Row rows[] = {
      {GateKind::carrier, 0.0, 0.0, -phi, -phi},
      {GateKind::rsb, -nu2, -nu2, -phi - kPi / 2, -phi - kPi / 2},
      {GateKind::bsb, nu2, nu2, -phi - kPi / 2, -phi - kPi / 2},
      {GateKind::displacement, nu2, -nu2, -phi, -phi - kPi},
      {GateKind::beam_splitter, nu2 - nu4, nu4 - nu2, kPi - phi, phi - kPi},
  };
  for (const auto& r : rows) {
    const LaserConfig c = gate_config(r.kind, t, 1.0, phi, 2, 4, plain);
    const double mid = c.duration() / 2;
    EXPECT_NEAR(c.detuning(0, mid), r.d1, 1e-9) << to_string(r.kind);
    EXPECT_NEAR(c.detuning(1, mid), r.d2, 1e-9) << to_string(r.kind);
    EXPECT_NEAR(c.lasers[0].phi, r.p1, 1e-15);
    EXPECT_NEAR(c.lasers[1].phi, r.p2, 1e-15);
    EXPECT_DOUBLE_EQ(c.light_shift_phase(), 0.0);
  }
}

TEST(GateConfig, LightShiftCompensation) {
  const TrapSpec t = TrapSpec::paper_2022();
  const LaserConfig c = gate_config(GateKind::rsb, t, kPi, 0.0, 2, 0, {});
  const double g0 = kDefaultG0, nu = t.nu[1];
  EXPECT_NEAR(c.detuning(0, c.duration() / 2), -nu + 2 * g0 * g0 / nu, 1e-9);
  EXPECT_NEAR(c.detuning(0, 0.0), -nu, 1e-9);
  EXPECT_NEAR(c.light_shift_phase(), (2.0 / nu) * c.envelope.square_area(c.duration()), 1e-12);
  // Carrier and beam splitter are never retuned.
  EXPECT_DOUBLE_EQ(gate_config(GateKind::carrier, t, 1.0, 0.0, 0, 0, {}).light_shift_phase(), 0.0);
  EXPECT_DOUBLE_EQ(gate_config(GateKind::beam_splitter, t, 1.0, 0.0, 1, 2, {}).light_shift_phase(), 0.0);
}

TEST(Adiabatic, ScheduleEndpoints) {
  const TrapSpec t = TrapSpec::paper_2022();
  PulseOptions plain;
  plain.light_shift_compensation = false;
  const double tau = 0.5;
  const LaserConfig c = adiabatic_schedule(4, 2, tau, t, Sideband::red, 0.0, plain);
  const double d0 = adiabatic_sweep_amplitude(4, 2, t, kDefaultG0);
  EXPECT_NEAR(d0, 0.5 * std::sqrt(3.0) * 0.094 * kDefaultG0, 1e-12);
  EXPECT_NEAR(c.detuning(0, 0.0), -t.nu[3] + d0, 1e-9);
  EXPECT_NEAR(c.detuning(0, tau / 2), -t.nu[3], 1e-9);
  EXPECT_NEAR(c.detuning(0, tau), -t.nu[3] - d0, 1e-9);
  EXPECT_NEAR(c.envelope.value(tau / 2), kDefaultG0, 1e-9);
  EXPECT_NEAR(c.envelope.value(0.0), 0.0, 1e-12);
  const LaserConfig b = adiabatic_schedule(4, 2, tau, t, Sideband::blue, 0.0, plain);
  EXPECT_NEAR(b.detuning(1, tau / 2), t.nu[3], 1e-9);
  EXPECT_THROW(adiabatic_schedule(4, 0, tau, t, Sideband::red, 0.0, plain), std::invalid_argument);
}

TEST(LaserConfig, PhaseIsIntegralOfDetuning) {
  const LaserConfig c = generic_config();
  for (int l = 0; l < 2; ++l)
    for (double t : {0.002, 0.011, 0.029}) {
      EXPECT_NEAR(c.phase(l, t), simpson([&](double s) { return c.detuning(l, s); }, 0.0, t), 1e-8);
    }
  const LaserConfig a = adiabatic_schedule(3, 4, 0.4, TrapSpec::paper_2022(), Sideband::red, 0.3, {});
  EXPECT_NEAR(a.phase(0, 0.37), simpson([&](double s) { return a.detuning(0, s); }, 0.0, 0.37), 1e-7);
}

TEST(Hamiltonian, MatchesDenseTermByTermAssembly) {
  const TrapSpec trap = two_mode_trap();
  const ModeSpace sp(2, 3, true);
  const InteractionHamiltonian ham(sp, trap);
  const LaserConfig c = generic_config();
  for (double t : {0.0013, 0.0152, 0.0281}) {
    const Mat h = ham.at(c, t).dense();
    const Mat ref = oracle(c, trap, sp, t);
    // Accumulated laser phases reach hundreds of radians, so compare relatively.
    EXPECT_LT((h - ref).cwiseAbs().maxCoeff(), 1e-9 * ref.cwiseAbs().maxCoeff()) << "t = " << t;
    EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Hamiltonian, TermSelectionRemovesFamilies) {
  const TrapSpec trap = two_mode_trap();
  const ModeSpace sp(2, 2, true);
  const LaserConfig c = generic_config();
  TermSelection none{false, false, false, false, false, false};
  EXPECT_EQ(InteractionHamiltonian(sp, trap, none).at(c, 0.01).dense().cwiseAbs().maxCoeff(), 0.0);
  TermSelection only_red = none;
  only_red.red = true;
  const Mat h = InteractionHamiltonian(sp, trap, only_red).at(c, 0.01).dense();
  // Red terms preserve spin excitation plus phonon number.
  const Mat nt = number_op(sp, 1).dense() + number_op(sp, 2).dense() + 0.5 * spin_op(sp, SpinOp::z).dense();
  EXPECT_LT((h * nt - nt * h).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_GT(h.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Hamiltonian, ZeroEnvelopeGivesZero) {
  const TrapSpec trap = TrapSpec::paper_2022();
  const ModeSpace sp(4, 2, true, 2);
  const InteractionHamiltonian ham(sp, trap);
  const LaserConfig c = gate_config(GateKind::rsb, trap, 1.0, 0.0, 2, 0, {});
  EXPECT_EQ(ham.at(c, 0.0).dense().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(ham.at(c, c.duration() + 1.0).dense().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(InteractionHamiltonian(ModeSpace(3, 2, true), trap), std::invalid_argument);
  EXPECT_THROW(InteractionHamiltonian(ModeSpace(4, 2, false), trap), std::invalid_argument);
}
