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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sculpt {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral of sin^2(pi s / (2 tr)) and of its square over [0, t], t <= tr.
double ramp_area(double t, double tr) { return t / 2.0 - tr / (2.0 * kPi) * std::sin(kPi * t / tr); }
double ramp_square_area(double t, double tr) {
  const double x = kPi * t / (2.0 * tr);
  return (2.0 * tr / kPi) * (3.0 * x / 8.0 - std::sin(2.0 * x) / 4.0 + std::sin(4.0 * x) / 32.0);
}

void check_mode(const TrapSpec& trap, int mode) {
  if (mode < 1 || mode > trap.num_modes()) throw std::out_of_range("mode index outside the trap");
}

SpMat product(const SpMat& a, const SpMat& b) { return SpMat(a * b); }

}  // namespace

void TrapSpec::validate() const {
  if (nu.empty() || nu.size() != eta.size()) throw std::invalid_argument("trap: nu and eta must have equal nonzero length");
  for (double v : nu)
    if (!(v > 0.0)) throw std::invalid_argument("trap: mode frequencies must be positive");
  for (double v : eta)
    if (!(v > 0.0)) throw std::invalid_argument("trap: Lamb-Dicke parameters must be positive");
  if (!(omega_x > 0.0) || !(omega_z > 0.0)) throw std::invalid_argument("trap: trap frequencies must be positive");
}

TrapSpec TrapSpec::paper_2022() {
  TrapSpec t;
  t.nu = {kTwoPi * 1270.0, kTwoPi * 1159.0, kTwoPi * 982.0, kTwoPi * 702.0};
  t.eta = {0.067, 0.067, 0.076, 0.094};
  t.omega_x = kTwoPi * 1270.0;
  t.omega_z = kTwoPi * 519.0;
  return t;
}

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::carrier: return "carrier";
    case GateKind::rsb: return "rsb";
    case GateKind::bsb: return "bsb";
    case GateKind::displacement: return "displacement";
    case GateKind::beam_splitter: return "beam_splitter";
  }
  return "?";
}

double Envelope::value(double t) const {
  if (t < 0.0 || t > tau) return 0.0;
  if (kind == EnvelopeKind::half_sine) return g0 * std::sin(kPi * t / tau);
  if (t_r <= 0.0) return g0;
  if (t < t_r) {
    const double s = std::sin(kPi * t / (2.0 * t_r));
    return g0 * s * s;
  }
  if (t <= tau - t_r) return g0;
  const double s = std::sin(kPi * (tau - t) / (2.0 * t_r));
  return g0 * s * s;
}

double Envelope::area(double t) const {
  t = std::clamp(t, 0.0, tau);
  if (kind == EnvelopeKind::half_sine) return g0 * tau / kPi * (1.0 - std::cos(kPi * t / tau));
  if (t_r <= 0.0) return g0 * t;
  const double total = tau - t_r;
  if (t < t_r) return g0 * ramp_area(t, t_r);
  if (t <= tau - t_r) return g0 * (t_r / 2.0 + (t - t_r));
  return g0 * (total - ramp_area(tau - t, t_r));
}

double Envelope::square_area(double t) const {
  t = std::clamp(t, 0.0, tau);
  const double g2 = g0 * g0;
  if (kind == EnvelopeKind::half_sine) return g2 * (t / 2.0 - tau / (4.0 * kPi) * std::sin(2.0 * kPi * t / tau));
  if (t_r <= 0.0) return g2 * t;
  const double ramp = ramp_square_area(t_r, t_r);
  if (t < t_r) return g2 * ramp_square_area(t, t_r);
  if (t <= tau - t_r) return g2 * (ramp + (t - t_r));
  const double total = 2.0 * ramp + (tau - 2.0 * t_r);
  return g2 * (total - ramp_square_area(tau - t, t_r));
}

double pulse_envelope(double t, const PulseShape& shape) {
  return Envelope{EnvelopeKind::soft_square, shape.g0, shape.tau, shape.t_r}.value(t);
}

double angle_factor(GateKind kind, const TrapSpec& trap, int j, int k) {
  switch (kind) {
    case GateKind::carrier: return 2.0;
    case GateKind::rsb:
    case GateKind::bsb: check_mode(trap, j); return 2.0 * trap.eta[static_cast<std::size_t>(j - 1)];
    case GateKind::displacement: check_mode(trap, j); return trap.eta[static_cast<std::size_t>(j - 1)] / 2.0;
    case GateKind::beam_splitter:
      check_mode(trap, j);
      check_mode(trap, k);
      return trap.eta[static_cast<std::size_t>(j - 1)] * trap.eta[static_cast<std::size_t>(k - 1)];
  }
  return 0.0;
}

double duration_for_angle(GateKind kind, double theta, const TrapSpec& trap, int j, int k, double g0, double ratio) {
  if (!(theta > 0.0)) throw std::invalid_argument("duration_for_angle: theta must be positive");
  if (!(g0 > 0.0)) throw std::invalid_argument("duration_for_angle: g0 must be positive");
  if (ratio < 0.0 || ratio > 0.5) throw std::invalid_argument("duration_for_angle: ramp ratio must lie in [0, 1/2]");
  return theta / (angle_factor(kind, trap, j, k) * g0 * (1.0 - ratio));
}

double LaserConfig::detuning(int l, double t) const {
  const LaserBeam& b = lasers[static_cast<std::size_t>(l)];
  const double g = envelope.value(t);
  return b.offset + b.sweep * std::cos(kPi * t / envelope.tau) + b.shift_per_g2 * g * g;
}

double LaserConfig::phase(int l, double t) const {
  const LaserBeam& b = lasers[static_cast<std::size_t>(l)];
  double p = b.offset * t;
  if (b.sweep != 0.0) p += b.sweep * envelope.tau / kPi * std::sin(kPi * t / envelope.tau);
  if (b.shift_per_g2 != 0.0) p += b.shift_per_g2 * envelope.square_area(t);
  return p;
}

double LaserConfig::light_shift_phase() const {
  return lasers[0].shift_per_g2 * envelope.square_area(envelope.tau);
}

LaserConfig gate_config(GateKind kind, const TrapSpec& trap, double theta, double phi, int j, int k,
                        const PulseOptions& opts) {
  trap.validate();
  if (kind == GateKind::beam_splitter && j == k) throw std::invalid_argument("gate_config: beam splitter needs j != k");
  LaserConfig c;
  c.kind = kind;
  c.mode_j = j;
  c.mode_k = k;
  c.label = to_string(kind);
  const double tau = duration_for_angle(kind, theta, trap, j, k, opts.g0, opts.ramp_ratio);
  c.envelope = Envelope{EnvelopeKind::soft_square, opts.g0, tau, opts.ramp_ratio * tau};
  auto& l1 = c.lasers[0];
  auto& l2 = c.lasers[1];
  switch (kind) {
    case GateKind::carrier:
      l1.phi = l2.phi = -phi;
      break;
    case GateKind::rsb:
    case GateKind::bsb: {
      const double nu = trap.nu[static_cast<std::size_t>(j - 1)];
      const double d = kind == GateKind::rsb ? -nu : nu;
      l1.offset = l2.offset = d;
      l1.phi = l2.phi = -phi - kPi / 2.0;
      if (opts.light_shift_compensation) l1.shift_per_g2 = l2.shift_per_g2 = -2.0 / d;
      break;
    }
    case GateKind::displacement: {
      const double nu = trap.nu[static_cast<std::size_t>(j - 1)];
      l1.offset = nu;
      l2.offset = -nu;
      l1.phi = -phi;
      l2.phi = -phi - kPi;
      break;
    }
    case GateKind::beam_splitter: {
      const double d = trap.nu[static_cast<std::size_t>(j - 1)] - trap.nu[static_cast<std::size_t>(k - 1)];
      l1.offset = d;
      l2.offset = -d;
      l1.phi = kPi - phi;
      l2.phi = phi - kPi;
      break;
    }
  }
  return c;
}

double adiabatic_sweep_amplitude(int mode, int n_max, const TrapSpec& trap, double g0) {
  check_mode(trap, mode);
  if (n_max < 1) throw std::invalid_argument("adiabatic schedule: n_max must be >= 1");
  return 0.5 * std::sqrt(double(n_max) + 1.0) * trap.eta[static_cast<std::size_t>(mode - 1)] * g0;
}

LaserConfig adiabatic_schedule(int mode, int n_max, double tau, const TrapSpec& trap, Sideband sideband, double phi,
                               const PulseOptions& opts) {
  trap.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("adiabatic schedule: tau must be positive");
  LaserConfig c;
  c.kind = sideband == Sideband::red ? GateKind::rsb : GateKind::bsb;
  c.mode_j = mode;
  c.label = sideband == Sideband::red ? "adiabatic_rsb" : "adiabatic_bsb";
  c.envelope = Envelope{EnvelopeKind::half_sine, opts.g0, tau, 0.0};
  const double nu = trap.nu[static_cast<std::size_t>(mode - 1)];
  const double d = sideband == Sideband::red ? -nu : nu;
  for (auto& l : c.lasers) {
    l.offset = d;
    l.sweep = adiabatic_sweep_amplitude(mode, n_max, trap, opts.g0);
    l.phi = -phi - kPi / 2.0;
    if (opts.light_shift_compensation) l.shift_per_g2 = -2.0 / d;
  }
  return c;
}

// Coefficient table layout: [carrier | blue j | red j | cross+ (j<k) | cross- (j<k) | so+ j | so- j].
InteractionHamiltonian::InteractionHamiltonian(const ModeSpace& space, const TrapSpec& trap, TermSelection terms)
    : space_(space), trap_(trap), terms_(terms) {
  trap_.validate();
  if (!space_.has_spin()) throw std::invalid_argument("interaction Hamiltonian needs a spin");
  if (space_.num_modes() != trap_.num_modes()) throw std::invalid_argument("space and trap disagree on the mode count");
  const int m = trap_.num_modes();
  const SpMat sp = spin_op(space_, SpinOp::plus).sparse();
  const SpMat sm = spin_op(space_, SpinOp::minus).sparse();
  std::vector<SpMat> a(static_cast<std::size_t>(m)), ad(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) {
    a[static_cast<std::size_t>(j - 1)] = ladder_lower(space_, j).sparse();
    ad[static_cast<std::size_t>(j - 1)] = ladder_raise(space_, j).sparse();
  }

  std::vector<std::pair<int, SpMat>> ops;  // coefficient index, operator (the h.c. is implied)
  int idx = 0;
  if (terms_.carrier) ops.emplace_back(idx, sp);
  ++idx;
  for (int j = 0; j < m; ++j, ++idx)
    if (terms_.blue) ops.emplace_back(idx, product(sp, ad[static_cast<std::size_t>(j)]));
  for (int j = 0; j < m; ++j, ++idx)
    if (terms_.red) ops.emplace_back(idx, product(sp, a[static_cast<std::size_t>(j)]));
  for (int pass = 0; pass < 2; ++pass)
    for (int j = 0; j < m; ++j)
      for (int k = j + 1; k < m; ++k, ++idx)
        if (terms_.cross)
          ops.emplace_back(idx, product(pass == 0 ? sp : sm, product(a[static_cast<std::size_t>(j)], ad[static_cast<std::size_t>(k)])));
  for (int pass = 0; pass < 2; ++pass)
    for (int j = 0; j < m; ++j, ++idx)
      if (terms_.second_order)
        ops.emplace_back(idx, product(pass == 0 ? sp : sm, product(ad[static_cast<std::size_t>(j)], ad[static_cast<std::size_t>(j)])));
  num_coeffs_ = idx;

  struct Raw {
    Eigen::Index r, c;
    int coeff;
    cplx base;
    bool conj;
  };
  std::vector<Raw> raw;
  for (const auto& [ci, op] : ops) {
    for (Eigen::Index r = 0; r < op.outerSize(); ++r)
      for (SpMat::InnerIterator it(op, r); it; ++it) {
        raw.push_back({it.row(), it.col(), ci, it.value(), false});
        raw.push_back({it.col(), it.row(), ci, std::conj(it.value()), true});
      }
  }
  std::vector<std::pair<Eigen::Index, double>> diag_raw;
  if (terms_.stark) {
    for (std::size_t i = 0; i < space_.dim(); ++i) {
      double s = 0.0;
      for (int j = 1; j <= m; ++j) s += trap_.eta[static_cast<std::size_t>(j - 1)] * trap_.eta[static_cast<std::size_t>(j - 1)] * (space_.occupation(i, j) + 0.5);
      diag_raw.emplace_back(static_cast<Eigen::Index>(i), s);
    }
  }

  const auto d = static_cast<Eigen::Index>(space_.dim());
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(raw.size() + diag_raw.size());
  for (const auto& x : raw) trips.emplace_back(x.r, x.c, cplx(1.0, 0.0));
  for (const auto& [i, s] : diag_raw) trips.emplace_back(i, i, cplx(1.0, 0.0));
  pattern_.resize(d, d);
  pattern_.setFromTriplets(trips.begin(), trips.end());
  pattern_.makeCompressed();

  auto slot_of = [&](Eigen::Index r, Eigen::Index c) {
    const auto* outer = pattern_.outerIndexPtr();
    const auto* inner = pattern_.innerIndexPtr();
    const auto* lo = inner + outer[r];
    const auto* hi = inner + outer[r + 1];
    const auto* p = std::lower_bound(lo, hi, static_cast<typename SpMat::StorageIndex>(c));
    return static_cast<Eigen::Index>(p - inner);
  };
  contributions_.reserve(raw.size());
  for (const auto& x : raw) contributions_.push_back({slot_of(x.r, x.c), x.coeff, x.base, x.conj});
  for (const auto& [i, s] : diag_raw) diagonal_.emplace_back(slot_of(i, i), s);
}

void InteractionHamiltonian::coefficients(const LaserConfig& cfg, double t, std::vector<cplx>& c, double& diag) const {
  const int m = trap_.num_modes();
  c.assign(static_cast<std::size_t>(num_coeffs_), cplx(0.0, 0.0));
  diag = 0.0;
  const double g = cfg.envelope.value(t);
  if (g == 0.0) return;
  std::vector<cplx> ev(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) ev[static_cast<std::size_t>(j)] = std::polar(1.0, trap_.nu[static_cast<std::size_t>(j)] * t);
  const cplx ipi2 = kI;  // e^{i pi/2}
  for (int l = 0; l < 2; ++l) {
    const double phi = cfg.lasers[static_cast<std::size_t>(l)].phi;
    const double big_phi = cfg.phase(l, t);
    const cplx w = std::polar(1.0, phi - big_phi);   // e^{i(phi - Phi)}
    const cplx wb = std::polar(1.0, -phi + big_phi);  // e^{-i(phi - Phi)}, used by the sigma_- families
    std::size_t idx = 0;
    c[idx++] += 0.5 * g * w;
    diag -= g * std::cos(phi - big_phi);
    for (int j = 0; j < m; ++j)
      c[idx++] += 0.5 * g * trap_.eta[static_cast<std::size_t>(j)] * ipi2 * w * ev[static_cast<std::size_t>(j)];
    for (int j = 0; j < m; ++j)
      c[idx++] += 0.5 * g * trap_.eta[static_cast<std::size_t>(j)] * ipi2 * w * std::conj(ev[static_cast<std::size_t>(j)]);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < m; ++j)
        for (int k = j + 1; k < m; ++k) {
          const double pref = -0.5 * g * trap_.eta[static_cast<std::size_t>(j)] * trap_.eta[static_cast<std::size_t>(k)];
          const cplx rel = ev[static_cast<std::size_t>(k)] * std::conj(ev[static_cast<std::size_t>(j)]);  // e^{i(nu_k - nu_j)t}
          c[idx++] += pref * (pass == 0 ? w * rel : wb * rel);
        }
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < m; ++j) {
        const double e = trap_.eta[static_cast<std::size_t>(j)];
        const double pref = -0.25 * g * e * e;
        const cplx two = ev[static_cast<std::size_t>(j)] * ev[static_cast<std::size_t>(j)];
        c[idx++] += pref * (pass == 0 ? w * two : wb * two);
      }
  }
}

void InteractionHamiltonian::evaluate(const LaserConfig& cfg, double t, SpMat& out) const {
  if (out.nonZeros() != pattern_.nonZeros() || out.rows() != pattern_.rows()) out = pattern_;
  cplx* v = out.valuePtr();
  std::fill(v, v + out.nonZeros(), cplx(0.0, 0.0));
  std::vector<cplx> c;
  double diag = 0.0;
  coefficients(cfg, t, c, diag);
  for (const auto& x : contributions_) {
    const cplx k = c[static_cast<std::size_t>(x.coeff)];
    v[x.slot] += x.base * (x.conjugate ? std::conj(k) : k);
  }
  for (const auto& [slot, s] : diagonal_) v[slot] += diag * s;
}

LinearOperator InteractionHamiltonian::at(const LaserConfig& cfg, double t) const {
  SpMat h;
  evaluate(cfg, t, h);
  return LinearOperator(space_, std::move(h));
}

LinearOperator interaction_hamiltonian(const LaserConfig& config, const TrapSpec& trap, const ModeSpace& space,
                                       double t, TermSelection terms) {
  return InteractionHamiltonian(space, trap, terms).at(config, t);
}

}  // namespace sculpt
