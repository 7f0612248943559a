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

#include "sculpt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace sculpt {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

using Rhs = std::function<void(double, const Mat&, Mat&)>;

double error_norm(const Mat& err, const Mat& y0, const Mat& y1, double rtol, double atol) {
  const Eigen::ArrayXXd scale = atol + rtol * y0.array().abs().max(y1.array().abs());
  const double s = (err.array().abs() / scale).square().sum();
  return std::sqrt(s / static_cast<double>(err.size()));
}

Mat integrate(const Rhs& f, double t0, double t1, Mat y, const IntegratorSettings& st, IntegrationStats* stats) {
  st.validate();
  if (t1 < t0) throw std::invalid_argument("integrate: t1 < t0");
  IntegrationStats local;
  if (t1 == t0) {
    if (stats) *stats = local;
    return y;
  }
  const double span = t1 - t0;
  const double hmax = st.max_step > 0.0 ? std::min(st.max_step, span) : span;
  Mat k1(y.rows(), y.cols()), k2 = k1, k3 = k1, k4 = k1, k5 = k1, k6 = k1, k7 = k1, tmp = k1;

  if (st.method == IntegratorMethod::rk4) {
    const auto n = static_cast<std::size_t>(std::ceil(span / std::min(st.fixed_step, hmax) - 1e-9));
    const double h = span / static_cast<double>(n);
    double t = t0;
    for (std::size_t i = 0; i < n; ++i, t = t0 + static_cast<double>(i) * h) {
      f(t, y, k1);
      tmp = y + (h / 2) * k1;
      f(t + h / 2, tmp, k2);
      tmp = y + (h / 2) * k2;
      f(t + h / 2, tmp, k3);
      tmp = y + h * k3;
      f(t + h, tmp, k4);
      y += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    local.steps = n;
    if (stats) *stats = local;
    return y;
  }

  double t = t0;
  f(t, y, k1);
  double h;
  {
    const double d0 = y.norm(), d1 = k1.norm();
    h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-6;
    h = std::min({h, hmax, span});
  }
  Mat ynew(y.rows(), y.cols());
  while (t < t1) {
    if (t + h > t1) h = t1 - t;
    if (h < st.min_step) {
      std::ostringstream os;
      os << "step size underflow at t = " << t << " ms";
      throw IntegrationError(os.str(), t);
    }
    tmp = y + h * (a21 * k1);
    f(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, tmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, ynew, k7);
    tmp = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = error_norm(tmp, y, ynew, st.rtol, st.atol);
    if (err <= 1.0) {
      t = (t + h >= t1) ? t1 : t + h;
      y.swap(ynew);
      k1.swap(k7);
      ++local.steps;
      const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h = std::min(hmax, h * std::clamp(fac, 0.2, 5.0));
    } else {
      ++local.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  if (stats) *stats = local;
  return y;
}

Eigen::VectorXd diagonal_of(const SpMat& m) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(m.rows());
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (SpMat::InnerIterator it(m, r); it; ++it) {
      if (it.row() != it.col()) {
        if (std::abs(it.value()) > 1e-12) throw std::logic_error("dissipator: expected a diagonal operator");
      } else {
        d[it.row()] = it.value().real();
      }
    }
  return d;
}

}  // namespace

NoiseSpec NoiseSpec::none(int num_modes) {
  NoiseSpec n;
  n.heating_rates.assign(static_cast<std::size_t>(num_modes), 0.0);
  n.dephasing_rates.assign(static_cast<std::size_t>(num_modes), 0.0);
  return n;
}

NoiseSpec NoiseSpec::paper_2022() {
  NoiseSpec n;
  n.heating_rates = {0.015, 0.000675, 0.000675, 0.000675};
  n.dephasing_rates = {0.075, 0.075, 0.075, 0.075};
  return n;
}

void NoiseSpec::validate(int num_modes) const {
  if (static_cast<int>(heating_rates.size()) != num_modes || static_cast<int>(dephasing_rates.size()) != num_modes)
    throw std::invalid_argument("noise: one heating and one dephasing rate per mode");
  for (double v : heating_rates)
    if (!(v >= 0.0)) throw std::invalid_argument("noise: heating rates must be nonnegative");
  for (double v : dephasing_rates)
    if (!(v >= 0.0)) throw std::invalid_argument("noise: dephasing rates must be nonnegative");
  if (!(nbar > 0.0)) throw std::invalid_argument("noise: nbar must be positive");
  if (!(scale_gamma >= 0.0) || !(scale_kappa >= 0.0)) throw std::invalid_argument("noise: scales must be nonnegative");
}

double NoiseSpec::gamma(int mode) const {
  return scale_gamma * heating_rates.at(static_cast<std::size_t>(mode - 1)) / nbar;
}
double NoiseSpec::kappa(int mode) const { return scale_kappa * dephasing_rates.at(static_cast<std::size_t>(mode - 1)); }

bool NoiseSpec::is_zero() const {
  for (std::size_t r = 0; r < heating_rates.size(); ++r)
    if (gamma(static_cast<int>(r) + 1) > 0.0) return false;
  for (std::size_t r = 0; r < dephasing_rates.size(); ++r)
    if (kappa(static_cast<int>(r) + 1) > 0.0) return false;
  return true;
}

void IntegratorSettings::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("integrator: rtol and atol must be positive");
  if (max_step < 0.0) throw std::invalid_argument("integrator: max_step must be nonnegative");
  if (method == IntegratorMethod::rk4 && !(fixed_step > 0.0))
    throw std::invalid_argument("integrator: rk4 needs a positive fixed step");
}

Mat propagate(const HamiltonianFn& h, double t0, double t1, const Mat& x0, const IntegratorSettings& settings,
              IntegrationStats* stats) {
  SpMat hm;
  Rhs f = [&](double t, const Mat& y, Mat& dy) {
    h(t, hm);
    dy.noalias() = hm * y;
    dy *= -kI;
  };
  return integrate(f, t0, t1, x0, settings, stats);
}

HamiltonianFn laser_drive(const InteractionHamiltonian& ham, const LaserConfig& config) {
  return [&ham, config](double t, SpMat& out) { ham.evaluate(config, t, out); };
}

UnitaryResult evolve_unitary(const InteractionHamiltonian& ham, const LaserConfig& config, const HybridState& psi0,
                             const IntegratorSettings& settings) {
  if (psi0.space != ham.space()) throw std::invalid_argument("evolve_unitary: state and Hamiltonian spaces differ");
  UnitaryResult r;
  const Mat out = propagate(laser_drive(ham, config), 0.0, config.duration(), psi0.amplitudes, settings, &r.stats);
  r.state = HybridState(psi0.space, out.col(0));
  r.norm_drift = std::abs(r.state.amplitudes.norm() - psi0.amplitudes.norm());
  return r;
}

UnitaryResult evolve_unitary(const LaserConfig& config, const TrapSpec& trap, const HybridState& psi0,
                             const IntegratorSettings& settings, TermSelection terms) {
  const InteractionHamiltonian ham(psi0.space, trap, terms);
  return evolve_unitary(ham, config, psi0, settings);
}

Dissipator::Dissipator(const ModeSpace& space, const NoiseSpec& noise) {
  noise.validate(space.num_modes());
  const auto d = static_cast<Eigen::Index>(space.dim());
  Eigen::VectorXd total = Eigen::VectorXd::Zero(d);
  for (int r = 1; r <= space.num_modes(); ++r) {
    const SpMat a = ladder_lower(space, r).sparse();
    const SpMat ad = ladder_raise(space, r).sparse();
    const SpMat n = number_op(space, r).sparse();
    const double g = noise.gamma(r), k = noise.kappa(r);
    auto add = [&](double c, const SpMat& left, const SpMat& right, const SpMat& anti) {
      if (c <= 0.0) return;
      Channel ch;
      ch.left = c * left;
      ch.right = right;
      ch.anti = 0.5 * c * diagonal_of(anti);
      total += 2.0 * ch.anti;
      channels_.push_back(std::move(ch));
    };
    add(g * (noise.nbar + 1.0), a, ad, SpMat(ad * a));
    add(g * noise.nbar, ad, a, SpMat(a * ad));
    if (noise.as_printed_dephasing) {
      add(k, n, SpMat(a * ad), SpMat(SpMat(a * ad) * SpMat(ad * a)));
    } else {
      add(k, n, n, SpMat(n * n));
    }
  }
  max_rate_ = total.size() ? total.cwiseAbs().maxCoeff() : 0.0;
}

void Dissipator::apply(const Mat& rho, Mat& out) const {
  out.setZero(rho.rows(), rho.cols());
  Mat tmp(rho.rows(), rho.cols());
  for (const auto& ch : channels_) {
    tmp.noalias() = ch.left * rho;
    out.noalias() += tmp * ch.right;
    out -= ch.anti.asDiagonal() * rho;
    out -= rho * ch.anti.asDiagonal();
  }
}

void Dissipator::step(Mat& rho, double dt) const {
  if (channels_.empty() || dt <= 0.0) return;
  const int n = std::max(1, static_cast<int>(std::ceil(max_rate_ * dt / 0.01)));
  const double h = dt / n;
  Mat k1, k2, k3, k4;
  for (int i = 0; i < n; ++i) {
    apply(rho, k1);
    apply(rho + (h / 2) * k1, k2);
    apply(rho + (h / 2) * k2, k3);
    apply(rho + h * k3, k4);
    rho += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

double check_positivity(const DensityOperator& rho, double tol) {
  const Mat herm = 0.5 * (rho.matrix + rho.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < -tol) {
    std::ostringstream os;
    os << "density operator lost positivity: min eigenvalue " << lo << " below -" << tol;
    throw PositivityError(os.str(), lo);
  }
  return lo;
}

LindbladResult evolve_lindblad(const InteractionHamiltonian& ham, const LaserConfig& config, const NoiseSpec& noise,
                               const DensityOperator& rho0, const IntegratorSettings& settings) {
  if (rho0.space != ham.space()) throw std::invalid_argument("evolve_lindblad: state and Hamiltonian spaces differ");
  const Dissipator diss(rho0.space, noise);
  SpMat hm;
  Mat a, b;
  Rhs f = [&](double t, const Mat& y, Mat& dy) {
    ham.evaluate(config, t, hm);
    a.noalias() = hm * y;
    b.noalias() = hm * y.adjoint();  // (y H)† = H y† for Hermitian H
    dy = -kI * (a - b.adjoint());
    if (!diss.empty()) {
      diss.apply(y, b);
      dy += b;
    }
  };
  LindbladResult r;
  Mat out = integrate(f, 0.0, config.duration(), rho0.matrix, settings, &r.stats);
  r.rho = DensityOperator(rho0.space, std::move(out));
  r.rho.symmetrize();
  r.trace_drift = std::abs(r.rho.trace() - rho0.trace());
  r.min_eigenvalue = check_positivity(r.rho);
  return r;
}

LindbladResult evolve_lindblad(const LaserConfig& config, const TrapSpec& trap, const NoiseSpec& noise,
                               const DensityOperator& rho0, const IntegratorSettings& settings, TermSelection terms) {
  const InteractionHamiltonian ham(rho0.space, trap, terms);
  return evolve_lindblad(ham, config, noise, rho0, settings);
}

void evolve_lindblad_split(const HamiltonianFn& h, double t0, double t1, const std::vector<const Dissipator*>& diss,
                           std::vector<Mat>& rhos, const IntegratorSettings& settings, double macro_step,
                           IntegrationStats* stats) {
  if (diss.size() != rhos.size()) throw std::invalid_argument("evolve_lindblad_split: one dissipator per state");
  if (!(macro_step > 0.0)) throw std::invalid_argument("evolve_lindblad_split: macro step must be positive");
  if (rhos.empty() || t1 <= t0) return;
  const Eigen::Index d = rhos.front().rows();
  const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / macro_step - 1e-9)));
  const double dt = (t1 - t0) / n;
  const Mat id = Mat::Identity(d, d);
  IntegrationStats total;
  for (int i = 0; i < n; ++i) {
    const double ta = t0 + i * dt;
    const double tb = (i + 1 == n) ? t1 : ta + dt;
    IntegrationStats s;
    const Mat u = propagate(h, ta, tb, id, settings, &s);
    total.steps += s.steps;
    total.rejected += s.rejected;
    for (std::size_t m = 0; m < rhos.size(); ++m) {
      Mat& rho = rhos[m];
      if (diss[m]) diss[m]->step(rho, (tb - ta) / 2);
      rho = u * rho * u.adjoint();
      if (diss[m]) diss[m]->step(rho, (tb - ta) / 2);
    }
  }
  for (auto& rho : rhos) rho = 0.5 * (rho + rho.adjoint()).eval();
  if (stats) *stats = total;
}

double fidelity(const HybridState& a, const HybridState& b) {
  if (a.space != b.space) throw std::invalid_argument("fidelity: spaces differ");
  return std::norm(b.amplitudes.dot(a.amplitudes));
}

double fidelity(const DensityOperator& rho, const HybridState& b) {
  if (rho.space != b.space) throw std::invalid_argument("fidelity: spaces differ");
  return (b.amplitudes.adjoint() * rho.matrix * b.amplitudes)(0, 0).real();
}

void apply_virtual_z(HybridState& state, double zeta) {
  const ModeSpace& s = state.space;
  if (!s.has_spin()) throw std::invalid_argument("apply_virtual_z: space has no spin");
  const auto md = static_cast<Eigen::Index>(s.motional_dim());
  state.amplitudes.head(md) *= std::polar(1.0, -zeta / 2);
  state.amplitudes.tail(md) *= std::polar(1.0, zeta / 2);
}

void apply_virtual_z(Mat& rho, const ModeSpace& space, double zeta) {
  if (!space.has_spin()) throw std::invalid_argument("apply_virtual_z: space has no spin");
  const auto md = static_cast<Eigen::Index>(space.motional_dim());
  const cplx w = std::polar(1.0, zeta);  // e-g coherence phase
  rho.block(md, 0, md, md) *= w;
  rho.block(0, md, md, md) *= std::conj(w);
}

}  // namespace sculpt
