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

#include "sculpt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "sculpt/ideal_gates.hpp"
#include "sculpt/sculpting.hpp"

namespace sculpt {

namespace {

constexpr double kPi = std::numbers::pi;

// One realistic primitive: a laser pulse followed by its virtual-Z frame
// correction, or a projective selection of the ground spin branch.
struct Op {
  enum class Kind { pulse, select_g } kind = Kind::pulse;
  LaserConfig config;
};

struct ProtocolGate {
  std::string name;
  std::vector<Op> ops;
  std::function<Branch(const HybridState&)> ideal;
};

Op pulse(LaserConfig c) { return Op{Op::Kind::pulse, std::move(c)}; }
Op select_g() { return Op{Op::Kind::select_g, {}}; }

// Laser settings realizing the ideal gate with angle theta and phase phi. The
// carrier and the beam splitter on |−⟩ come out with the opposite phase.
LaserConfig realize(GateKind kind, double theta, double phi, int j, int k, const SimulationSettings& s) {
  if (theta < 0.0) {
    theta = -theta;
    phi += kPi;
  }
  const bool flip = kind == GateKind::carrier || kind == GateKind::beam_splitter;
  return gate_config(kind, s.trap, theta, flip ? -phi : phi, j, k, s.pulse);
}

int max_occupation(const HybridState& psi, int mode, double tol = 1e-10) {
  int best = 0;
  for (std::size_t i = 0; i < psi.space.dim(); ++i)
    if (std::abs(psi.amplitudes[static_cast<Eigen::Index>(i)]) > tol) best = std::max(best, psi.space.occupation(i, mode));
  return best;
}

std::vector<Op> subtraction_ops(int mode, int n_max, double tau, Sideband sideband, const SimulationSettings& s) {
  const LaserConfig sweep = adiabatic_schedule(mode, std::max(1, n_max), tau, s.trap, sideband, 0.0, s.pulse);
  const LaserConfig flip = realize(GateKind::carrier, kPi, kPi / 2.0, 0, 0, s);
  if (sideband == Sideband::red) return {pulse(sweep), pulse(flip), select_g()};
  return {pulse(flip), pulse(sweep), select_g()};
}

ProtocolGate subtraction_gate(int mode, int n_max, double tau, Sideband sideband, const SimulationSettings& s) {
  return {"S" + std::to_string(mode), subtraction_ops(mode, n_max, tau, sideband, s),
          [mode](const HybridState& psi) { return arithmetic_subtract(psi, mode); }};
}

ProtocolGate beam_splitter_gate(const std::string& name, int j, int k, double theta, double phi,
                                const SimulationSettings& s) {
  std::vector<Op> ops{pulse(realize(GateKind::carrier, kPi / 2.0, -kPi / 2.0, 0, 0, s)),
                      pulse(realize(GateKind::beam_splitter, theta, phi, j, k, s)),
                      pulse(realize(GateKind::carrier, kPi / 2.0, kPi / 2.0, 0, 0, s))};
  return {name, std::move(ops), [j, k, theta, phi](const HybridState& psi) {
            return Branch{apply(beam_splitter(psi.space, j, k, theta, phi), psi), 1.0};
          }};
}

ProtocolGate correction_gate(const SimulationSettings& s) {
  const double theta = 2.0 * kPi / 3.0, phi = kPi / 2.0;
  return {"RSB2", {pulse(realize(GateKind::rsb, theta, phi, 2, 0, s)), select_g()}, [=](const HybridState& psi) {
            return post_select_spin(apply(rsb(psi.space, 2, theta, phi), psi), Spin::g);
          }};
}

std::vector<ProtocolGate> prefix_gates(Scenario scenario, const SimulationSettings& s) {
  if (scenario == Scenario::with_ia) return {beam_splitter_gate("B~24", 2, 4, with_ia_bs_theta(), -kPi / 2.0, s)};
  std::vector<ProtocolGate> g;
  for (auto [j, k] : {std::pair{1, 2}, {3, 4}, {1, 3}, {2, 4}})
    g.push_back(beam_splitter_gate("B" + std::to_string(j) + std::to_string(k), j, k, kPi / 2.0, -kPi / 2.0, s));
  return g;
}

ModeSpace protocol_space(const SimulationSettings& s) {
  if (s.trap.num_modes() != 4) throw std::invalid_argument("the protocol needs a four-mode trap");
  return ModeSpace(4, s.cutoff, true, s.total_cap);
}

HybridState prepared_state(const ModeSpace& sp, Scenario scenario) {
  return scenario == Scenario::with_ia ? local_sym4_in_collective(sp, four_ion_basis_map()) : prepare_sym(sp);
}

double duration_of(const std::vector<Op>& ops) {
  double t = 0.0;
  for (const auto& op : ops)
    if (op.kind == Op::Kind::pulse) t += op.config.duration();
  return t;
}

// Pure-state engine: propagates all columns of X together.
void run_ops(const InteractionHamiltonian& ham, const std::vector<Op>& ops, Mat& x, std::vector<double>& prob,
             const SimulationSettings& s) {
  const ModeSpace& sp = ham.space();
  const auto md = static_cast<Eigen::Index>(sp.motional_dim());
  prob.assign(static_cast<std::size_t>(x.cols()), 1.0);
  for (const auto& op : ops) {
    if (op.kind == Op::Kind::pulse) {
      x = propagate(laser_drive(ham, op.config), 0.0, op.config.duration(), x, s.integrator);
      const double zeta = op.config.light_shift_phase();
      if (zeta != 0.0) {
        x.topRows(md) *= std::polar(1.0, -zeta / 2.0);
        x.bottomRows(md) *= std::polar(1.0, zeta / 2.0);
      }
    } else {
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double before = x.col(c).squaredNorm();
        x.col(c).tail(md).setZero();
        const double after = x.col(c).squaredNorm();
        if (!(after > 0.0)) throw std::domain_error("post-selection branch has zero probability");
        prob[static_cast<std::size_t>(c)] *= after / before;
        x.col(c) /= std::sqrt(after);
      }
    }
  }
}

// Mixed-state engine over a batch with per-member reservoirs.
void run_ops(const InteractionHamiltonian& ham, const std::vector<Op>& ops, std::vector<Mat>& rhos,
             const std::vector<const Dissipator*>& diss, std::vector<double>& prob, const SimulationSettings& s) {
  const ModeSpace& sp = ham.space();
  const auto md = static_cast<Eigen::Index>(sp.motional_dim());
  prob.assign(rhos.size(), 1.0);
  for (const auto& op : ops) {
    if (op.kind == Op::Kind::pulse) {
      evolve_lindblad_split(laser_drive(ham, op.config), 0.0, op.config.duration(), diss, rhos, s.integrator,
                            s.macro_step);
      const double zeta = op.config.light_shift_phase();
      if (zeta != 0.0)
        for (auto& r : rhos) apply_virtual_z(r, sp, zeta);
    } else {
      for (std::size_t m = 0; m < rhos.size(); ++m) {
        Mat& r = rhos[m];
        const double before = r.trace().real();
        r.bottomRows(md).setZero();
        r.rightCols(md).setZero();
        const double after = r.trace().real();
        if (!(after > 0.0)) throw std::domain_error("post-selection branch has zero probability");
        prob[m] *= after / before;
        r /= after;
      }
    }
  }
}

double pure_fidelity(const Vec& x, const HybridState& ref) {
  return std::norm(ref.amplitudes.dot(x)) / x.squaredNorm();
}
double mixed_fidelity(const Mat& rho, const HybridState& ref) {
  return (ref.amplitudes.adjoint() * rho * ref.amplitudes)(0, 0).real() / rho.trace().real();
}

// Ideal reference chain: element g is the normalized input of gate g.
struct IdealChain {
  std::vector<HybridState> states;
  std::vector<double> probs;
};

IdealChain ideal_chain(const HybridState& start, const std::vector<ProtocolGate>& gates) {
  IdealChain c;
  c.states.push_back(start);
  for (const auto& g : gates) {
    Branch b = g.ideal(c.states.back());
    if (!(b.probability > 0.0)) throw std::domain_error(g.name + ": ideal branch has zero probability");
    c.probs.push_back(b.probability);
    c.states.push_back(normalize(b.state).state);
  }
  return c;
}

std::string settings_key(Scenario sc, Sideband sb, const SimulationSettings& s) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(sc) << '|' << to_string(sb) << '|' << s.cutoff << '|' << s.total_cap << '|' << s.integrator.rtol
     << '|' << s.integrator.atol << '|' << s.pulse.g0 << '|' << s.pulse.ramp_ratio << '|'
     << s.pulse.light_shift_compensation << '|' << s.tau_scan.lo << '|' << s.tau_scan.hi << '|' << s.tau_scan.step
     << '|' << s.tau_scan.resolution << '|' << s.terms.carrier << s.terms.stark << s.terms.blue << s.terms.red
     << s.terms.cross << s.terms.second_order;
  for (double v : s.trap.nu) os << '|' << v;
  for (double v : s.trap.eta) os << '|' << v;
  return os.str();
}

std::mutex g_tau_mutex;
std::map<std::string, std::pair<double, double>> g_tau_cache;

// Coarse scan then golden-section refinement of a maximum.
double maximize(const std::function<double(double)>& f, const TauScan& scan) {
  std::map<double, double> memo;
  auto eval = [&](double t) {
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    const double v = f(t);
    memo.emplace(t, v);
    return v;
  };
  double best_t = scan.lo, best_v = -1.0;
  const int n = std::max(1, static_cast<int>(std::floor((scan.hi - scan.lo) / scan.step + 1e-9)));
  for (int i = 0; i <= n; ++i) {
    const double t = scan.lo + i * (scan.hi - scan.lo) / n;
    const double v = eval(t);
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }
  const double h = (scan.hi - scan.lo) / n;
  double a = std::max(scan.lo, best_t - h), b = std::min(scan.hi, best_t + h);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > scan.resolution) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = eval(d);
    }
  }
  for (const auto& [t, v] : memo)
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  return best_t;
}

struct Prepared {
  ModeSpace space;
  std::vector<ProtocolGate> gates;
  IdealChain chain;
  double tau3 = 0.0, tau4 = 0.0;
};

Prepared prepare(Scenario scenario, Sideband sideband, const SimulationSettings& s, double tau3, double tau4) {
  Prepared p;
  p.space = protocol_space(s);
  p.tau3 = tau3;
  p.tau4 = tau4;
  p.gates = prefix_gates(scenario, s);
  // Sweep amplitudes follow the largest occupation the ideal input carries.
  IdealChain head = ideal_chain(prepared_state(p.space, scenario), p.gates);
  const int n3 = max_occupation(head.states.back(), 3);
  p.gates.push_back(subtraction_gate(3, n3, tau3 > 0.0 ? tau3 : 1.0, sideband, s));
  head = ideal_chain(prepared_state(p.space, scenario), p.gates);
  const int n4 = max_occupation(head.states.back(), 4);
  p.gates.push_back(subtraction_gate(4, n4, tau4 > 0.0 ? tau4 : 1.0, sideband, s));
  p.gates.push_back(correction_gate(s));
  p.chain = ideal_chain(prepared_state(p.space, scenario), p.gates);
  return p;
}

void finish_ledger(ProtocolLedger& led, const Prepared& p, const std::vector<double>& probs) {
  const HybridState target = ghz_target(p.space, 2, GhzConvention::main);
  double t = 0.0, success = 1.0;
  for (std::size_t g = 0; g < p.gates.size(); ++g) {
    GateRecord& r = led.rows[g];
    t += r.duration;
    r.accumulated_time = t;
    r.probability = probs[g];
    success *= probs[g];
    if (p.gates[g].name == "S4") led.uncorrected_success = success;
  }
  led.success_probability = success;
  led.fidelity = fidelity(led.final_state, target);
}

}  // namespace

const char* to_string(Scenario s) { return s == Scenario::with_ia ? "with_ia" : "without_ia"; }
const char* to_string(GateModel m) { return m == GateModel::ideal ? "ideal" : "realistic"; }
const char* to_string(Sideband s) { return s == Sideband::red ? "red" : "blue"; }
const char* to_string(Coupling c) {
  switch (c) {
    case Coupling::both: return "both";
    case Coupling::gamma_only: return "gamma_only";
    case Coupling::kappa_only: return "kappa_only";
  }
  return "?";
}

std::size_t SweepGrid::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("sweep grid has no column " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

std::pair<double, double> optimal_subtraction_times(Scenario scenario, Sideband sideband,
                                                    const SimulationSettings& settings) {
  const std::string key = settings_key(scenario, sideband, settings);
  {
    std::lock_guard<std::mutex> lock(g_tau_mutex);
    auto it = g_tau_cache.find(key);
    if (it != g_tau_cache.end()) return it->second;
  }
  Prepared p = prepare(scenario, sideband, settings, 1.0, 1.0);
  const InteractionHamiltonian ham(p.space, settings.trap, settings.terms);
  const std::size_t i3 = p.gates.size() - 3, i4 = i3 + 1;
  std::vector<double> prob;

  Mat x = p.chain.states.front().amplitudes;
  for (std::size_t g = 0; g < i3; ++g) run_ops(ham, p.gates[g].ops, x, prob, settings);
  const Mat before3 = x;

  const int n3 = max_occupation(p.chain.states[i3], 3);
  const int n4 = max_occupation(p.chain.states[i4], 4);
  auto after3 = [&](double tau) {
    Mat y = before3;
    run_ops(ham, subtraction_ops(3, n3, tau, sideband, settings), y, prob, settings);
    return y;
  };
  const double tau3 = settings.tau3 ? *settings.tau3 : maximize([&](double tau) {
    return pure_fidelity(after3(tau).col(0), p.chain.states[i3 + 1]);
  }, settings.tau_scan);
  const Mat before4 = after3(tau3);
  const double tau4 = settings.tau4 ? *settings.tau4 : maximize([&](double tau) {
    Mat y = before4;
    run_ops(ham, subtraction_ops(4, n4, tau, sideband, settings), y, prob, settings);
    return pure_fidelity(y.col(0), p.chain.states[i4 + 1]);
  }, settings.tau_scan);

  std::lock_guard<std::mutex> lock(g_tau_mutex);
  g_tau_cache[key] = {tau3, tau4};
  return {tau3, tau4};
}

ProtocolLedger run_protocol(Scenario scenario, GateModel model, const NoiseSpec& noise, Sideband sideband,
                            const SimulationSettings& settings) {
  ProtocolLedger led;
  led.scenario = scenario;
  led.model = model;
  led.sideband = sideband;

  if (model == GateModel::ideal) {
    const double t3 = settings.tau3.value_or(0.0), t4 = settings.tau4.value_or(0.0);
    const Prepared p = prepare(scenario, sideband, settings, t3, t4);
    led.tau3 = t3;
    led.tau4 = t4;
    for (std::size_t g = 0; g < p.gates.size(); ++g) {
      GateRecord r;
      r.name = p.gates[g].name;
      const bool sub = r.name == "S3" || r.name == "S4";
      r.duration = (sub && (r.name == "S3" ? t3 : t4) <= 0.0) ? 0.0 : duration_of(p.gates[g].ops);
      led.rows.push_back(r);
    }
    led.final_state = DensityOperator::pure(p.chain.states.back());
    finish_ledger(led, p, p.chain.probs);
    led.uncorrected_fidelity = fidelity(p.chain.states[p.gates.size() - 1], ghz_target(p.space, 2, GhzConvention::main));
    return led;
  }

  if (!noise.is_zero()) return run_protocol_batch(scenario, {noise}, sideband, settings).front();

  const auto [t3, t4] = optimal_subtraction_times(scenario, sideband, settings);
  const Prepared p = prepare(scenario, sideband, settings, t3, t4);
  led.tau3 = t3;
  led.tau4 = t4;
  const InteractionHamiltonian ham(p.space, settings.trap, settings.terms);
  const HybridState target = ghz_target(p.space, 2, GhzConvention::main);
  Vec acc = p.chain.states.front().amplitudes;
  std::vector<double> probs, prob;
  for (std::size_t g = 0; g < p.gates.size(); ++g) {
    Mat x(acc.size(), 2);
    x.col(0) = acc;
    x.col(1) = p.chain.states[g].amplitudes;
    run_ops(ham, p.gates[g].ops, x, prob, settings);
    acc = x.col(0);
    GateRecord r;
    r.name = p.gates[g].name;
    r.duration = duration_of(p.gates[g].ops);
    r.accumulated_fidelity = pure_fidelity(acc, p.chain.states[g + 1]);
    r.isolated_fidelity = pure_fidelity(x.col(1), p.chain.states[g + 1]);
    led.rows.push_back(r);
    probs.push_back(prob[0]);
    if (r.name == "S4") led.uncorrected_fidelity = pure_fidelity(acc, target);
  }
  led.final_state = DensityOperator::pure(HybridState(p.space, acc / acc.norm()));
  finish_ledger(led, p, probs);
  return led;
}

namespace {

std::vector<ProtocolLedger> run_batch_chunk(const Prepared& p, const std::vector<NoiseSpec>& noises, bool isolated,
                                            const SimulationSettings& s, Sideband sideband, Scenario scenario) {
  const InteractionHamiltonian ham(p.space, s.trap, s.terms);
  const HybridState target = ghz_target(p.space, 2, GhzConvention::main);
  const std::size_t n = noises.size();
  std::vector<std::unique_ptr<Dissipator>> owned;
  std::vector<const Dissipator*> diss;
  for (const auto& nz : noises) {
    if (nz.is_zero()) {
      diss.push_back(nullptr);
    } else {
      owned.push_back(std::make_unique<Dissipator>(p.space, nz));
      diss.push_back(owned.back().get());
    }
  }
  std::vector<ProtocolLedger> out(n);
  for (auto& l : out) {
    l.scenario = scenario;
    l.model = GateModel::realistic;
    l.sideband = sideband;
    l.tau3 = p.tau3;
    l.tau4 = p.tau4;
  }
  std::vector<Mat> acc(n, DensityOperator::pure(p.chain.states.front()).matrix);
  std::vector<std::vector<double>> probs(n);
  for (std::size_t g = 0; g < p.gates.size(); ++g) {
    std::vector<Mat> batch = acc;
    std::vector<const Dissipator*> bd = diss;
    if (isolated) {
      const Mat in = DensityOperator::pure(p.chain.states[g]).matrix;
      for (std::size_t m = 0; m < n; ++m) {
        batch.push_back(in);
        bd.push_back(diss[m]);
      }
    }
    std::vector<double> prob;
    run_ops(ham, p.gates[g].ops, batch, bd, prob, s);
    for (std::size_t m = 0; m < n; ++m) {
      acc[m] = batch[m];
      GateRecord r;
      r.name = p.gates[g].name;
      r.duration = duration_of(p.gates[g].ops);
      r.accumulated_fidelity = mixed_fidelity(acc[m], p.chain.states[g + 1]);
      r.isolated_fidelity = isolated ? mixed_fidelity(batch[n + m], p.chain.states[g + 1]) : std::nan("");
      out[m].rows.push_back(r);
      probs[m].push_back(prob[m]);
      if (r.name == "S4") out[m].uncorrected_fidelity = mixed_fidelity(acc[m], target);
    }
  }
  for (std::size_t m = 0; m < n; ++m) {
    out[m].final_state = DensityOperator(p.space, acc[m]);
    finish_ledger(out[m], p, probs[m]);
    try {
      check_positivity(out[m].final_state);
    } catch (const PositivityError& e) {
      out[m].failed = true;
      out[m].error = e.what();
    }
  }
  return out;
}

}  // namespace

std::vector<ProtocolLedger> run_protocol_batch(Scenario scenario, const std::vector<NoiseSpec>& noises,
                                               Sideband sideband, const SimulationSettings& settings, bool isolated) {
  if (noises.empty()) return {};
  for (const auto& nz : noises) nz.validate(settings.trap.num_modes());
  const auto [t3, t4] = optimal_subtraction_times(scenario, sideband, settings);
  const Prepared p = prepare(scenario, sideband, settings, t3, t4);
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, settings.workers)), 1,
                                                      noises.size());
  std::vector<std::vector<NoiseSpec>> chunks(workers);
  for (std::size_t i = 0; i < noises.size(); ++i) chunks[i % workers].push_back(noises[i]);
  std::vector<std::vector<ProtocolLedger>> results(workers);
  std::vector<std::string> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      results[w] = run_batch_chunk(p, chunks[w], isolated, settings, sideband, scenario);
    } catch (const std::exception& e) {
      errors[w] = e.what();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::vector<ProtocolLedger> out(noises.size());
  for (std::size_t i = 0; i < noises.size(); ++i) {
    const std::size_t w = i % workers, k = i / workers;
    if (!errors[w].empty()) {
      out[i].scenario = scenario;
      out[i].model = GateModel::realistic;
      out[i].sideband = sideband;
      out[i].failed = true;
      out[i].error = errors[w];
    } else {
      out[i] = std::move(results[w][k]);
    }
  }
  return out;
}

SweepGrid noise_map(Scenario scenario, const std::vector<double>& xi_gamma, const std::vector<double>& xi_kappa,
                    Coupling coupling, Sideband sideband, const NoiseSpec& reference,
                    const SimulationSettings& settings) {
  for (double v : xi_gamma)
    if (v < 0.0 || v > 2.0) throw std::invalid_argument("noise_map: xi_gamma outside [0, 2]");
  for (double v : xi_kappa)
    if (v < 0.0 || v > 2.0) throw std::invalid_argument("noise_map: xi_kappa outside [0, 2]");
  SweepGrid grid;
  grid.axis_names = {"xi_gamma", "xi_kappa"};
  grid.axis_values = {xi_gamma, xi_kappa};
  grid.columns = {"fidelity", "success", "rho11", "rho22", "rho12_re", "rho12_im"};
  std::vector<NoiseSpec> noises;
  for (double g : xi_gamma)
    for (double k : xi_kappa) {
      NoiseSpec nz = reference;
      nz.scale_gamma = coupling == Coupling::kappa_only ? 0.0 : g;
      nz.scale_kappa = coupling == Coupling::gamma_only ? 0.0 : k;
      noises.push_back(nz);
      grid.points.push_back(SweepPoint{{g, k}, {}, false, {}});
    }
  std::vector<ProtocolLedger> runs;
  try {
    runs = run_protocol_batch(scenario, noises, sideband, settings, false);
  } catch (const std::exception& e) {
    for (auto& pt : grid.points) {
      pt.failed = true;
      pt.error = e.what();
      pt.values.assign(grid.columns.size(), std::nan(""));
    }
    return grid;
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    SweepPoint& pt = grid.points[i];
    if (runs[i].failed && runs[i].final_state.matrix.size() == 0) {
      pt.failed = true;
      pt.error = runs[i].error;
      pt.values.assign(grid.columns.size(), std::nan(""));
      continue;
    }
    pt.failed = runs[i].failed;
    pt.error = runs[i].error;
    const RhoElements e = density_matrix_elements(runs[i].final_state);
    pt.values = {runs[i].fidelity, runs[i].success_probability, e.rho11, e.rho22, e.rho12.real(), e.rho12.imag()};
  }
  return grid;
}

RhoElements density_matrix_elements(const DensityOperator& rho) {
  const ModeSpace& sp = rho.space;
  if (sp.num_modes() != 4) throw std::invalid_argument("density_matrix_elements: needs a four-mode space");
  const DensityOperator m = sp.has_spin() ? partial_trace(rho, {1, 2, 3, 4}) : rho;
  const auto i = m.space.find(std::vector<int>{1, 1, 0, 0});
  const auto j = m.space.find(std::vector<int>{0, 0, 1, 1});
  if (!i || !j) throw std::invalid_argument("density_matrix_elements: space too small");
  const auto a = static_cast<Eigen::Index>(*i), b = static_cast<Eigen::Index>(*j);
  const double tr = m.trace().real();
  return {m.matrix(a, a).real() / tr, m.matrix(b, b).real() / tr, m.matrix(a, b) / tr};
}

// Gate characterizations.

namespace {

ModeSpace characterization_space(const SimulationSettings& s, int max_input) {
  return ModeSpace(s.trap.num_modes(), s.cutoff, true, std::min(s.total_cap < 0 ? 99 : s.total_cap, max_input + 2));
}

std::vector<int> occupations_with(int modes, std::initializer_list<std::pair<int, int>> set) {
  std::vector<int> occ(static_cast<std::size_t>(modes), 0);
  for (auto [m, n] : set) occ[static_cast<std::size_t>(m - 1)] = n;
  return occ;
}

// Runs `ops` on a pure input, with or without reservoirs; returns ρ (unnormalized
// after selections) and the branch probability.
Mat run_single(const InteractionHamiltonian& ham, const std::vector<Op>& ops, const HybridState& in,
               const NoiseSpec& noise, const SimulationSettings& s, double& prob) {
  std::vector<double> p;
  if (noise.is_zero()) {
    Mat x = in.amplitudes;
    run_ops(ham, ops, x, p, s);
    prob = p[0];
    return x * x.adjoint();
  }
  const Dissipator d(ham.space(), noise);
  std::vector<Mat> rhos{DensityOperator::pure(in).matrix};
  run_ops(ham, ops, rhos, {&d}, p, s);
  prob = p[0];
  return rhos[0];
}

double population(const Mat& rho, const ModeSpace& sp, const std::vector<int>& occ, std::optional<Spin> spin) {
  double p = 0.0;
  for (Spin sv : {Spin::g, Spin::e}) {
    if (spin && *spin != sv) continue;
    if (auto i = sp.find(occ, sv)) p += rho(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*i)).real();
  }
  return p;
}

}  // namespace

SweepGrid characterize_rsb(const std::vector<double>& thetas, const NoiseSpec& noise,
                           const SimulationSettings& settings, int mode) {
  const ModeSpace sp = characterization_space(settings, 1);
  const int m = sp.num_modes();
  const InteractionHamiltonian ham(sp, settings.trap, settings.terms);
  const HybridState in = basis_state(sp, occupations_with(m, {{mode, 1}}), Spin::g);
  SweepGrid grid;
  grid.axis_names = {"theta"};
  grid.axis_values = {thetas};
  grid.columns = {"duration", "infidelity", "pop_e0", "pop_g1"};
  for (double th : thetas) {
    SweepPoint pt{{th}, {}, false, {}};
    try {
      const HybridState ideal = apply(rsb(sp, mode, th, 0.0), in);
      Mat rho;
      double dur = 0.0, prob = 1.0;
      if (th == 0.0) {
        rho = DensityOperator::pure(in).matrix;
      } else {
        const std::vector<Op> ops{pulse(realize(GateKind::rsb, th, 0.0, mode, 0, settings))};
        dur = duration_of(ops);
        rho = run_single(ham, ops, in, noise, settings, prob);
      }
      pt.values = {dur, 1.0 - mixed_fidelity(rho, ideal), population(rho, sp, occupations_with(m, {}), Spin::e),
                   population(rho, sp, occupations_with(m, {{mode, 1}}), Spin::g)};
    } catch (const std::exception& e) {
      pt.failed = true;
      pt.error = e.what();
      pt.values.assign(grid.columns.size(), std::nan(""));
    }
    grid.points.push_back(std::move(pt));
  }
  return grid;
}

SweepGrid characterize_bs(const std::vector<ModePair>& pairs, const std::vector<double>& thetas,
                          const NoiseSpec& noise, const SimulationSettings& settings) {
  const ModeSpace sp = characterization_space(settings, 1);
  const int m = sp.num_modes();
  const InteractionHamiltonian ham(sp, settings.trap, settings.terms);
  const auto md = static_cast<Eigen::Index>(sp.motional_dim());
  SweepGrid grid;
  grid.axis_names = {"pair", "theta"};
  std::vector<double> pair_ids;
  for (const auto& pr : pairs) pair_ids.push_back(10.0 * pr.j + pr.k);
  grid.axis_values = {pair_ids, thetas};
  grid.columns = {"duration", "infidelity", "pop_transfer", "pop_stay"};
  for (const auto& pr : pairs) {
    // |−⟩ ⊗ |1_j 0_k⟩; the spin is left untouched by the gate on this state.
    HybridState in = basis_state(sp, occupations_with(m, {{pr.j, 1}}), Spin::g);
    in.amplitudes.tail(md) = -in.amplitudes.head(md);
    in.amplitudes /= std::sqrt(2.0);
    for (double th : thetas) {
      SweepPoint pt{{10.0 * pr.j + pr.k, th}, {}, false, {}};
      try {
        const HybridState ideal = apply(beam_splitter(sp, pr.j, pr.k, th, 0.0), in);
        Mat rho;
        double dur = 0.0, prob = 1.0;
        if (th == 0.0) {
          rho = DensityOperator::pure(in).matrix;
        } else {
          const std::vector<Op> ops{pulse(realize(GateKind::beam_splitter, th, 0.0, pr.j, pr.k, settings))};
          dur = duration_of(ops);
          rho = run_single(ham, ops, in, noise, settings, prob);
        }
        pt.values = {dur, 1.0 - mixed_fidelity(rho, ideal),
                     population(rho, sp, occupations_with(m, {{pr.k, 1}}), std::nullopt),
                     population(rho, sp, occupations_with(m, {{pr.j, 1}}), std::nullopt)};
      } catch (const std::exception& e) {
        pt.failed = true;
        pt.error = e.what();
        pt.values.assign(grid.columns.size(), std::nan(""));
      }
      grid.points.push_back(std::move(pt));
    }
  }
  return grid;
}

SweepGrid characterize_subtraction(int mode, const std::vector<double>& scaled_taus, const std::vector<int>& ns,
                                   const NoiseSpec& noise, const SimulationSettings& settings, Sideband sideband) {
  int top = 1;
  for (int n : ns) {
    if (n < 1 || n > settings.cutoff) throw std::invalid_argument("characterize_subtraction: need 1 <= n <= cutoff");
    top = std::max(top, n);
  }
  const ModeSpace sp = characterization_space(settings, top);
  const int m = sp.num_modes();
  if (mode < 1 || mode > m) throw std::out_of_range("characterize_subtraction: mode outside the trap");
  const InteractionHamiltonian ham(sp, settings.trap, settings.terms);
  const double unit = settings.pulse.g0 * settings.trap.eta[static_cast<std::size_t>(mode - 1)];
  std::vector<double> nd(ns.begin(), ns.end());
  SweepGrid grid;
  grid.axis_names = {"scaled_tau", "n"};
  grid.axis_values = {scaled_taus, nd};
  grid.columns = {"tau", "duration", "infidelity", "success"};
  for (double x : scaled_taus)
    for (int n : ns) {
      SweepPoint pt{{x, double(n)}, {}, false, {}};
      try {
        const double tau = x / unit;
        const HybridState in = basis_state(sp, occupations_with(m, {{mode, n}}), Spin::g);
        const HybridState want = basis_state(sp, occupations_with(m, {{mode, n - 1}}), Spin::g);
        const auto ops = subtraction_ops(mode, n, tau, sideband, settings);
        double prob = 1.0;
        const Mat rho = run_single(ham, ops, in, noise, settings, prob);
        // Unnormalized: a failed transfer counts against the gate.
        const double f = prob * mixed_fidelity(rho, want);
        pt.values = {tau, duration_of(ops), 1.0 - f, prob};
      } catch (const std::exception& e) {
        pt.failed = true;
        pt.error = e.what();
        pt.values.assign(grid.columns.size(), std::nan(""));
      }
      grid.points.push_back(std::move(pt));
    }
  return grid;
}

std::vector<double> subtraction_trajectory(int mode, double tau, int n, const std::vector<double>& fractions,
                                           const SimulationSettings& settings, Sideband sideband) {
  const ModeSpace sp = characterization_space(settings, n);
  const int m = sp.num_modes();
  const InteractionHamiltonian ham(sp, settings.trap, settings.terms);
  const LaserConfig cfg = adiabatic_schedule(mode, n, tau, settings.trap, sideband, 0.0, settings.pulse);
  const HybridState in =
      basis_state(sp, occupations_with(m, {{mode, n}}), sideband == Sideband::red ? Spin::g : Spin::e);
  const LinearOperator num = number_op(sp, mode);
  const auto drive = laser_drive(ham, cfg);
  std::vector<double> out;
  Mat x = in.amplitudes;
  double t = 0.0;
  for (double f : fractions) {
    if (f < 0.0 || f > 1.0) throw std::invalid_argument("subtraction_trajectory: fractions must lie in [0, 1]");
    const double target = f * tau;
    if (target < t) throw std::invalid_argument("subtraction_trajectory: fractions must be nondecreasing");
    x = propagate(drive, t, target, x, settings.integrator);
    t = target;
    out.push_back(expectation(num, HybridState(sp, x.col(0))).real());
  }
  return out;
}

}  // namespace sculpt
