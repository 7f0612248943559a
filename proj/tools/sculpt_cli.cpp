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

// Command-line front end. Exit codes: 0 success, 1 usage, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "run_config.hpp"
#include "sculpt/entanglement.hpp"
#include "sculpt/sculpting.hpp"

namespace {

using namespace sculpt;
using sculpt::cli::RunConfig;
using sculpt::cli::UsageError;

constexpr const char* kVersion = "0.1.0";

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Tab-delimited table with a '#' metadata header that embeds the resolved
// configuration.
class Table {
 public:
  Table(std::string name, const RunConfig& cfg, std::vector<std::string> columns)
      : name_(std::move(name)), columns_(std::move(columns)) {
    meta_.push_back("sculpt " + std::string(kVersion));
    meta_.push_back("table: " + name_);
    meta_.push_back("config: " + cli::to_json(cfg).dump());
    meta_.push_back("units: time ms, angular frequency rad/ms, entropy nats");
  }
  void meta(const std::string& line) { meta_.push_back(line); }
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  std::string str() const {
    std::ostringstream os;
    for (const auto& m : meta_) os << "# " << m << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "\t" : "") << columns_[i];
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "\t" : "") << r[i];
      os << '\n';
    }
    return os.str();
  }

  void emit(const std::string& dir) const {
    const std::string text = str();
    std::cout << text;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = std::filesystem::path(dir) / (name_ + ".tsv");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("cannot write " + path.string());
  }

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::string> meta_;
  std::vector<std::vector<std::string>> rows_;
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  if (n == 1) return {hi};
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

Scenario scenario_of(const RunConfig& c) { return c.scenario == "with-ia" ? Scenario::with_ia : Scenario::without_ia; }
Sideband sideband_of(const RunConfig& c) { return c.sideband == "red" ? Sideband::red : Sideband::blue; }

void cmd_ideal(const RunConfig& c) {
  Table t("ideal", c,
          {"n", "overlap", "fidelity", "success_uncorrected", "fidelity_corrected", "success_corrected",
           "closed_overlap", "closed_success_uncorrected", "closed_success_corrected"});
  for (int n = c.n_min; n <= c.n_max; ++n) {
    const auto u = general_sculpt(n, GeneralVariant::arithmetic, false);
    const auto k = general_sculpt(n, GeneralVariant::arithmetic, true);
    t.row({std::to_string(n), fmt(u.overlap_magnitude), fmt(u.fidelity), fmt(u.success_prob), fmt(k.fidelity),
           fmt(k.success_prob), fmt(closed_form_overlap(n)), fmt(closed_form_success(n, false)),
           fmt(closed_form_success(n, true))});
  }
  t.emit(c.out);
}

void emit_grid(const RunConfig& c, const std::string& name, const SweepGrid& g,
               const std::vector<std::string>& order) {
  std::vector<std::string> cols = g.axis_names;
  cols.insert(cols.end(), order.begin(), order.end());
  cols.push_back("failed");
  Table t(name, c, cols);
  std::size_t failed = 0;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const auto& p = g.points[i];
    std::vector<std::string> r;
    for (double x : p.coords) r.push_back(fmt(x));
    for (const auto& col : order) r.push_back(fmt(p.values.empty() ? std::nan("") : g.value(i, col)));
    r.push_back(p.failed ? "1" : "0");
    if (p.failed) {
      ++failed;
      t.meta("point " + std::to_string(i) + " failed: " + p.error);
    }
    t.row(std::move(r));
  }
  t.emit(c.out);
  if (!g.points.empty() && failed == g.points.size()) throw NumericalFailure("every sweep point failed");
}

void cmd_gates(const RunConfig& c) {
  const SimulationSettings s = c.simulation();
  const NoiseSpec noise = c.noise ? c.reference_noise() : NoiseSpec::none(4);
  if (c.gate == "rsb") {
    const auto g = characterize_rsb(linspace(0.0, c.theta_max, c.theta_points), noise, s, c.mode);
    emit_grid(c, "gates_rsb", g, {"infidelity", "pop_e0", "pop_g1", "duration"});
  } else if (c.gate == "bs") {
    std::vector<ModePair> pairs;
    for (const auto& p : c.pairs) pairs.push_back({p[0] - '0', p[1] - '0'});
    const auto g = characterize_bs(pairs, linspace(0.0, c.theta_max, c.theta_points), noise, s);
    emit_grid(c, "gates_bs", g, {"infidelity", "pop_transfer", "pop_stay", "duration"});
  } else {
    std::vector<int> ns;
    for (int n = 1; n <= c.nmax; ++n) ns.push_back(n);
    const auto g = characterize_subtraction(c.mode, c.scaled_taus, ns, noise, s, sideband_of(c));
    emit_grid(c, "gates_subtract", g, {"tau", "infidelity", "success", "duration"});
  }
}

void cmd_protocol(const RunConfig& c) {
  NoiseSpec noise = c.reference_noise();
  noise.scale_gamma = c.xi_gamma;
  noise.scale_kappa = c.xi_kappa;
  const GateModel model = c.gates == "ideal" ? GateModel::ideal : GateModel::realistic;
  const auto led = run_protocol(scenario_of(c), model, noise, sideband_of(c), c.simulation());
  if (led.failed && led.rows.empty()) throw NumericalFailure(led.error);
  Table t("protocol_" + c.scenario + "_" + c.sideband + "_" + c.gates, c,
          {"gate", "duration", "isolated_fidelity", "accumulated_fidelity", "accumulated_time", "probability"});
  t.meta("tau3 " + fmt(led.tau3) + " tau4 " + fmt(led.tau4));
  if (led.failed) t.meta("warning: " + led.error);
  for (const auto& r : led.rows)
    t.row({r.name, fmt(r.duration), fmt(r.isolated_fidelity), fmt(r.accumulated_fidelity), fmt(r.accumulated_time),
           fmt(r.probability)});
  t.row({"uncorrected", "nan", "nan", fmt(led.uncorrected_fidelity), "nan", fmt(led.uncorrected_success)});
  t.row({"final", "nan", "nan", fmt(led.fidelity), fmt(led.rows.empty() ? 0.0 : led.rows.back().accumulated_time),
         fmt(led.success_probability)});
  t.emit(c.out);
}

void cmd_noisemap(const RunConfig& c) {
  const auto axis = linspace(0.0, 2.0, c.grid);
  const Coupling coupling = c.coupling == "both"         ? Coupling::both
                            : c.coupling == "gamma-only" ? Coupling::gamma_only
                                                         : Coupling::kappa_only;
  const auto g = noise_map(scenario_of(c), axis, axis, coupling, sideband_of(c), c.reference_noise(), c.simulation());
  Table t("noisemap_" + c.scenario + "_" + c.sideband + "_" + c.coupling, c,
          {"xi_gamma", "xi_kappa", "coupling_mode", "fidelity", "success", "rho11", "rho22", "rho12_re", "rho12_im",
           "failed"});
  std::size_t failed = 0;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const auto& p = g.points[i];
    std::vector<std::string> r{fmt(p.coords[0]), fmt(p.coords[1]), c.coupling};
    for (const char* col : {"fidelity", "success", "rho11", "rho22", "rho12_re", "rho12_im"}) r.push_back(fmt(g.value(i, col)));
    r.push_back(p.failed ? "1" : "0");
    if (p.failed) {
      ++failed;
      t.meta("point " + std::to_string(i) + " failed: " + p.error);
    }
    t.row(std::move(r));
  }
  t.emit(c.out);
  if (failed == g.points.size()) throw NumericalFailure("every noise-map point failed");
}

void cmd_entanglement(const RunConfig& c) {
  const HybridState sym = prepare_sym(ModeSpace(4, 4, false, 4));
  Table s("entanglement_sym4", c, {"state", "s_pe", "s_me"});
  s.row({"sym4", fmt(particle_entanglement(sym)), fmt(mode_entanglement(sym))});
  s.emit(c.out);
  const auto rows = fig_a1_sweep(linspace(0.0, c.theta_max, c.theta_points));
  Table t("entanglement_b_theta", c, {"theta", "s_me", "s_pe", "sum", "branch_weight"});
  for (const auto& r : rows) t.row({fmt(r.theta), fmt(r.s_me), fmt(r.s_pe), fmt(r.sum), fmt(r.branch_weight)});
  t.emit(c.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motional GHZ-state sculpting with trapped ions"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> out, profile, scenario, gates, sideband, coupling, pairs_csv, taus_csv;
  std::optional<int> cutoff, total_cap, workers, n, n_min, n_max, grid, theta_points, mode, nmax;
  std::optional<double> rtol, atol, macro_step, g0, ramp, noise_all, xi_gamma, xi_kappa, tau3, tau4, theta_max;
  bool as_printed = false, no_comp = false, no_noise = false;

  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out, "output directory");
  app.add_option("--cutoff", cutoff, "Fock cutoff per mode");
  app.add_option("--total-cap", total_cap, "cap on the total phonon number (-1: none)");
  app.add_option("--workers", workers, "worker threads for sweeps");
  app.add_option("--rtol", rtol, "integrator relative tolerance");
  app.add_option("--atol", atol, "integrator absolute tolerance");
  app.add_option("--macro-step", macro_step, "splitting step for noisy runs (ms)");
  app.add_option("--profile", profile, "physical constants profile");
  app.add_option("--g0", g0, "peak coupling (rad/ms)");
  app.add_option("--ramp-ratio", ramp, "ramp time over gate time");
  app.add_flag("--as-printed-dephasing", as_printed, "use the literal third dissipator");
  app.add_flag("--no-light-shift-compensation", no_comp, "leave sideband detunings uncorrected");

  auto* ideal = app.add_subcommand("ideal", "exact sculpting algebra");
  ideal->add_option("--n", n, "number of mode pairs");
  ideal->add_option("--n-min", n_min);
  ideal->add_option("--n-max", n_max);

  auto* gates_cmd = app.add_subcommand("gates", "gate characterizations");
  gates_cmd->require_subcommand(1);
  std::string gate_name;
  for (const char* name : {"rsb", "bs", "subtract"}) {
    auto* sub = gates_cmd->add_subcommand(name);
    sub->callback([&gate_name, name] { gate_name = name; });
    sub->add_option("--theta-max", theta_max);
    sub->add_option("--theta-points", theta_points);
    sub->add_option("--mode", mode);
    sub->add_option("--nmax", nmax);
    sub->add_option("--pairs", pairs_csv, "comma-separated mode pairs, e.g. 24,12");
    sub->add_option("--scaled-taus", taus_csv, "comma-separated values of tau*g0*eta");
    sub->add_option("--sideband", sideband);
    sub->add_flag("--no-noise", no_noise, "switch the reservoirs off");
  }

  auto* protocol = app.add_subcommand("protocol", "full protocol ledger");
  auto* noisemap = app.add_subcommand("noisemap", "fidelity over reservoir couplings");
  for (auto* sub : {protocol, noisemap}) {
    sub->add_option("--scenario", scenario, "with-ia | without-ia");
    sub->add_option("--sideband", sideband, "red | blue");
    sub->add_option("--tau3", tau3);
    sub->add_option("--tau4", tau4);
  }
  protocol->add_option("--gates", gates, "ideal | realistic");
  protocol->add_option("--noise", noise_all, "common reservoir scale");
  protocol->add_option("--xi-gamma", xi_gamma);
  protocol->add_option("--xi-kappa", xi_kappa);
  noisemap->add_option("--grid", grid, "points per axis on [0, 2]");
  noisemap->add_option("--coupling", coupling, "both | gamma-only | kappa-only");

  auto* ent = app.add_subcommand("entanglement", "mode and particle entanglement");
  ent->add_option("--theta-points", theta_points);
  ent->add_option("--theta-max", theta_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw UsageError("cannot read config " + config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config is not valid JSON: ") + e.what());
      }
      cli::merge_json(cfg, j);
    }
    cli::merge_env(cfg);

    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (cfg.command == "gates") cfg.gate = gate_name;
    if (cfg.command == "entanglement") {
      if (!theta_max) cfg.theta_max = std::numbers::pi / 2.0;
    }
    if (out) cfg.out = *out;
    if (profile) cfg.profile = *profile;
    if (cutoff) cfg.cutoff = *cutoff;
    if (total_cap) cfg.total_cap = *total_cap;
    if (workers) cfg.workers = *workers;
    if (rtol) cfg.rtol = *rtol;
    if (atol) cfg.atol = *atol;
    if (macro_step) cfg.macro_step = *macro_step;
    if (g0) cfg.g0 = *g0;
    if (ramp) cfg.ramp_ratio = *ramp;
    if (as_printed) cfg.as_printed_dephasing = true;
    if (no_comp) cfg.light_shift_compensation = false;
    if (n) cfg.n_min = cfg.n_max = *n;
    if (n_min) cfg.n_min = *n_min;
    if (n_max) cfg.n_max = *n_max;
    if (scenario) cfg.scenario = *scenario;
    if (gates) cfg.gates = *gates;
    if (sideband) cfg.sideband = *sideband;
    if (coupling) cfg.coupling = *coupling;
    if (grid) cfg.grid = *grid;
    if (noise_all) cfg.xi_gamma = cfg.xi_kappa = *noise_all;
    if (xi_gamma) cfg.xi_gamma = *xi_gamma;
    if (xi_kappa) cfg.xi_kappa = *xi_kappa;
    if (tau3) cfg.tau3 = *tau3;
    if (tau4) cfg.tau4 = *tau4;
    if (theta_max) cfg.theta_max = *theta_max;
    if (theta_points) cfg.theta_points = *theta_points;
    if (mode) cfg.mode = *mode;
    if (nmax) cfg.nmax = *nmax;
    if (no_noise) cfg.noise = false;
    if (pairs_csv) {
      cfg.pairs.clear();
      std::stringstream ss(*pairs_csv);
      for (std::string item; std::getline(ss, item, ',');) cfg.pairs.push_back(item);
    }
    if (taus_csv) {
      cfg.scaled_taus.clear();
      std::stringstream ss(*taus_csv);
      for (std::string item; std::getline(ss, item, ',');) {
        try {
          cfg.scaled_taus.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw UsageError("--scaled-taus has a malformed entry '" + item + "'");
        }
      }
    }
    cfg.validate();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (cfg.command == "ideal") cmd_ideal(cfg);
    else if (cfg.command == "gates") cmd_gates(cfg);
    else if (cfg.command == "protocol") cmd_protocol(cfg);
    else if (cfg.command == "noisemap") cmd_noisemap(cfg);
    else cmd_entanglement(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
