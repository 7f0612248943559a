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

#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>

namespace sculpt::cli {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

bool one_of(const std::string& v, std::initializer_list<const char*> set) {
  return std::any_of(set.begin(), set.end(), [&](const char* s) { return v == s; });
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config key '") + key + "' has the wrong type");
  }
}

void take_opt(const json& j, const char* key, std::optional<double>& dst) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (v.is_null()) {
    dst.reset();
  } else if (v.is_number()) {
    dst = v.get<double>();
  } else {
    throw UsageError(std::string("config key '") + key + "' must be a number or null");
  }
}

}  // namespace

void RunConfig::validate() const {
  require(one_of(command, {"ideal", "gates", "protocol", "noisemap", "entanglement"}), "unknown command '" + command + "'");
  require(profile == "paper-2022", "unknown profile '" + profile + "' (available: paper-2022)");
  require(one_of(scenario, {"with-ia", "without-ia"}), "scenario must be with-ia or without-ia");
  require(one_of(gates, {"ideal", "realistic"}), "gates must be ideal or realistic");
  require(one_of(sideband, {"red", "blue"}), "sideband must be red or blue");
  require(one_of(coupling, {"both", "gamma-only", "kappa-only"}), "coupling must be both, gamma-only or kappa-only");
  if (command == "gates") require(one_of(gate, {"rsb", "bs", "subtract"}), "gates needs a subcommand: rsb, bs or subtract");
  require(n_min >= 1 && n_max >= n_min && n_max <= 4, "need 1 <= n_min <= n_max <= 4");
  require(xi_gamma >= 0.0 && xi_gamma <= 2.0 && xi_kappa >= 0.0 && xi_kappa <= 2.0, "noise scales must lie in [0, 2]");
  require(grid >= 1 && grid <= 33, "grid must lie in [1, 33]");
  require(theta_max >= 0.0 && theta_points >= 1, "theta grid must be nonempty and nonnegative");
  require(mode >= 1 && mode <= 4, "mode must lie in [1, 4]");
  require(nmax >= 1 && nmax <= cutoff, "nmax must lie in [1, cutoff]");
  for (const auto& p : pairs)
    require(p.size() == 2 && p[0] >= '1' && p[0] <= '4' && p[1] >= '1' && p[1] <= '4' && p[0] != p[1],
            "pairs are two distinct mode digits, e.g. 24");
  for (double x : scaled_taus) require(x > 0.0, "scaled taus must be positive");
  require(cutoff >= 1 && cutoff <= 12, "cutoff must lie in [1, 12]");
  if (command == "protocol" || command == "noisemap") require(cutoff >= 4, "the protocol needs cutoff >= 4");
  require(total_cap == -1 || total_cap >= 1, "total_cap must be -1 or positive");
  require(workers >= 1, "workers must be positive");
  require(rtol > 0.0 && atol > 0.0, "rtol and atol must be positive");
  require(macro_step > 0.0, "macro_step must be positive");
  require(g0 > 0.0, "g0 must be positive");
  require(ramp_ratio >= 0.0 && ramp_ratio <= 0.5, "ramp_ratio must lie in [0, 1/2]");
  if (tau3) require(*tau3 > 0.0, "tau3 must be positive");
  if (tau4) require(*tau4 > 0.0, "tau4 must be positive");
  require(!out.empty(), "out must be a directory path");
}

SimulationSettings RunConfig::simulation() const {
  SimulationSettings s;
  s.trap = TrapSpec::paper_2022();
  s.pulse.g0 = g0;
  s.pulse.ramp_ratio = ramp_ratio;
  s.pulse.light_shift_compensation = light_shift_compensation;
  s.integrator.rtol = rtol;
  s.integrator.atol = atol;
  s.cutoff = cutoff;
  s.total_cap = total_cap;
  s.macro_step = macro_step;
  s.workers = workers;
  s.tau3 = tau3;
  s.tau4 = tau4;
  return s;
}

NoiseSpec RunConfig::reference_noise() const {
  NoiseSpec n = NoiseSpec::paper_2022();
  n.as_printed_dephasing = as_printed_dephasing;
  return n;
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["gate"] = c.gate;
  j["profile"] = c.profile;
  j["out"] = c.out;
  j["n_min"] = c.n_min;
  j["n_max"] = c.n_max;
  j["scenario"] = c.scenario;
  j["gates"] = c.gates;
  j["sideband"] = c.sideband;
  j["coupling"] = c.coupling;
  j["xi_gamma"] = c.xi_gamma;
  j["xi_kappa"] = c.xi_kappa;
  j["grid"] = c.grid;
  j["tau3"] = c.tau3 ? json(*c.tau3) : json(nullptr);
  j["tau4"] = c.tau4 ? json(*c.tau4) : json(nullptr);
  j["theta_max"] = c.theta_max;
  j["theta_points"] = c.theta_points;
  j["mode"] = c.mode;
  j["nmax"] = c.nmax;
  j["pairs"] = c.pairs;
  j["scaled_taus"] = c.scaled_taus;
  j["noise"] = c.noise;
  j["cutoff"] = c.cutoff;
  j["total_cap"] = c.total_cap;
  j["workers"] = c.workers;
  j["rtol"] = c.rtol;
  j["atol"] = c.atol;
  j["macro_step"] = c.macro_step;
  j["g0"] = c.g0;
  j["ramp_ratio"] = c.ramp_ratio;
  j["light_shift_compensation"] = c.light_shift_compensation;
  j["as_printed_dephasing"] = c.as_printed_dephasing;
  return j;
}

void merge_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  const json known = to_json(c);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) throw UsageError("unknown config key '" + it.key() + "'");
  take(j, "command", c.command);
  take(j, "gate", c.gate);
  take(j, "profile", c.profile);
  take(j, "out", c.out);
  take(j, "n_min", c.n_min);
  take(j, "n_max", c.n_max);
  take(j, "scenario", c.scenario);
  take(j, "gates", c.gates);
  take(j, "sideband", c.sideband);
  take(j, "coupling", c.coupling);
  take(j, "xi_gamma", c.xi_gamma);
  take(j, "xi_kappa", c.xi_kappa);
  take(j, "grid", c.grid);
  take_opt(j, "tau3", c.tau3);
  take_opt(j, "tau4", c.tau4);
  take(j, "theta_max", c.theta_max);
  take(j, "theta_points", c.theta_points);
  take(j, "mode", c.mode);
  take(j, "nmax", c.nmax);
  take(j, "pairs", c.pairs);
  take(j, "scaled_taus", c.scaled_taus);
  take(j, "noise", c.noise);
  take(j, "cutoff", c.cutoff);
  take(j, "total_cap", c.total_cap);
  take(j, "workers", c.workers);
  take(j, "rtol", c.rtol);
  take(j, "atol", c.atol);
  take(j, "macro_step", c.macro_step);
  take(j, "g0", c.g0);
  take(j, "ramp_ratio", c.ramp_ratio);
  take(j, "light_shift_compensation", c.light_shift_compensation);
  take(j, "as_printed_dephasing", c.as_printed_dephasing);
}

void merge_env(RunConfig& c) {
  const json known = to_json(c);
  json patch = json::object();
  for (auto it = known.begin(); it != known.end(); ++it) {
    const std::string name = kEnvPrefix + upper(it.key());
    const char* raw = std::getenv(name.c_str());
    if (!raw) continue;
    const std::string v(raw);
    if (it->is_string()) {
      patch[it.key()] = v;
    } else if (it->is_boolean()) {
      if (v == "1" || v == "true") patch[it.key()] = true;
      else if (v == "0" || v == "false") patch[it.key()] = false;
      else throw UsageError(name + " must be true/false/1/0");
    } else if (it->is_array() && !v.empty() && v.front() != '[') {
      // Comma-separated list.
      json arr = json::array();
      std::size_t pos = 0;
      while (pos <= v.size()) {
        const std::size_t end = std::min(v.find(',', pos), v.size());
        const std::string item = v.substr(pos, end - pos);
        if (it.key() == "pairs") arr.push_back(item);
        else {
          try {
            arr.push_back(json::parse(item));
          } catch (const json::exception&) {
            throw UsageError(name + " has a malformed entry '" + item + "'");
          }
        }
        pos = end + 1;
      }
      patch[it.key()] = arr;
    } else {
      try {
        patch[it.key()] = json::parse(v);
      } catch (const json::exception&) {
        throw UsageError(name + " is not a valid value");
      }
    }
  }
  merge_json(c, patch);
}

}  // namespace sculpt::cli
