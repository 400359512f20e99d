// Copyright 2026 The fluxlab Authors
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

#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluxlab/errors.hpp"
#include "fluxlab/lindblad.hpp"
#include "fluxlab/models.hpp"
#include "fluxlab/qcore.hpp"

// Strict JSON run configuration for the command-line front end. Unknown keys
// are errors; every physical quantity is in natural units (hbar = k_B = 1).

namespace fluxlab::cli {

using nlohmann::json;

struct ProtocolConfig {
  models::ProtocolParams params;
  std::vector<double> scaling_dts{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
};

struct CnotFluxConfig {
  models::CnotParams params;
  double t_min = models::kCnotDefaultTMin;
  double t_max = 4.0 * M_PI;
  int samples = 4000;
  double rk4_step = lindblad::kDefaultStep;
};

struct PhaseDiagramConfig {
  double a_min = 0.0, a_max = 1.0;
  int a_cells = 41;
  double gamma_min = 0.025, gamma_max = 0.8;
  int gamma_cells = 32;
  int time_samples = 2000;
  double j = 1.0;
  int spot_check_stride = 0;
};

struct BlpConfig {
  double a = 0.3;
  std::vector<double> gammas{0.05, 0.1, 0.15, 0.2, 0.25};
  double j = 1.0;
  double theta = 0.0, phi = 0.0;  // axis of the antipodal pair
  bool optimize = false;
  int n_theta = 12, n_phi = 24;
  double horizon_factor = 12.0;  // horizon = factor / gamma
  double output_step = 0.01;
  double rk4_step = lindblad::kDefaultStep;
};

struct SimulateConfig {
  lindblad::MasterEquation equation;
  qcore::Matrix initial_state;
  double t0 = 0.0, t1 = 10.0;
  double step = lindblad::kDefaultStep;
  int output_stride = 10;
};

struct RunConfig {
  std::string command;
  std::string config_hash;
  std::optional<std::string> output_dir;
  bool emit_svg = false;
  std::variant<ProtocolConfig, CnotFluxConfig, PhaseDiagramConfig, BlpConfig,
               SimulateConfig>
      payload;
};

namespace detail {

inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
  }
}

inline double get_num(const json& obj, const std::string& key, double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number()) {
    throw ConfigError("key \"" + key + "\" must be a number");
  }
  return obj[key].get<double>();
}

inline int get_int(const json& obj, const std::string& key, int dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_number_integer()) {
    throw ConfigError("key \"" + key + "\" must be an integer");
  }
  return obj[key].get<int>();
}

inline bool get_bool(const json& obj, const std::string& key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj[key].is_boolean()) {
    throw ConfigError("key \"" + key + "\" must be a boolean");
  }
  return obj[key].get<bool>();
}

/// Complex matrix from nested arrays; entries are numbers or [re, im].
inline qcore::Matrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(where + ": expected a non-empty array of rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(where + ": rows must be arrays");
  qcore::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError(where + ": ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const json& e = j[r][c];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() &&
                 e[1].is_number()) {
        m(r, c) = qcore::Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw ConfigError(where + ": entries must be numbers or [re, im]");
      }
    }
  }
  return m;
}

inline qcore::Matrix named_jump(const std::string& name, Eigen::Index dim) {
  if (dim != 2) {
    throw ConfigError("named jump operators require dim = 2, got dim " +
                      std::to_string(dim));
  }
  if (name == "sigma_x") return qcore::sigma_x();
  if (name == "sigma_y") return qcore::sigma_y();
  if (name == "sigma_z") return qcore::sigma_z();
  if (name == "sigma_plus") return qcore::sigma_plus();
  if (name == "sigma_minus") return qcore::sigma_minus();
  throw ConfigError("unknown jump operator \"" + name + "\"");
}

inline lindblad::RateFn parse_rate(const json& j) {
  if (j.is_number()) {
    const double v = j.get<double>();
    return [v](double) { return v; };
  }
  if (!j.is_object()) {
    throw ConfigError("rate must be a number or an object with a \"type\"");
  }
  const std::string type = j.contains("type") ? j["type"].get<std::string>()
                                              : std::string();
  if (type == "constant") {
    check_keys(j, {"type", "value"}, "rate");
    const double v = get_num(j, "value", 0.0);
    return [v](double) { return v; };
  }
  if (type == "cosine") {
    check_keys(j, {"type", "offset", "amplitude", "frequency", "phase"},
               "rate");
    const double off = get_num(j, "offset", 0.0);
    const double amp = get_num(j, "amplitude", 0.0);
    const double freq = get_num(j, "frequency", 1.0);
    const double phase = get_num(j, "phase", 0.0);
    return [=](double t) { return off + amp * std::cos(freq * t + phase); };
  }
  throw ConfigError("unknown rate type \"" + type + "\"");
}

inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

inline ProtocolConfig parse_protocol(const json& j) {
  check_keys(j,
             {"command", "output_dir", "emit_svg", "e_a", "e_b", "p_a", "beta",
              "q0_frac", "q1_frac", "gamma", "dt", "scaling_dts"},
             "protocol config");
  ProtocolConfig c;
  auto& p = c.params;
  p.e_a = get_num(j, "e_a", 1.0);
  p.e_b = get_num(j, "e_b", 0.0);
  p.p_a = get_num(j, "p_a", 0.8);
  p.beta = get_num(j, "beta", 1.0);
  p.q0_frac = get_num(j, "q0_frac", 0.3);
  p.q1_frac = get_num(j, "q1_frac",
                      p.q0_frac * std::exp(-p.beta * (p.e_a - p.e_b)));
  p.gamma = get_num(j, "gamma", 1.0);
  p.dt = get_num(j, "dt", 1e-2);
  if (j.contains("scaling_dts")) {
    if (!j["scaling_dts"].is_array()) {
      throw ConfigError("scaling_dts must be an array of step sizes");
    }
    c.scaling_dts.clear();
    for (const auto& e : j["scaling_dts"]) c.scaling_dts.push_back(e.get<double>());
  }
  models::detail::validate_protocol(p, false);
  return c;
}

inline CnotFluxConfig parse_cnot(const json& j) {
  check_keys(j,
             {"command", "output_dir", "emit_svg", "a", "gamma", "j", "r0",
              "theta0", "phi0", "t_min", "t_max", "samples", "rk4_step"},
             "cnot-flux config");
  CnotFluxConfig c;
  c.params.a = get_num(j, "a", 0.3);
  if (c.params.a < 0.0 || c.params.a > 1.0) {
    throw ConfigError("a out of [0,1]");
  }
  c.params.j_coupling = get_num(j, "j", 1.0);
  c.params.gamma = get_num(j, "gamma", 0.1) * c.params.j_coupling;
  c.params.r0 = get_num(j, "r0", 1.0);
  c.params.theta0 = get_num(j, "theta0", 0.0);
  c.params.phi0 = get_num(j, "phi0", 0.0);
  c.t_min = get_num(j, "t_min", models::kCnotDefaultTMin / c.params.j_coupling);
  c.t_max = get_num(j, "t_max", 4.0 * M_PI / c.params.j_coupling);
  c.samples = get_int(j, "samples", 4000);
  c.rk4_step = get_num(j, "rk4_step", lindblad::kDefaultStep);
  if (!(c.t_min > 0) || !(c.t_max > c.t_min) || c.samples < 2) {
    throw ConfigError("cnot-flux: need 0 < t_min < t_max and samples >= 2");
  }
  models::detail::validate_cnot(c.params);
  return c;
}

inline PhaseDiagramConfig parse_phase(const json& j) {
  check_keys(j,
             {"command", "output_dir", "emit_svg", "a_min", "a_max", "a_cells",
              "gamma_min", "gamma_max", "gamma_cells", "time_samples", "j",
              "spot_check_stride"},
             "phase-diagram config");
  PhaseDiagramConfig c;
  c.a_min = get_num(j, "a_min", 0.0);
  c.a_max = get_num(j, "a_max", 1.0);
  c.a_cells = get_int(j, "a_cells", 41);
  c.gamma_min = get_num(j, "gamma_min", 0.025);
  c.gamma_max = get_num(j, "gamma_max", 0.8);
  c.gamma_cells = get_int(j, "gamma_cells", 32);
  c.time_samples = get_int(j, "time_samples", 2000);
  c.j = get_num(j, "j", 1.0);
  c.spot_check_stride = get_int(j, "spot_check_stride", 0);
  if (c.a_min < 0.0 || c.a_max > 1.0 || !(c.a_max >= c.a_min)) {
    throw ConfigError("a out of [0,1]");
  }
  if (!(c.gamma_min > 0.0) || !(c.gamma_max >= c.gamma_min)) {
    throw ConfigError("phase-diagram: gamma grid must be positive");
  }
  if (c.a_cells < 1 || c.gamma_cells < 1 || c.time_samples < 16) {
    throw ConfigError("phase-diagram: grid sizes too small");
  }
  return c;
}

inline BlpConfig parse_blp(const json& j) {
  check_keys(j,
             {"command", "output_dir", "emit_svg", "a", "gammas", "j", "theta",
              "phi", "optimize", "n_theta", "n_phi", "horizon_factor",
              "output_step", "rk4_step"},
             "blp config");
  BlpConfig c;
  c.a = get_num(j, "a", 0.3);
  if (c.a < 0.0 || c.a > 1.0) throw ConfigError("a out of [0,1]");
  if (j.contains("gammas")) {
    if (!j["gammas"].is_array()) throw ConfigError("gammas must be an array");
    c.gammas.clear();
    for (const auto& e : j["gammas"]) c.gammas.push_back(e.get<double>());
  }
  for (double g : c.gammas) {
    if (!(g > 0.0)) throw ConfigError("blp: gammas must be positive");
  }
  c.j = get_num(j, "j", 1.0);
  c.theta = get_num(j, "theta", 0.0);
  c.phi = get_num(j, "phi", 0.0);
  c.optimize = get_bool(j, "optimize", false);
  c.n_theta = get_int(j, "n_theta", 12);
  c.n_phi = get_int(j, "n_phi", 24);
  c.horizon_factor = get_num(j, "horizon_factor", 12.0);
  c.output_step = get_num(j, "output_step", 0.01);
  c.rk4_step = get_num(j, "rk4_step", lindblad::kDefaultStep);
  if (!(c.horizon_factor > 0) || !(c.output_step > 0)) {
    throw ConfigError("blp: horizon_factor and output_step must be positive");
  }
  return c;
}

inline SimulateConfig parse_simulate(const json& j) {
  check_keys(j,
             {"command", "output_dir", "emit_svg", "dim", "hamiltonian",
              "channels", "initial_state", "t0", "t1", "step",
              "output_stride"},
             "simulate config");
  SimulateConfig c;
  const int dim = get_int(j, "dim", 2);
  if (dim < 2 || dim > 8) throw ConfigError("simulate: dim must be in [2, 8]");
  c.equation.dim = dim;

  qcore::Matrix h = qcore::Matrix::Zero(dim, dim);
  if (j.contains("hamiltonian")) {
    h = parse_matrix(j["hamiltonian"], "hamiltonian");
    if (h.rows() != dim || h.cols() != dim) {
      throw ConfigError("hamiltonian dimension does not match dim");
    }
    if (qcore::hermiticity_deviation(h) > 1e-10) {
      throw ConfigError("hamiltonian is not Hermitian");
    }
  }
  c.equation.hamiltonian = [h](double) { return h; };

  if (j.contains("channels")) {
    if (!j["channels"].is_array()) {
      throw ConfigError("channels must be an array");
    }
    int idx = 0;
    for (const auto& cj : j["channels"]) {
      check_keys(cj, {"label", "jump", "rate", "beta"},
                 "channels[" + std::to_string(idx) + "]");
      lindblad::Channel ch;
      ch.label = cj.contains("label") ? cj["label"].get<std::string>()
                                      : "ch" + std::to_string(idx);
      if (!cj.contains("jump")) throw ConfigError("channel needs a jump");
      if (cj["jump"].is_string()) {
        ch.a_i = named_jump(cj["jump"].get<std::string>(), dim);
      } else {
        ch.a_i = parse_matrix(cj["jump"], "jump");
        if (ch.a_i.rows() != dim || ch.a_i.cols() != dim) {
          throw ConfigError("jump operator dimension does not match dim");
        }
      }
      ch.a_j = ch.a_i;
      ch.rate = cj.contains("rate") ? parse_rate(cj["rate"])
                                    : lindblad::RateFn([](double) { return 0.0; });
      ch.beta = cj.contains("beta") ? cj["beta"].get<double>() : 0.0;
      if (ch.beta < 0.0) throw ConfigError("channel beta must be >= 0");
      c.equation.channels.push_back(std::move(ch));
      ++idx;
    }
  }

  if (j.contains("initial_state")) {
    if (j["initial_state"].is_object()) {
      check_keys(j["initial_state"], {"bloch"}, "initial_state");
      if (dim != 2) throw ConfigError("bloch initial state needs dim = 2");
      const auto& b = j["initial_state"]["bloch"];
      if (!b.is_array() || b.size() != 3) {
        throw ConfigError("initial_state.bloch must be [r, theta, phi]");
      }
      c.initial_state = qcore::state_from_bloch(
                            {b[0].get<double>(), b[1].get<double>(),
                             b[2].get<double>()})
                            .matrix();
    } else {
      c.initial_state = parse_matrix(j["initial_state"], "initial_state");
    }
  } else {
    c.initial_state = qcore::Matrix::Identity(dim, dim) / double(dim);
  }
  c.t0 = get_num(j, "t0", 0.0);
  c.t1 = get_num(j, "t1", 10.0);
  c.step = get_num(j, "step", lindblad::kDefaultStep);
  c.output_stride = get_int(j, "output_stride", 10);
  if (!(c.t1 > c.t0) || !(c.step > 0) || c.output_stride < 1) {
    throw ConfigError("simulate: need t1 > t0, step > 0, output_stride >= 1");
  }
  // Validate the initial state eagerly so bad configs fail before any work.
  try {
    (void)qcore::QState(c.initial_state);
  } catch (const Error& e) {
    throw ConfigError(std::string("initial_state: ") + e.what());
  }
  return c;
}

}  // namespace detail

/// Strictly parse a JSON config. Every key is checked against the command's
/// schema and all parameter preconditions are validated up front.
inline RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("command") || !j["command"].is_string()) {
    throw ConfigError("config needs a string \"command\"");
  }
  RunConfig rc;
  rc.command = j["command"].get<std::string>();
  rc.config_hash = detail::fnv1a_hex(j.dump());
  if (j.contains("output_dir")) {
    rc.output_dir = j["output_dir"].get<std::string>();
  }
  rc.emit_svg = detail::get_bool(j, "emit_svg", false);

  if (rc.command == "protocol") {
    rc.payload = detail::parse_protocol(j);
  } else if (rc.command == "cnot-flux") {
    rc.payload = detail::parse_cnot(j);
  } else if (rc.command == "phase-diagram") {
    rc.payload = detail::parse_phase(j);
  } else if (rc.command == "blp") {
    rc.payload = detail::parse_blp(j);
  } else if (rc.command == "simulate") {
    rc.payload = detail::parse_simulate(j);
  } else {
    throw ConfigError("unknown command \"" + rc.command + "\"");
  }
  return rc;
}

}  // namespace fluxlab::cli
