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
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "fluxlab/cli/artifacts.hpp"
#include "fluxlab/cli/config.hpp"
#include "fluxlab/divisibility.hpp"
#include "fluxlab/measures.hpp"
#include "fluxlab/models.hpp"
#include "fluxlab/thermoflux.hpp"

// The five studies behind the command-line front end. Every run writes its
// CSV artifacts plus a manifest into the output directory; outputs are
// deterministic for a fixed config.

namespace fluxlab::cli {

namespace fs = std::filesystem;

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

}  // namespace detail

// ---- protocol ----------------------------------------------------------------------

inline std::vector<std::string> run_protocol(const ProtocolConfig& c,
                                             const fs::path& dir,
                                             bool emit_svg) {
  std::vector<std::string> artifacts;

  const models::ProtocolReport ex = models::protocol_exact_step(c.params);
  const models::ProtocolReport fo = models::protocol_first_order(c.params);
  Table step;
  step.columns = {"quantity", "exact", "first_order"};
  auto put = [&](const char* name, double a, double b) {
    step.add_row({std::string(name), a, b});
  };
  put("p_z", ex.p_z, fo.p_z);
  put("dQ", ex.dQ, fo.dQ);
  put("dS_sys", ex.dS_sys, fo.dS_sys);
  put("dS_env", ex.dS_env, fo.dS_env);
  put("dI_mut", ex.dI_mut, fo.dI_mut);
  put("dS_irr", ex.dS_irr, fo.dS_irr);
  write_csv(dir / "protocol_step.csv", step);
  artifacts.push_back("protocol_step.csv");

  const models::ScalingResult sc =
      models::protocol_scaling_study(c.params, c.scaling_dts);
  Table scaling;
  scaling.columns = {"dt", "abs_diff", "fit"};
  if (sc.no_signal) {
    for (const auto& [dt, d] : sc.points) scaling.add_row({dt, d, 0.0});
  } else {
    // Anchor the fitted power law at the largest measured step.
    double ref_dt = sc.points.front().first, ref_d = sc.points.front().second;
    for (const auto& [dt, d] : sc.points) {
      if (dt > ref_dt) {
        ref_dt = dt;
        ref_d = d;
      }
    }
    for (const auto& [dt, d] : sc.points) {
      scaling.add_row({dt, d, ref_d * std::pow(dt / ref_dt, sc.slope)});
    }
  }
  write_csv(dir / "protocol_scaling.csv", scaling);
  artifacts.push_back("protocol_scaling.csv");

  Table summary;
  summary.columns = {"quantity", "value"};
  summary.add_row({std::string("fitted_slope"), sc.slope});
  summary.add_row({std::string("no_signal"), sc.no_signal ? 1.0 : 0.0});
  write_csv(dir / "protocol_summary.csv", summary);
  artifacts.push_back("protocol_summary.csv");

  if (emit_svg && !sc.no_signal) {
    Table logt;
    logt.columns = {"log10_dt", "log10_diff", "log10_fit"};
    for (std::size_t r = 0; r < scaling.rows.size(); ++r) {
      logt.add_row({std::log10(scaling.num(r, 0)),
                    std::log10(std::max(scaling.num(r, 1), 1e-300)),
                    std::log10(std::max(scaling.num(r, 2), 1e-300))});
    }
    const std::string svg = to_svg_lines(
        logt,
        {{"|dI_mut - dS_irr|", 0, 1, "#d62728"}, {"fit", 0, 2, "#7f7f7f"}},
        "collision scaling, slope " + detail::format_double(sc.slope));
    detail::write_file(dir / "protocol_scaling.svg", svg);
    artifacts.push_back("protocol_scaling.svg");
  }
  return artifacts;
}

// ---- cnot-flux ---------------------------------------------------------------------

inline std::vector<std::string> run_cnot_flux(const CnotFluxConfig& c,
                                              const fs::path& dir,
                                              bool emit_svg) {
  const lindblad::MasterEquation me = models::cnot_master_equation(c.params);
  const std::vector<double> grid =
      detail::linspace(c.t_min, c.t_max, c.samples);
  std::cerr << "cnot-flux: skipping boundary [0, " << c.t_min
            << "): rates diverge on the pure initial state\n";

  // State at t_min for the flux sweep.
  const qcore::QState rho0 = qcore::state_from_bloch(
      {c.params.r0, c.params.theta0, c.params.phi0});
  lindblad::Trajectory lead =
      lindblad::evolve(me, rho0, 0.0, c.t_min, c.rk4_step);
  const std::vector<thermoflux::FluxSample> flux = thermoflux::flux_trajectory(
      me, lead.states.back(), grid, c.rk4_step);

  // Distance trajectory of the antipodal +/-z pair on the same grid.
  const qcore::QState up = qcore::state_from_bloch({1.0, 0.0, 0.0});
  const qcore::QState down = qcore::state_from_bloch({1.0, M_PI, 0.0});
  lindblad::Trajectory up_lead =
      lindblad::evolve(me, up, 0.0, c.t_min, c.rk4_step);
  lindblad::Trajectory down_lead =
      lindblad::evolve(me, down, 0.0, c.t_min, c.rk4_step);
  const std::vector<measures::DistancePoint> dist =
      measures::distance_trajectory(me, up_lead.states.back(),
                                    down_lead.states.back(), grid, c.rk4_step);

  Table t;
  t.columns = {"t",     "F_Cx",  "F_dep_x", "F_dep_y", "F_dep_z",
               "F_x",   "F_dep", "F_total", "D",       "dD_dt"};
  for (std::size_t i = 0; i < flux.size(); ++i) {
    const auto& pc = flux[i].per_channel;
    const double f_cx = pc[0].flux, f_dx = pc[1].flux, f_dy = pc[2].flux,
                 f_dz = pc[3].flux;
    t.add_row({flux[i].t, f_cx, f_dx, f_dy, f_dz, f_cx + f_dx,
               f_dx + f_dy + f_dz, flux[i].total_flux, dist[i].d,
               dist[i].dd_dt});
  }
  write_csv(dir / "cnot_flux.csv", t);
  std::vector<std::string> artifacts{"cnot_flux.csv"};

  if (emit_svg) {
    const std::string svg = to_svg_lines(
        t,
        {{"F_Cx", 0, 1, "#000000"},
         {"F_x", 0, 5, "#9467bd"},
         {"F_dep", 0, 6, "#7f7f7f"},
         {"F_total", 0, 7, "#d62728"}},
        "information flux, a = " + detail::format_double(c.params.a) +
            ", gamma/J = " +
            detail::format_double(c.params.gamma / c.params.j_coupling));
    detail::write_file(dir / "cnot_flux.svg", svg);
    artifacts.push_back("cnot_flux.svg");
  }
  return artifacts;
}

// ---- phase-diagram -------------------------------------------------------------------

inline std::vector<std::string> run_phase_diagram(const PhaseDiagramConfig& c,
                                                  const fs::path& dir,
                                                  bool emit_svg, int jobs) {
  const std::vector<double> a_grid = detail::linspace(c.a_min, c.a_max, c.a_cells);
  const std::vector<double> g_grid =
      detail::linspace(c.gamma_min, c.gamma_max, c.gamma_cells);
  const divisibility::PhaseDiagram pd = divisibility::phase_diagram(
      a_grid, g_grid, c.time_samples, c.j, c.spot_check_stride, jobs);

  Table t;
  t.columns = {"a", "gamma_over_j", "class", "min_rate", "min_pairwise_rate",
               "t_worst"};
  for (std::size_t ia = 0; ia < a_grid.size(); ++ia) {
    for (std::size_t ig = 0; ig < g_grid.size(); ++ig) {
      const auto& cell = pd.cells[ia * g_grid.size() + ig];
      t.add_row({a_grid[ia], g_grid[ig],
                 std::string(divisibility::to_string(cell.label)),
                 cell.worst_cp.value, cell.worst_p.value, cell.worst_p.t});
    }
  }
  write_csv(dir / "phase_diagram.csv", t);
  std::vector<std::string> artifacts{"phase_diagram.csv"};

  if (emit_svg) {
    std::vector<std::string> colors;
    colors.reserve(t.rows.size());
    for (const auto& row : t.rows) {
      const std::string& label = std::get<std::string>(row[2]);
      colors.push_back(label == "PD0"   ? "#d62728"
                       : label == "PD1" ? "#1f77b4"
                                        : "#2ca02c");
    }
    const std::string svg =
        to_svg_cells(t, 0, 1, colors,
                     "divisibility classes (red PD0, blue PD1, green PD2)");
    detail::write_file(dir / "phase_diagram.svg", svg);
    artifacts.push_back("phase_diagram.svg");
  }
  return artifacts;
}

// ---- blp ------------------------------------------------------------------------------

inline std::vector<std::string> run_blp(const BlpConfig& c, const fs::path& dir,
                                        bool emit_svg, int jobs) {
  Table t;
  t.columns = {"gamma_over_j", "blp_value", "theta", "phi"};
  for (double g : c.gammas) {
    models::CnotParams p;
    p.a = c.a;
    p.j_coupling = c.j;
    p.gamma = g * c.j;
    const lindblad::MasterEquation me = models::cnot_master_equation(p);
    const double horizon = c.horizon_factor / p.gamma;
    const int n = std::max(2, static_cast<int>(std::round(horizon / c.output_step)) + 1);
    const std::vector<double> grid = detail::linspace(0.0, horizon, n);
    measures::BlpResult res = [&]() {
      if (c.optimize) {
        return measures::blp_optimize(me, {c.n_theta, c.n_phi}, grid,
                                      c.rk4_step, jobs);
      }
      const qcore::QState r1 = qcore::state_from_bloch({1.0, c.theta, c.phi});
      const qcore::QState r2 =
          qcore::state_from_bloch({1.0, M_PI - c.theta,
                                   std::fmod(c.phi + M_PI, 2.0 * M_PI)});
      return measures::blp_measure(me, r1, r2, grid, c.rk4_step);
    }();
    const qcore::BlochVector best = qcore::bloch_from_state(res.rho1);
    t.add_row({g, res.value, best.theta, best.phi});
  }
  write_csv(dir / "blp.csv", t);
  std::vector<std::string> artifacts{"blp.csv"};

  if (emit_svg) {
    const std::string svg = to_svg_lines(
        t, {{"BLP", 0, 1, "#d62728"}},
        "trace-distance revival measure vs gamma/J, a = " +
            detail::format_double(c.a));
    detail::write_file(dir / "blp.svg", svg);
    artifacts.push_back("blp.svg");
  }
  return artifacts;
}

// ---- simulate ---------------------------------------------------------------------------

inline std::vector<std::string> run_simulate(const SimulateConfig& c,
                                             const fs::path& dir,
                                             bool emit_svg) {
  const int steps = std::max(
      1, static_cast<int>(std::ceil((c.t1 - c.t0) / c.step - 1e-12)));
  const int rec = steps / c.output_stride + 1;
  std::vector<double> grid;
  grid.reserve(rec);
  for (int i = 0; i <= steps; i += c.output_stride) {
    grid.push_back(c.t0 + (c.t1 - c.t0) * i / steps);
  }
  if (grid.back() < c.t1 - 1e-12) grid.push_back(c.t1);

  const qcore::QState rho0(c.initial_state);
  const std::vector<thermoflux::FluxSample> flux =
      thermoflux::flux_trajectory(c.equation, rho0, grid, c.step);
  const lindblad::Trajectory traj =
      lindblad::evolve_on_grid(c.equation, rho0, grid, c.step);

  Table t;
  t.columns = {"t", "entropy"};
  for (const auto& ch : c.equation.channels) {
    t.columns.push_back("Q_" + ch.label);
    t.columns.push_back("S_" + ch.label);
    t.columns.push_back("F_" + ch.label);
  }
  t.columns.push_back("F_total");
  t.columns.push_back("cumulative_heat");
  t.columns.push_back("cumulative_entropy_production");
  const bool qubit = c.equation.dim == 2;
  if (qubit) {
    t.columns.push_back("bloch_x");
    t.columns.push_back("bloch_y");
    t.columns.push_back("bloch_z");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::variant<double, std::string>> row;
    row.emplace_back(flux[i].t);
    row.emplace_back(qcore::von_neumann_entropy(traj.states[i]));
    for (const auto& cf : flux[i].per_channel) {
      row.emplace_back(cf.heat_rate);
      row.emplace_back(cf.entropy_rate);
      row.emplace_back(cf.flux);
    }
    row.emplace_back(flux[i].total_flux);
    row.emplace_back(flux[i].cumulative_heat);
    row.emplace_back(flux[i].cumulative_entropy_production);
    if (qubit) {
      const Eigen::Vector3d v =
          qcore::detail::bloch_components(traj.states[i].matrix());
      row.emplace_back(v[0]);
      row.emplace_back(v[1]);
      row.emplace_back(v[2]);
    }
    t.add_row(std::move(row));
  }
  write_csv(dir / "simulate_trajectory.csv", t);
  std::vector<std::string> artifacts{"simulate_trajectory.csv"};

  if (emit_svg) {
    const std::size_t total_col = 2 + 3 * c.equation.channels.size();
    const std::string svg = to_svg_lines(
        t, {{"entropy", 0, 1, "#1f77b4"}, {"F_total", 0, total_col, "#d62728"}},
        "trajectory entropy and total flux");
    detail::write_file(dir / "simulate_trajectory.svg", svg);
    artifacts.push_back("simulate_trajectory.svg");
  }
  return artifacts;
}

// ---- dispatcher -----------------------------------------------------------------------

/// Execute a parsed run: compute, write artifacts and the manifest into
/// out_dir, and return the artifact list.
inline std::vector<std::string> run(const RunConfig& rc,
                                    const fs::path& out_dir, bool emit_svg,
                                    int jobs) {
  fs::create_directories(out_dir);
  std::vector<std::string> artifacts;
  const bool svg = emit_svg || rc.emit_svg;
  if (const auto* p = std::get_if<ProtocolConfig>(&rc.payload)) {
    artifacts = run_protocol(*p, out_dir, svg);
  } else if (const auto* p2 = std::get_if<CnotFluxConfig>(&rc.payload)) {
    artifacts = run_cnot_flux(*p2, out_dir, svg);
  } else if (const auto* p3 = std::get_if<PhaseDiagramConfig>(&rc.payload)) {
    artifacts = run_phase_diagram(*p3, out_dir, svg, jobs);
  } else if (const auto* p4 = std::get_if<BlpConfig>(&rc.payload)) {
    artifacts = run_blp(*p4, out_dir, svg, jobs);
  } else if (const auto* p5 = std::get_if<SimulateConfig>(&rc.payload)) {
    artifacts = run_simulate(*p5, out_dir, svg);
  }
  write_manifest(out_dir, rc.command, rc.config_hash, artifacts);
  return artifacts;
}

}  // namespace fluxlab::cli
