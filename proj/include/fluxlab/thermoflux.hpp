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
#include <string>
#include <vector>

#include "fluxlab/lindblad.hpp"
#include "fluxlab/qcore.hpp"

// Thermodynamic functionals for open-system dynamics: nonequilibrium
// information, extractable work, per-channel heat and entropy rates, the
// information flux through each interaction channel, entropy production,
// and the bipartite identity linking entropy production to
// system-environment correlations.
//
// Sign conventions: heat is positive flowing INTO the system; a positive
// information flux means information is returning to the system.

namespace fluxlab::thermoflux {

using lindblad::Channel;
using lindblad::MasterEquation;
using qcore::Dims;
using qcore::HermitianOp;
using qcore::Matrix;
using qcore::QState;

/// Per-channel instantaneous rates at one time sample.
struct ChannelFlux {
  std::string label;
  double heat_rate = 0.0;     // energy / time
  double entropy_rate = 0.0;  // 1 / time
  double flux = 0.0;          // 1 / time
};

/// One record of the flux trajectory. total_flux is accumulated over the
/// channels in declaration order; cumulative integrals use the trapezoid
/// rule on the output grid, starting from the first grid point.
struct FluxSample {
  double t = 0.0;
  std::vector<ChannelFlux> per_channel;
  double total_flux = 0.0;
  double cumulative_heat = 0.0;
  double cumulative_entropy_production = 0.0;
};

struct EnergeticsReport {
  double delta_I_neq = 0.0;
  double delta_S_irr = 0.0;
  double irr_work_over_kT = 0.0;
  /// delta_I_neq + delta_S_irr - irr_work_over_kT; zero up to quadrature.
  double residual = 0.0;
};

struct BipartiteReport {
  double delta_S_irr = 0.0;
  double mutual_info = 0.0;
  double env_neq_t = 0.0;
  double env_neq_0 = 0.0;
};

// ---- state functionals --------------------------------------------------------

/// Information encoded in rho relative to the thermal state of h at inverse
/// temperature beta: S(rho || exp(-beta h)/Z) >= 0. Finite for every input
/// because the Gibbs state is full rank.
inline double neq_information(const QState& rho, const HermitianOp& h,
                              double beta) {
  return qcore::relative_entropy(rho, qcore::gibbs_state(h, beta).state);
}

/// Maximal average extractable work (1/beta) S(rho || rho_eq). Cross-checked
/// against the free-energy difference F(rho) - F(rho_eq); the two evaluations
/// must agree within 1e-10.
inline double extractable_work(const QState& rho, const HermitianOp& h,
                               double beta) {
  if (beta == 0.0) {
    throw InfiniteTemperature(
        "extractable_work: beta = 0 has no finite work scale");
  }
  const qcore::GibbsState eq = qcore::gibbs_state(h, beta);
  const double w_rel = qcore::relative_entropy(rho, eq.state) / beta;
  const double mean_h = (rho.matrix() * h.matrix).trace().real();
  const double f_rho = mean_h - qcore::von_neumann_entropy(rho) / beta;
  const double f_eq = -eq.log_partition / beta;
  const double w_free = f_rho - f_eq;
  if (std::isfinite(w_rel) && std::abs(w_rel - w_free) > 1e-10) {
    throw Error("extractable_work: route disagreement " +
                std::to_string(w_rel - w_free));
  }
  return w_rel;
}

// ---- per-channel rates ----------------------------------------------------------

/// gamma(t) Tr( dissipator{rho} . H ).
inline double heat_rate_channel(const Channel& ch, double t, const QState& rho,
                                const HermitianOp& h) {
  if (h.dim() != rho.dim()) {
    throw DimMismatch("heat_rate_channel: H dim " + std::to_string(h.dim()) +
                      " != state dim " + std::to_string(rho.dim()));
  }
  const Matrix r = lindblad::dissipator(ch, rho);
  return ch.rate(t) * (r * h.matrix).trace().real();
}

/// -gamma(t) Tr( dissipator{rho} . ln rho ), with the clamped logarithm.
inline double entropy_rate_channel(const Channel& ch, double t,
                                   const QState& rho) {
  const Matrix r = lindblad::dissipator(ch, rho);
  const Matrix lg = qcore::matrix_log_clamped(rho).matrix;
  return -ch.rate(t) * (r * lg).trace().real();
}

/// Information flux through one channel,
///   gamma Tr( dissipator{rho} (ln rho + beta H) )
///     = -(entropy_rate - beta * heat_rate).
/// Computed from the rate pair so the beta = 0 case reduces to
/// -entropy_rate through the identical code path.
inline double flux_channel(const Channel& ch, double t, const QState& rho,
                           const HermitianOp& h) {
  const double er = entropy_rate_channel(ch, t, rho);
  if (ch.beta == 0.0) return -er;
  return -(er - ch.beta * heat_rate_channel(ch, t, rho, h));
}

/// Entropy production rate: sum over channels of
/// (entropy_rate - beta_ch * heat_rate). The total information flux is the
/// negative of this.
inline double entropy_production_rate(const MasterEquation& me,
                                      const QState& rho, double t) {
  const HermitianOp h(me.hamiltonian ? me.hamiltonian(t)
                                     : Matrix::Zero(me.dim, me.dim));
  double s = 0.0;
  for (const auto& ch : me.channels) s -= flux_channel(ch, t, rho, h);
  return s;
}

inline double total_flux(const MasterEquation& me, const QState& rho,
                         double t) {
  return -entropy_production_rate(me, rho, t);
}

// ---- trajectory-level reports ----------------------------------------------------

/// Evolve rho0 (the state at grid.front()) along the grid and record the
/// per-channel rates, the total flux, and the cumulative heat and entropy
/// production. On return the entropy balance
///   S(end) - S(start) = sum_ch beta_ch Q_ch + Delta S_irr
/// has been checked against the endpoint entropies within decomposition_tol.
inline std::vector<FluxSample> flux_trajectory(
    const MasterEquation& me, const QState& rho0,
    const std::vector<double>& grid, double max_step = lindblad::kDefaultStep,
    double decomposition_tol = 5e-4) {
  const lindblad::Trajectory traj =
      lindblad::evolve_on_grid(me, rho0, grid, max_step);
  const std::size_t n = grid.size();
  const std::size_t nch = me.channels.size();

  std::vector<FluxSample> out(n);
  std::vector<double> prev_q(nch, 0.0), cur_q(nch, 0.0);
  std::vector<double> cum_q_ch(nch, 0.0);
  double prev_total_q = 0.0, prev_sirr_rate = 0.0;
  double cum_q = 0.0, cum_sirr = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double t = grid[i];
    const QState& rho = traj.states[i];
    const HermitianOp h(me.hamiltonian ? me.hamiltonian(t)
                                       : Matrix::Zero(me.dim, me.dim));
    FluxSample& s = out[i];
    s.t = t;
    s.per_channel.reserve(nch);
    double total = 0.0, total_q = 0.0, sirr_rate = 0.0;
    for (std::size_t c = 0; c < nch; ++c) {
      const Channel& ch = me.channels[c];
      ChannelFlux cf;
      cf.label = ch.label;
      cf.heat_rate = heat_rate_channel(ch, t, rho, h);
      cf.entropy_rate = entropy_rate_channel(ch, t, rho);
      cf.flux = (ch.beta == 0.0)
                    ? -cf.entropy_rate
                    : -(cf.entropy_rate - ch.beta * cf.heat_rate);
      total += cf.flux;
      total_q += cf.heat_rate;
      cur_q[c] = cf.heat_rate;
      s.per_channel.push_back(std::move(cf));
    }
    sirr_rate = -total;
    if (i > 0) {
      const double h2 = 0.5 * (grid[i] - grid[i - 1]);
      cum_q += h2 * (prev_total_q + total_q);
      cum_sirr += h2 * (prev_sirr_rate + sirr_rate);
      for (std::size_t c = 0; c < nch; ++c)
        cum_q_ch[c] += h2 * (prev_q[c] + cur_q[c]);
    }
    s.total_flux = total;
    s.cumulative_heat = cum_q;
    s.cumulative_entropy_production = cum_sirr;
    prev_total_q = total_q;
    prev_sirr_rate = sirr_rate;
    std::swap(prev_q, cur_q);
  }

  // Entropy balance: reversible part + entropy production vs endpoints.
  double rev = 0.0;
  for (std::size_t c = 0; c < nch; ++c)
    rev += me.channels[c].beta * cum_q_ch[c];
  const double ds = qcore::von_neumann_entropy(traj.states.back()) -
                    qcore::von_neumann_entropy(traj.states.front());
  if (std::abs(ds - (rev + cum_sirr)) > decomposition_tol) {
    throw Error("flux_trajectory: entropy decomposition residual " +
                std::to_string(ds - (rev + cum_sirr)) +
                " exceeds tolerance; refine the grid");
  }
  return out;
}

namespace detail {

/// d/dt of the Hamiltonian by a symmetric difference; exact enough for the
/// smooth drives used here.
inline Matrix hamiltonian_derivative(const MasterEquation& me, double t,
                                     double dt = 1e-6) {
  return (me.hamiltonian(t + dt) - me.hamiltonian(t - dt)) / (2.0 * dt);
}

}  // namespace detail

/// Endpoint-based information balance over [t0, t1] for a single bath
/// temperature. Work input uses the trapezoid rule on Tr[rho dH/dt]; the
/// instantaneous-equilibrium information is evaluated from the endpoint
/// states and Hamiltonians. With dissipation channels present, the common
/// channel beta is used (mixed temperatures are an error); without channels,
/// beta_no_channels sets the reference temperature.
inline EnergeticsReport energetics_report(const MasterEquation& me,
                                          const QState& rho0, double t0,
                                          double t1,
                                          double step = lindblad::kDefaultStep,
                                          double beta_no_channels = 0.0) {
  if (!me.hamiltonian) throw Error("energetics_report: Hamiltonian required");
  double beta = beta_no_channels;
  if (!me.channels.empty()) {
    beta = me.channels.front().beta;
    for (const auto& ch : me.channels) {
      if (ch.beta != beta) {
        throw MixedTemperatures(
            "energetics_report: channels carry different beta (" +
            std::to_string(beta) + " vs " + std::to_string(ch.beta) + ")");
      }
    }
  }

  const lindblad::Trajectory traj = lindblad::evolve(me, rho0, t0, t1, step);
  const std::size_t n = traj.times.size();

  // Cumulative heat Tr[H drho/dt] and work Tr[rho dH/dt] by trapezoid.
  double heat = 0.0, work = 0.0;
  double prev_qdot = 0.0, prev_wdot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = traj.times[i];
    const Matrix h = me.hamiltonian(t);
    const Matrix dh = detail::hamiltonian_derivative(me, t);
    const Matrix drho = lindblad::rhs(me, t, traj.states[i]);
    const double qdot = (h * drho).trace().real();
    const double wdot = (traj.states[i].matrix() * dh).trace().real();
    if (i > 0) {
      const double h2 = 0.5 * (traj.times[i] - traj.times[i - 1]);
      heat += h2 * (prev_qdot + qdot);
      work += h2 * (prev_wdot + wdot);
    }
    prev_qdot = qdot;
    prev_wdot = wdot;
  }

  const HermitianOp h0(me.hamiltonian(t0));
  const HermitianOp h1(me.hamiltonian(t1));
  const qcore::GibbsState eq0 = qcore::gibbs_state(h0, beta);
  const qcore::GibbsState eq1 = qcore::gibbs_state(h1, beta);

  EnergeticsReport rep;
  rep.delta_I_neq = qcore::relative_entropy(traj.states.back(), eq1.state) -
                    qcore::relative_entropy(traj.states.front(), eq0.state);
  const double ds = qcore::von_neumann_entropy(traj.states.back()) -
                    qcore::von_neumann_entropy(traj.states.front());
  rep.delta_S_irr = ds - beta * heat;
  rep.irr_work_over_kT = beta * work + eq1.log_partition - eq0.log_partition;
  rep.residual = rep.delta_I_neq + rep.delta_S_irr - rep.irr_work_over_kT;
  return rep;
}

/// Both sides of the correlation identity for a closed bipartite evolution
/// from a product state:
///   Delta S_sys - beta Qbar = I_mut(t) + I_env(t) - I_env(0),
/// with heat defined against the environment, Qbar = -Tr[H_env drho_env].
/// Throws NotProductInitial when rho_tot_0 carries correlations, and checks
/// the identity (plus the unitarity of the total evolution) within 1e-9.
inline BipartiteReport bipartite_entropy_production(const QState& rho_tot_t,
                                                    const QState& rho_tot_0,
                                                    Dims dims,
                                                    const HermitianOp& h_env,
                                                    double beta) {
  if (rho_tot_t.dim() != dims.a * dims.b || rho_tot_0.dim() != dims.a * dims.b) {
    throw DimMismatch("bipartite_entropy_production: state dims do not match " +
                      std::to_string(dims.a) + "x" + std::to_string(dims.b));
  }
  const double mi0 = qcore::mutual_information(rho_tot_0, dims);
  if (mi0 > 1e-8) {
    throw NotProductInitial("initial mutual information " +
                            std::to_string(mi0));
  }
  const QState sys_t = qcore::partial_trace(rho_tot_t, dims, qcore::Keep::A);
  const QState sys_0 = qcore::partial_trace(rho_tot_0, dims, qcore::Keep::A);
  const QState env_t = qcore::partial_trace(rho_tot_t, dims, qcore::Keep::B);
  const QState env_0 = qcore::partial_trace(rho_tot_0, dims, qcore::Keep::B);

  const double qbar =
      -((env_t.matrix() - env_0.matrix()) * h_env.matrix).trace().real();

  BipartiteReport rep;
  rep.delta_S_irr = qcore::von_neumann_entropy(sys_t) -
                    qcore::von_neumann_entropy(sys_0) - beta * qbar;
  rep.mutual_info = qcore::mutual_information(rho_tot_t, dims);
  const qcore::GibbsState env_eq = qcore::gibbs_state(h_env, beta);
  rep.env_neq_t = qcore::relative_entropy(env_t, env_eq.state);
  rep.env_neq_0 = qcore::relative_entropy(env_0, env_eq.state);

  const double rhs_val = rep.mutual_info + rep.env_neq_t - rep.env_neq_0;
  if (std::abs(rep.delta_S_irr - rhs_val) > 1e-9) {
    throw Error("bipartite_entropy_production: identity residual " +
                std::to_string(rep.delta_S_irr - rhs_val) +
                " (is the total evolution unitary?)");
  }
  return rep;
}

}  // namespace fluxlab::thermoflux
