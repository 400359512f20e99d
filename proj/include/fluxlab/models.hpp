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

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fluxlab/lindblad.hpp"
#include "fluxlab/qcore.hpp"
#include "fluxlab/thermoflux.hpp"

// The two reference models shipped with the library.
//
// 1. Virtual-qubit contact: a two-level system exchanging an excitation with
//    a resonant two-level slice of a thermal reservoir, one short collision
//    per run. Exact collision unitaries and the first-order closed forms are
//    provided side by side.
//
// 2. Control/target qubit pair coupled by a CNOT-type interaction with
//    isotropic depolarizing noise on the target. The reduced target dynamics
//    has a time-varying x-channel rate that can turn negative; closed-form
//    states and fluxes plus a brute-force two-qubit oracle are provided.

namespace fluxlab::models {

using lindblad::Channel;
using lindblad::MasterEquation;
using qcore::Complex;
using qcore::Dims;
using qcore::HermitianOp;
using qcore::Matrix;
using qcore::QState;
using thermoflux::ChannelFlux;
using thermoflux::FluxSample;

// =============================================================================
// Virtual-qubit protocol
// =============================================================================

/// Parameters of one protocol run. q1_frac and q0_frac are the environment
/// populations of the virtual levels (q1/Z, q0/Z); their ratio must satisfy
/// the Boltzmann factor exp(-beta (e_a - e_b)) within 1e-10.
struct ProtocolParams {
  double e_a = 1.0;
  double e_b = 0.0;
  double p_a = 0.8;
  double beta = 1.0;
  double q1_frac = 0.3 * 0.36787944117144233;  // 0.3 * e^{-1}
  double q0_frac = 0.3;
  double gamma = 1.0;
  double dt = 1e-2;
};

struct ProtocolReport {
  double dQ = 0.0;      // heat absorbed by the system
  double dS_sys = 0.0;  // nats
  double dS_env = 0.0;
  double dI_mut = 0.0;
  double dS_irr = 0.0;
  double p_z = 0.0;  // population transfer rate
};

namespace detail {

inline void validate_protocol(const ProtocolParams& p, bool need_interior) {
  if (!(p.e_a > p.e_b)) {
    throw InvalidPopulations("protocol: e_a must exceed e_b");
  }
  if (!(p.beta > 0.0)) {
    throw InvalidPopulations("protocol: beta must be positive");
  }
  if (!(p.p_a >= 0.0 && p.p_a <= 1.0)) {
    throw InvalidPopulations("protocol: p_a outside [0, 1]");
  }
  if (!(p.q1_frac > 0.0 && p.q0_frac > 0.0 &&
        p.q1_frac + p.q0_frac <= 1.0 + 1e-12)) {
    throw InvalidPopulations(
        "protocol: virtual populations must be positive and sum to <= 1");
  }
  const double want = std::exp(-p.beta * (p.e_a - p.e_b));
  if (std::abs(p.q1_frac / p.q0_frac - want) > 1e-10) {
    throw InvalidPopulations("protocol: q1/q0 ratio " +
                             std::to_string(p.q1_frac / p.q0_frac) +
                             " violates the Boltzmann factor " +
                             std::to_string(want));
  }
  if (!(p.gamma > 0.0) || !(p.dt > 0.0)) {
    throw InvalidPopulations("protocol: gamma and dt must be positive");
  }
  if (need_interior && (p.p_a <= 0.0 || p.p_a >= 1.0)) {
    throw DegeneratePopulation("protocol: p_a in {0, 1} makes ln(p_a/p_b) "
                               "singular");
  }
}

}  // namespace detail

/// The joint system+environment arena: the environment is the virtual qubit
/// plus, when q1+q0 < 1, one redundant level carrying the leftover weight.
/// The environment Hamiltonian is chosen so its thermal state at beta has
/// exactly the requested populations, which also puts the virtual gap on
/// resonance with the system.
struct ProtocolArena {
  QState rho0;        // joint initial product state
  Matrix h_total;     // system + environment + contact
  HermitianOp h_sys;  // 2x2
  HermitianOp h_env;  // 2x2 or 3x3
  Dims dims;          // {2, env dim}
};

/// Build the joint arena with an explicit contact coupling (the matrix
/// element of the excitation-exchange term).
inline ProtocolArena protocol_arena(const ProtocolParams& p, double coupling) {
  detail::validate_protocol(p, false);
  const double redundant = 1.0 - p.q1_frac - p.q0_frac;
  const bool has_redundant = redundant > 1e-12;
  const Eigen::Index ne = has_redundant ? 3 : 2;

  Matrix h_sys = Matrix::Zero(2, 2);
  h_sys(0, 0) = p.e_a;  // basis order (|a>, |b>) for the system
  h_sys(1, 1) = p.e_b;

  // Environment basis order (|1>, |0>[, redundant]).
  Matrix h_env = Matrix::Zero(ne, ne);
  h_env(0, 0) = -std::log(p.q1_frac) / p.beta;
  h_env(1, 1) = -std::log(p.q0_frac) / p.beta;
  if (has_redundant) h_env(2, 2) = -std::log(redundant) / p.beta;

  Matrix h_int = Matrix::Zero(2 * ne, 2 * ne);
  // |b><a| (x) |1><0| and its conjugate; joint index = sys*ne + env.
  h_int(1 * ne + 0, 0 * ne + 1) = coupling;
  h_int(0 * ne + 1, 1 * ne + 0) = coupling;

  Matrix h = qcore::kron(h_sys, qcore::identity(ne)) +
             qcore::kron(qcore::identity(2), h_env) + h_int;

  Matrix rho_sys = Matrix::Zero(2, 2);
  rho_sys(0, 0) = p.p_a;
  rho_sys(1, 1) = 1.0 - p.p_a;
  Matrix rho_env = Matrix::Zero(ne, ne);
  rho_env(0, 0) = p.q1_frac;
  rho_env(1, 1) = p.q0_frac;
  if (has_redundant) rho_env(2, 2) = redundant;

  ProtocolArena arena{QState(qcore::kron(rho_sys, rho_env)), std::move(h),
                      HermitianOp(h_sys), HermitianOp(h_env),
                      Dims{2, ne}};
  return arena;
}

/// Exact unitary evolution of the arena for a time span (eigendecomposition
/// of the constant joint Hamiltonian, no stepping error).
inline QState protocol_evolve(const ProtocolArena& arena, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(arena.h_total);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases[i] = std::exp(Complex(0.0, -es.eigenvalues()[i] * t));
  }
  const Matrix u =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return QState(u * arena.rho0.matrix() * u.adjoint());
}

/// One exact collision of length dt. The contact coupling is sqrt(gamma/dt),
/// so that repeated collisions implement an excitation exchange at rate
/// gamma: the resonant subspace rotates by angle sqrt(gamma dt) per run and
/// populations move linearly in dt.
inline ProtocolReport protocol_exact_step(const ProtocolParams& p) {
  detail::validate_protocol(p, false);
  const ProtocolArena arena = protocol_arena(p, std::sqrt(p.gamma / p.dt));
  const QState rho_t = protocol_evolve(arena, p.dt);

  const QState sys_t = qcore::partial_trace(rho_t, arena.dims, qcore::Keep::A);
  const QState env_t = qcore::partial_trace(rho_t, arena.dims, qcore::Keep::B);
  const QState sys_0 =
      qcore::partial_trace(arena.rho0, arena.dims, qcore::Keep::A);
  const QState env_0 =
      qcore::partial_trace(arena.rho0, arena.dims, qcore::Keep::B);

  ProtocolReport r;
  r.dQ = ((sys_t.matrix() - sys_0.matrix()) * arena.h_sys.matrix)
             .trace()
             .real();
  r.dS_sys =
      qcore::von_neumann_entropy(sys_t) - qcore::von_neumann_entropy(sys_0);
  r.dS_env =
      qcore::von_neumann_entropy(env_t) - qcore::von_neumann_entropy(env_0);
  r.dI_mut = qcore::mutual_information(rho_t, arena.dims);
  r.dS_irr = r.dS_sys - p.beta * r.dQ;
  r.p_z = (p.p_a - sys_t.matrix()(0, 0).real()) / p.dt;
  return r;
}

/// First-order closed forms of the same collision.
inline ProtocolReport protocol_first_order(const ProtocolParams& p) {
  detail::validate_protocol(p, true);
  const double p_b = 1.0 - p.p_a;
  ProtocolReport r;
  r.p_z = (p.p_a * p.q0_frac - p_b * p.q1_frac) * p.gamma;
  const double x = r.p_z * p.dt;
  r.dQ = -(p.e_a - p.e_b) * x;
  r.dS_sys = std::log(p.p_a / p_b) * x;
  r.dS_env = -std::log(p.q1_frac / p.q0_frac) * x;
  r.dS_irr = r.dS_sys - p.beta * r.dQ;
  r.dI_mut = r.dS_irr;  // equal at first order
  return r;
}

struct ScalingResult {
  double slope = 0.0;
  bool no_signal = false;
  /// (dt, |dI_mut - dS_irr|) pairs actually measured.
  std::vector<std::pair<double, double>> points;
};

/// Least-squares slope of log|dI_mut - dS_irr| against log dt over the
/// supplied collision lengths. Reports no_signal when every difference sits
/// at the floating-point noise floor (detailed-balance inputs).
inline ScalingResult protocol_scaling_study(const ProtocolParams& base,
                                            const std::vector<double>& dts) {
  if (dts.size() < 4) {
    throw Error("protocol_scaling_study: need at least 4 step sizes");
  }
  double lo = dts.front(), hi = dts.front();
  for (double d : dts) {
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (hi / lo < 99.0) {
    throw Error("protocol_scaling_study: steps must span >= 2 decades");
  }
  ScalingResult res;
  for (double dt : dts) {
    ProtocolParams p = base;
    p.dt = dt;
    const ProtocolReport r = protocol_exact_step(p);
    res.points.emplace_back(dt, std::abs(r.dI_mut - r.dS_irr));
  }
  double max_diff = 0.0;
  for (const auto& [dt, d] : res.points) max_diff = std::max(max_diff, d);
  if (max_diff < 1e-13) {
    res.no_signal = true;
    return res;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(res.points.size());
  for (const auto& [dt, d] : res.points) {
    const double x = std::log(dt), y = std::log(std::max(d, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return res;
}

// =============================================================================
// CNOT control/target model
// =============================================================================

/// a: control excited population; gamma: depolarizing rate; j_coupling: the
/// interaction energy scale; (r0, theta0, phi0): initial target Bloch
/// coordinates (default: the excited state).
struct CnotParams {
  double a = 0.3;
  double gamma = 0.1;
  double j_coupling = 1.0;
  double theta0 = 0.0;
  double phi0 = 0.0;
  double r0 = 1.0;
};

inline constexpr double kCnotDefaultTMin = 0.01;

namespace detail {

inline void validate_cnot(const CnotParams& p) {
  if (!(p.a >= 0.0 && p.a <= 1.0)) {
    throw InvalidPopulations("cnot: a outside [0, 1]");
  }
  if (!(p.r0 >= 0.0 && p.r0 <= 1.0)) {
    throw InvalidPopulations("cnot: r0 outside [0, 1]");
  }
  if (!(p.gamma >= 0.0) || !(p.j_coupling > 0.0)) {
    throw InvalidPopulations("cnot: need gamma >= 0 and j_coupling > 0");
  }
}

inline double radius_sq(double u, double a) {
  const double c = a * (1.0 - a);
  return (1.0 - a) * (1.0 - a) + 2.0 * c * std::cos(u) + a * a;
}

}  // namespace detail

/// Control-induced x-channel rate a(1-a) J sin(Jt) / r^2(t).
inline double cnot_rate_cx(double t, double a, double j = 1.0) {
  const double u = j * t;
  const double r2 = detail::radius_sq(u, a);
  if (r2 < 1e-14) {
    throw SingularRadius("cnot_rate_cx: r^2(t) vanished at Jt = " +
                         std::to_string(u));
  }
  return a * (1.0 - a) * j * std::sin(u) / r2;
}

/// Effective x drive (J / 2 r^2)(a^2 + a(1-a) cos(Jt)).
inline double cnot_drive(double t, double a, double j = 1.0) {
  const double u = j * t;
  const double r2 = detail::radius_sq(u, a);
  if (r2 < 1e-14) {
    throw SingularRadius("cnot_drive: r^2(t) vanished at Jt = " +
                         std::to_string(u));
  }
  return 0.5 * j * (a * a + a * (1.0 - a) * std::cos(u)) / r2;
}

/// Peak of |cnot_rate_cx| over time: c J / sqrt(1 - 4c) with c = a(1-a).
/// Diverges at a = 1/2 where the reduced map becomes non-invertible.
inline double cnot_amplitude_cx(double a, double j = 1.0) {
  const double c = a * (1.0 - a);
  const double d = 1.0 - 4.0 * c;
  if (d <= 0.0) return qcore::kInfinity;
  return c * j / std::sqrt(d);
}

/// The reduced target-qubit master equation: x drive plus four channels.
/// The x dissipation is split into the control-induced part ("C,x") and the
/// depolarizing part ("dep,x") so their fluxes are separately reportable;
/// all channels sit at infinite temperature (beta = 0).
inline MasterEquation cnot_master_equation(const CnotParams& p) {
  detail::validate_cnot(p);
  const double a = p.a, j = p.j_coupling, g = p.gamma;
  MasterEquation me;
  me.dim = 2;
  me.hamiltonian = [a, j](double t) -> Matrix {
    return cnot_drive(t, a, j) * qcore::sigma_x();
  };
  me.channels.push_back(lindblad::make_channel(
      "C,x", qcore::sigma_x(),
      [a, j](double t) { return 0.5 * cnot_rate_cx(t, a, j); }, 0.0));
  me.channels.push_back(lindblad::make_channel(
      "dep,x", qcore::sigma_x(), [g](double) { return 0.5 * g; }, 0.0));
  me.channels.push_back(lindblad::make_channel(
      "dep,y", qcore::sigma_y(), [g](double) { return 0.5 * g; }, 0.0));
  me.channels.push_back(lindblad::make_channel(
      "dep,z", qcore::sigma_z(), [g](double) { return 0.5 * g; }, 0.0));
  return me;
}

namespace detail {

inline Eigen::Vector3d cnot_initial_components(const CnotParams& p) {
  return Eigen::Vector3d{p.r0 * std::sin(p.theta0) * std::cos(p.phi0),
                         p.r0 * std::sin(p.theta0) * std::sin(p.phi0),
                         p.r0 * std::cos(p.theta0)};
}

/// Bloch map of the reduced dynamics: uniform depolarizing contraction times
/// the control-population mixture of a rotation about x and the identity.
inline Eigen::Vector3d cnot_bloch_map(const CnotParams& p, double t,
                                      const Eigen::Vector3d& v0) {
  const double u = p.j_coupling * t;
  const double c = std::cos(u), s = std::sin(u);
  Eigen::Vector3d rotated{v0[0], c * v0[1] - s * v0[2], s * v0[1] + c * v0[2]};
  return std::exp(-2.0 * p.gamma * t) *
         (p.a * rotated + (1.0 - p.a) * v0);
}

/// Geometry factor of the transverse plane: the initial y-z weight.
inline double cnot_transverse_weight(const CnotParams& p) {
  const double st = std::sin(p.theta0), ct = std::cos(p.theta0);
  const double sp = std::sin(p.phi0);
  return ct * ct + st * st * sp * sp;
}

}  // namespace detail

/// Closed-form reduced target state at time t.
inline QState cnot_analytic_state(const CnotParams& p, double t) {
  detail::validate_cnot(p);
  const Eigen::Vector3d v =
      detail::cnot_bloch_map(p, t, detail::cnot_initial_components(p));
  return QState(qcore::detail::state_from_components(v));
}

/// Bloch radius of the closed-form state: r0 e^{-2 gamma t} rtilde(t).
inline double cnot_analytic_radius(const CnotParams& p, double t) {
  const double u = p.j_coupling * t;
  const double w = detail::cnot_transverse_weight(p);
  const double st = std::sin(p.theta0), cp = std::cos(p.phi0);
  const double rtilde =
      std::sqrt(w * detail::radius_sq(u, p.a) + st * st * cp * cp);
  return p.r0 * std::exp(-2.0 * p.gamma * t) * rtilde;
}

/// The full two-qubit master equation behind the reduced model: the CNOT
/// interaction Hamiltonian on control (x) target, with the depolarizing
/// channels acting on the target factor only.
inline MasterEquation cnot_pair_equation(const CnotParams& p) {
  detail::validate_cnot(p);
  const Matrix id2 = qcore::identity(2);
  Matrix p1 = Matrix::Zero(2, 2);
  p1(1, 1) = 1.0;  // |1><1| on the control
  Matrix p0 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  const Matrix h = 0.5 * p.j_coupling *
                   (qcore::kron(p1, qcore::sigma_x()) + qcore::kron(p0, id2));
  MasterEquation me;
  me.dim = 4;
  me.hamiltonian = [h](double) { return h; };
  const double g = p.gamma;
  me.channels.push_back(lindblad::make_channel(
      "dep,x", qcore::kron(id2, qcore::sigma_x()),
      [g](double) { return 0.5 * g; }, 0.0));
  me.channels.push_back(lindblad::make_channel(
      "dep,y", qcore::kron(id2, qcore::sigma_y()),
      [g](double) { return 0.5 * g; }, 0.0));
  me.channels.push_back(lindblad::make_channel(
      "dep,z", qcore::kron(id2, qcore::sigma_z()),
      [g](double) { return 0.5 * g; }, 0.0));
  return me;
}

/// Brute-force oracle: integrate the full two-qubit master equation and
/// trace out the control. Independent of every closed form above.
inline QState cnot_full_pair_oracle(const CnotParams& p, const QState& rho_c,
                                    const QState& rho_t, double t,
                                    double step = lindblad::kDefaultStep) {
  if (rho_c.dim() != 2 || rho_t.dim() != 2) {
    throw DimMismatch("cnot_full_pair_oracle: both factors must be qubits");
  }
  const MasterEquation me = cnot_pair_equation(p);
  const QState joint(qcore::kron(rho_c.matrix(), rho_t.matrix()));
  if (t == 0.0) return qcore::partial_trace(joint, Dims{2, 2}, qcore::Keep::B);
  const lindblad::Trajectory traj = lindblad::evolve(me, joint, 0.0, t, step);
  return qcore::partial_trace(traj.states.back(), Dims{2, 2}, qcore::Keep::B);
}

/// Control state a|1><1| + (1-a)|0><0|.
inline QState cnot_control_state(double a) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0 - a;
  m(1, 1) = a;
  return QState(m);
}

/// Closed-form per-channel heat and entropy rates and fluxes at time t,
/// assembled from the Bloch radius and angles of the analytic state. The
/// total flux is d/dt(radius) * artanh(radius); it must agree with the sum
/// of the per-channel entries.
inline FluxSample cnot_analytic_fluxes(const CnotParams& p, double t) {
  detail::validate_cnot(p);
  const double radius = cnot_analytic_radius(p, t);
  if (radius >= 1.0 - 1e-12) {
    throw SingularAtPureState(
        "cnot_analytic_fluxes: Bloch radius " + std::to_string(radius) +
        " at t = " + std::to_string(t) + "; rates diverge on pure states");
  }

  const double u = p.j_coupling * t;
  const double g = p.gamma;
  const double gcx = cnot_rate_cx(t, p.a, p.j_coupling);
  const double drive = cnot_drive(t, p.a, p.j_coupling);
  const double decay = std::exp(-2.0 * g * t);

  const double b_factor = 2.0 * radius * std::atanh(radius);

  // Direction cosines of the current Bloch vector; each channel's entropy
  // rate weighs the two components it damps.
  const Eigen::Vector3d v =
      detail::cnot_bloch_map(p, t, detail::cnot_initial_components(p));
  const double rad2 = radius * radius;
  const double vx = v[0];  // = r0 sin(theta0) cos(phi0) e^{-2 gamma t}
  const double s2c2 = rad2 > 0 ? (v[0] * v[0]) / rad2 : 0.0;  // sin^2 cos^2
  const double sy2 = rad2 > 0 ? (v[1] * v[1]) / rad2 : 0.0;   // sin^2 sin^2
  const double cz2 = rad2 > 0 ? (v[2] * v[2]) / rad2 : 0.0;   // cos^2 theta

  FluxSample s;
  s.t = t;
  const double es_x = (1.0 - s2c2) * b_factor;
  const double es_y = (s2c2 + cz2) * b_factor;
  const double es_z = (s2c2 + sy2) * b_factor;  // sin^2(theta) = s2c2 + sy2

  const double heat_y = -g * vx * drive;

  s.per_channel.push_back(ChannelFlux{"C,x", 0.0, 0.5 * gcx * es_x,
                                      -0.5 * gcx * es_x});
  s.per_channel.push_back(
      ChannelFlux{"dep,x", 0.0, 0.5 * g * es_x, -0.5 * g * es_x});
  s.per_channel.push_back(
      ChannelFlux{"dep,y", heat_y, 0.5 * g * es_y, -0.5 * g * es_y});
  s.per_channel.push_back(
      ChannelFlux{"dep,z", heat_y, 0.5 * g * es_z, -0.5 * g * es_z});

  double total = 0.0;
  for (const auto& cf : s.per_channel) total += cf.flux;
  s.total_flux = total;

  // Cross-check against the radius form of the total flux.
  const double w = detail::cnot_transverse_weight(p);
  const double st = std::sin(p.theta0), cp = std::cos(p.phi0);
  const double rtilde2 = w * detail::radius_sq(u, p.a) + st * st * cp * cp;
  const double rtilde = std::sqrt(rtilde2);
  const double drtilde =
      rtilde > 1e-300
          ? (-w * p.a * (1.0 - p.a) * p.j_coupling * std::sin(u)) / rtilde
          : 0.0;
  const double dradius = p.r0 * decay * (drtilde - 2.0 * g * rtilde);
  const double total_radius_form = dradius * std::atanh(radius);
  if (std::abs(total - total_radius_form) >
      1e-10 * std::max(1.0, std::abs(total))) {
    throw Error("cnot_analytic_fluxes: channel sum and radius form disagree: " +
                std::to_string(total) + " vs " +
                std::to_string(total_radius_form));
  }
  return s;
}

}  // namespace fluxlab::models
