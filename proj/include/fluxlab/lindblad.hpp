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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fluxlab/qcore.hpp"

// Time-dependent Lindblad master equations: generator evaluation, fixed-step
// RK4 trajectory integration, and accumulation of the dynamical map as a
// superoperator on column-stacked operators.

namespace fluxlab::lindblad {

using qcore::Complex;
using qcore::Matrix;
using qcore::QState;

using RateFn = std::function<double(double)>;
using HamiltonianFn = std::function<Matrix(double)>;

/// Default integrator step, in model time units.
inline constexpr double kDefaultStep = 1e-3;
/// Eigenvalues below this are treated as a genuinely nonpositive evolution.
inline constexpr double kPositivityFloor = 1e-6;
/// Trace-preservation tolerance for accumulated process maps.
inline constexpr double kTracePreservingTol = 1e-8;

/// One dissipation channel: jump operator pair (a_i, a_j), a possibly
/// negative time-dependent rate, and the inverse temperature assigned to
/// the channel (beta = 0 for an infinite-temperature bath).
struct Channel {
  std::string label;
  Matrix a_i;
  Matrix a_j;
  RateFn rate;
  double beta = 0.0;
};

inline Channel make_channel(std::string label, const Matrix& jump, RateFn rate,
                            double beta = 0.0) {
  return Channel{std::move(label), jump, jump, std::move(rate), beta};
}

struct MasterEquation {
  Eigen::Index dim = 0;
  HamiltonianFn hamiltonian;  // must return a dim x dim Hermitian matrix
  std::vector<Channel> channels;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<QState> states;
  /// Largest |Tr rho - 1| observed before renormalization.
  double max_trace_drift = 0.0;
};

/// The dynamical map as a dim^2 x dim^2 matrix acting on column-stacked
/// operators (vec(A X B) = (B^T kron A) vec(X)).
struct ProcessMap {
  Eigen::Index dim = 0;
  Matrix matrix;
};

// ---- generator --------------------------------------------------------------

/// Dissipation kernel A_i rho A_j^dag - (1/2){A_j^dag A_i, rho}; traceless.
inline Matrix dissipator(const Channel& ch, const Matrix& rho) {
  if (ch.a_i.rows() != rho.rows() || ch.a_j.rows() != rho.rows()) {
    throw DimMismatch("dissipator: jump operators are " +
                      std::to_string(ch.a_i.rows()) + "-dim, state is " +
                      std::to_string(rho.rows()) + "-dim");
  }
  const Matrix aji = ch.a_j.adjoint() * ch.a_i;
  return ch.a_i * rho * ch.a_j.adjoint() - 0.5 * (aji * rho + rho * aji);
}

inline Matrix dissipator(const Channel& ch, const QState& rho) {
  return dissipator(ch, rho.matrix());
}

/// Full right-hand side -i[H(t), rho] + sum_k gamma_k(t) * dissipator_k(rho).
inline Matrix rhs(const MasterEquation& me, double t, const Matrix& rho) {
  if (rho.rows() != me.dim) {
    throw DimMismatch("rhs: state dim " + std::to_string(rho.rows()) +
                      " != equation dim " + std::to_string(me.dim));
  }
  Matrix out = Matrix::Zero(me.dim, me.dim);
  if (me.hamiltonian) {
    const Matrix h = me.hamiltonian(t);
    out -= Complex(0, 1) * (h * rho - rho * h);
  }
  for (const auto& ch : me.channels) out += ch.rate(t) * dissipator(ch, rho);
  return out;
}

inline Matrix rhs(const MasterEquation& me, double t, const QState& rho) {
  return rhs(me, t, rho.matrix());
}

// ---- trajectory integration ---------------------------------------------------

namespace detail {

inline void rk4_step(const MasterEquation& me, double t, double h, Matrix& rho) {
  const Matrix k1 = rhs(me, t, rho);
  const Matrix k2 = rhs(me, t + 0.5 * h, Matrix(rho + 0.5 * h * k1));
  const Matrix k3 = rhs(me, t + 0.5 * h, Matrix(rho + 0.5 * h * k2));
  const Matrix k4 = rhs(me, t + h, Matrix(rho + h * k3));
  rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Advance from t0 to t1 in equal substeps no longer than max_step. Rates
/// and Hamiltonians are sampled exactly at the RK4 stage times.
inline void integrate_span(const MasterEquation& me, double t0, double t1,
                           double max_step, Matrix& rho) {
  const double span = t1 - t0;
  if (span <= 0) return;
  const int n = std::max(1, static_cast<int>(std::ceil(span / max_step - 1e-12)));
  const double h = span / n;
  for (int i = 0; i < n; ++i) rk4_step(me, t0 + i * h, h, rho);
}

}  // namespace detail

/// Integrate along an explicit, strictly increasing time grid. The returned
/// trajectory holds one re-validated state per grid point; rho0 is the state
/// at grid.front().
inline Trajectory evolve_on_grid(const MasterEquation& me, const QState& rho0,
                                 const std::vector<double>& grid,
                                 double max_step = kDefaultStep) {
  if (grid.empty()) throw Error("evolve_on_grid: empty time grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw Error("evolve_on_grid: grid must be strictly increasing");
    }
  }
  Trajectory out;
  out.times = grid;
  out.states.reserve(grid.size());
  out.states.push_back(rho0);
  Matrix rho = rho0.matrix();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    detail::integrate_span(me, grid[i - 1], grid[i], max_step, rho);
    out.max_trace_drift =
        std::max(out.max_trace_drift, std::abs(rho.trace() - Complex(1.0)));
    QState s = QState::sanitized(rho, kPositivityFloor);
    rho = s.matrix();
    out.states.push_back(std::move(s));
  }
  if (out.max_trace_drift > 1e-9) {
    throw PositivityLost("trace drift " + std::to_string(out.max_trace_drift) +
                         " exceeds 1e-9; reduce the step");
  }
  return out;
}

/// Fixed-step RK4 integration from t0 to t1, storing every step.
inline Trajectory evolve(const MasterEquation& me, const QState& rho0,
                         double t0, double t1, double step = kDefaultStep) {
  if (!(t1 > t0) || !(step > 0)) {
    throw Error("evolve: need t1 > t0 and step > 0");
  }
  const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / step - 1e-12)));
  std::vector<double> grid(n + 1);
  for (int i = 0; i <= n; ++i) grid[i] = t0 + (t1 - t0) * i / n;
  return evolve_on_grid(me, rho0, grid, (t1 - t0) / n);
}

// ---- superoperator accumulation ------------------------------------------------

/// The generator as a matrix on column-stacked operators.
inline Matrix liouvillian(const MasterEquation& me, double t) {
  const Eigen::Index n = me.dim;
  const Matrix id = qcore::identity(n);
  Matrix l = Matrix::Zero(n * n, n * n);
  if (me.hamiltonian) {
    const Matrix h = me.hamiltonian(t);
    l -= Complex(0, 1) * (qcore::kron(id, h) - qcore::kron(h.transpose(), id));
  }
  for (const auto& ch : me.channels) {
    const Matrix aji = ch.a_j.adjoint() * ch.a_i;
    Matrix k = qcore::kron(ch.a_j.conjugate(), ch.a_i);
    k -= 0.5 * qcore::kron(id, aji);
    k -= 0.5 * qcore::kron(aji.transpose(), id);
    l += ch.rate(t) * k;
  }
  return l;
}

inline Matrix apply_map(const ProcessMap& map, const Matrix& x) {
  if (x.rows() != map.dim) {
    throw DimMismatch("apply_map: operand dim " + std::to_string(x.rows()) +
                      " != map dim " + std::to_string(map.dim));
  }
  Matrix vx = x;
  vx.resize(map.dim * map.dim, 1);
  Matrix vy = map.matrix * vx;
  vy.resize(map.dim, map.dim);
  return vy;
}

/// |Tr(E(X)) - Tr(X)| witness: how far the adjoint map is from fixing the
/// identity.
inline double trace_preservation_defect(const ProcessMap& map) {
  Matrix id = qcore::identity(map.dim);
  id.resize(map.dim * map.dim, 1);
  return (map.matrix.adjoint() * id - id).cwiseAbs().maxCoeff();
}

/// Accumulate the dynamical map on the given grid (grid.front() must be 0,
/// where the map is the identity) by integrating the superoperator ODE
/// dE/dt = L(t) E with the same RK4 stepping as `evolve`.
inline std::vector<ProcessMap> propagator(const MasterEquation& me,
                                          const std::vector<double>& grid,
                                          double max_step = kDefaultStep) {
  if (grid.empty() || std::abs(grid.front()) > 1e-15) {
    throw Error("propagator: grid must start at t = 0");
  }
  const Eigen::Index n2 = me.dim * me.dim;
  std::vector<ProcessMap> out;
  out.reserve(grid.size());
  Matrix e = Matrix::Identity(n2, n2);
  out.push_back(ProcessMap{me.dim, e});
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double span = grid[i] - grid[i - 1];
    if (!(span > 0)) throw Error("propagator: grid must be increasing");
    const int steps =
        std::max(1, static_cast<int>(std::ceil(span / max_step - 1e-12)));
    const double h = span / steps;
    for (int s = 0; s < steps; ++s) {
      const double t = grid[i - 1] + s * h;
      const Matrix k1 = liouvillian(me, t) * e;
      const Matrix l2 = liouvillian(me, t + 0.5 * h);
      const Matrix k2 = l2 * (e + 0.5 * h * k1);
      const Matrix k3 = l2 * (e + 0.5 * h * k2);
      const Matrix k4 = liouvillian(me, t + h) * (e + h * k3);
      e += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    ProcessMap pm{me.dim, e};
    if (trace_preservation_defect(pm) > kTracePreservingTol) {
      throw PositivityLost("propagator lost trace preservation at t = " +
                           std::to_string(grid[i]));
    }
    out.push_back(std::move(pm));
  }
  return out;
}

}  // namespace fluxlab::lindblad
