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

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "fluxlab/lindblad.hpp"
#include "fluxlab/models.hpp"
#include "fluxlab/qcore.hpp"
#include "fluxlab/thermoflux.hpp"

// Trace-distance based non-Markovianity: distance trajectories of co-evolved
// state pairs, the accumulated-revival measure, its optimization over
// antipodal pure qubit pairs, and the sign relation between the total
// information flux and the trace-distance rate of the +/-z pair.

namespace fluxlab::measures {

using lindblad::MasterEquation;
using qcore::Matrix;
using qcore::QState;

struct DistancePoint {
  double t = 0.0;
  double d = 0.0;
  double dd_dt = 0.0;  // central difference on the grid
};

struct BlpResult {
  double value = 0.0;
  QState rho1;
  QState rho2;
  std::vector<DistancePoint> sigma_series;
};

/// Co-evolve the pair along the grid; the distance derivative is a central
/// difference (one-sided at the ends).
inline std::vector<DistancePoint> distance_trajectory(
    const MasterEquation& me, const QState& rho1, const QState& rho2,
    const std::vector<double>& grid, double max_step = lindblad::kDefaultStep) {
  const lindblad::Trajectory t1 = lindblad::evolve_on_grid(me, rho1, grid, max_step);
  const lindblad::Trajectory t2 = lindblad::evolve_on_grid(me, rho2, grid, max_step);
  const std::size_t n = grid.size();
  std::vector<DistancePoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].t = grid[i];
    out[i].d = qcore::trace_distance(t1.states[i], t2.states[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    out[i].dd_dt = (out[hi].d - out[lo].d) / (grid[hi] - grid[lo]);
  }
  return out;
}

namespace detail {

inline double accumulate_revivals(const std::vector<DistancePoint>& series) {
  double v = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double inc = series[i].d - series[i - 1].d;
    if (inc > 0.0) v += inc;
  }
  return v;
}

}  // namespace detail

/// Accumulated trace-distance increase of the pair over the grid. Zero for
/// every completely positive divisible process.
inline BlpResult blp_measure(const MasterEquation& me, const QState& rho1,
                             const QState& rho2,
                             const std::vector<double>& grid,
                             double max_step = lindblad::kDefaultStep) {
  BlpResult res{0.0, rho1, rho2,
                distance_trajectory(me, rho1, rho2, grid, max_step)};
  res.value = detail::accumulate_revivals(res.sigma_series);
  return res;
}

struct PairGrid {
  int n_theta = 12;
  int n_phi = 24;
};

/// Maximize the measure over antipodal pure qubit pairs on a deterministic
/// theta x phi grid. The process map is accumulated once and reused for
/// every pair (the distance of an antipodal pair is the image norm of its
/// Bloch axis), so the scan stays cheap.
inline BlpResult blp_optimize(const MasterEquation& me, PairGrid pairs,
                              const std::vector<double>& grid,
                              double max_step = lindblad::kDefaultStep,
                              int jobs = 1) {
  if (me.dim != 2) throw DimMismatch("blp_optimize: qubit systems only");
  if (pairs.n_theta < 1 || pairs.n_phi < 1) {
    throw Error("blp_optimize: pair grid must be at least 1x1");
  }
  std::vector<double> times = grid;
  if (std::abs(times.front()) > 1e-15) times.insert(times.begin(), 0.0);
  const std::vector<lindblad::ProcessMap> maps =
      lindblad::propagator(me, times, max_step);
  const std::size_t offset = times.size() - grid.size();

  struct Cand {
    double value = -1.0;
    double theta = 0.0, phi = 0.0;
  };
  std::vector<Cand> cand(static_cast<std::size_t>(pairs.n_theta) * pairs.n_phi);

  auto eval_pair = [&](std::size_t k) {
    const int it = static_cast<int>(k) / pairs.n_phi;
    const int ip = static_cast<int>(k) % pairs.n_phi;
    // Poles are represented once (theta = 0 row); the grid spans the upper
    // hemisphere since antipodal pairs are symmetric under axis flip.
    const double theta = (0.5 * M_PI) * it / std::max(1, pairs.n_theta - 1);
    const double phi = (2.0 * M_PI) * ip / pairs.n_phi;
    const Eigen::Vector3d axis{std::sin(theta) * std::cos(phi),
                               std::sin(theta) * std::sin(phi),
                               std::cos(theta)};
    // Difference operator of the pair: delta = axis . sigma (chart), whose
    // trace norm is twice the image vector length.
    const Matrix delta = qcore::detail::state_from_components(axis) -
                         qcore::detail::state_from_components(-axis);
    double value = 0.0, prev = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Matrix img = lindblad::apply_map(maps[offset + i], delta);
      // Hermitian traceless 2x2: trace norm = 2 sqrt(|d|^2 + |c|^2).
      const double dd = img(0, 0).real();
      const double cc = std::abs(img(0, 1));
      const double dist = std::sqrt(dd * dd + cc * cc);
      if (prev >= 0.0 && dist > prev) value += dist - prev;
      prev = dist;
    }
    cand[k] = Cand{value, theta, phi};
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next.fetch_add(1); k < cand.size();
         k = next.fetch_add(1)) {
      eval_pair(k);
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < cand.size(); ++k) {
    if (cand[k].value > cand[best].value) best = k;
  }
  const qcore::BlochVector b1{1.0, cand[best].theta, cand[best].phi};
  const qcore::BlochVector b2{1.0, M_PI - cand[best].theta,
                              std::fmod(cand[best].phi + M_PI, 2.0 * M_PI)};
  return blp_measure(me, qcore::state_from_bloch(b1), qcore::state_from_bloch(b2),
                     grid, max_step);
}

// ---- flux / distance sign relation ------------------------------------------------

struct SignCheckPoint {
  double t = 0.0;
  double flux = 0.0;
  double dd_dt = 0.0;
};

struct SignCheckReport {
  int eligible = 0;
  std::vector<SignCheckPoint> violations;
  bool pass = true;
};

/// Check sign(total flux) == sign(dD/dt) for the +/-z pair of the CNOT
/// target dynamics, on every grid sample where the flux is above the floor
/// and the distance is away from its endpoints. The flux comes from the
/// dissipator algebra on the evolved excited state; the distance derivative
/// is evaluated exactly from the generator acting on the co-evolved pair
/// difference (d/dt of the determinant), so the comparison is free of
/// finite-difference noise.
inline SignCheckReport flux_distance_sign_check(
    const models::CnotParams& p, const std::vector<double>& grid,
    double flux_floor = 1e-8, double max_step = lindblad::kDefaultStep) {
  if (std::abs(p.r0 - 1.0) > 1e-12 || std::abs(p.theta0) > 1e-12) {
    throw Error(
        "flux_distance_sign_check: requires the excited initial state "
        "(r0 = 1, theta0 = 0)");
  }
  const MasterEquation me = models::cnot_master_equation(p);
  const QState up = qcore::state_from_bloch({1.0, 0.0, 0.0});
  const QState down = qcore::state_from_bloch({1.0, M_PI, 0.0});

  std::vector<double> times = grid;
  if (times.front() > 1e-15) times.insert(times.begin(), 0.0);
  const std::size_t offset = times.size() - grid.size();
  const lindblad::Trajectory t1 = lindblad::evolve_on_grid(me, up, times, max_step);
  const lindblad::Trajectory t2 =
      lindblad::evolve_on_grid(me, down, times, max_step);

  SignCheckReport rep;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const QState& plus = t1.states[offset + i];
    const Matrix delta =
        plus.matrix() - t2.states[offset + i].matrix();
    const double dd = delta(0, 0).real();
    const double cc = std::abs(delta(0, 1));
    const double dist = std::sqrt(dd * dd + cc * cc);
    if (dist <= 1e-6 || dist >= 1.0 - 1e-6) continue;
    const double flux = thermoflux::total_flux(me, plus, t);
    if (std::abs(flux) <= flux_floor) continue;
    // d(dist)/dt from d(det)/dt of the traceless difference.
    const Matrix ddelta = lindblad::rhs(me, t, delta);
    const double ddet = (ddelta(0, 0) * delta(1, 1) + delta(0, 0) * ddelta(1, 1) -
                         ddelta(0, 1) * delta(1, 0) - delta(0, 1) * ddelta(1, 0))
                            .real();
    const double ddist = -ddet / (2.0 * dist);
    ++rep.eligible;
    if ((flux > 0.0) != (ddist > 0.0)) {
      rep.violations.push_back(SignCheckPoint{t, flux, ddist});
    }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

}  // namespace fluxlab::measures
