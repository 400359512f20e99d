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

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "fluxlab/lindblad.hpp"
#include "fluxlab/models.hpp"
#include "fluxlab/qcore.hpp"

// Divisibility machinery for qubit dynamics: Choi matrices, intermediate
// (two-snapshot) maps, complete-positivity and positivity tests, the
// PD0 / PD1 / PD2 classification, and the (a, gamma) phase-diagram scan of
// the CNOT target dynamics.
//
//   PD2: every intermediate map is completely positive (Markovian)
//   PD1: complete positivity fails somewhere, plain positivity never does
//        (weakly non-Markovian)
//   PD0: plain positivity fails somewhere (essentially non-Markovian)

namespace fluxlab::divisibility {

using lindblad::MasterEquation;
using lindblad::ProcessMap;
using lindblad::RateFn;
using qcore::Complex;
using qcore::Matrix;

inline constexpr double kEigTol = 1e-7;
inline constexpr double kConditionCutoff = 1e8;

enum class Rank { PD0 = 0, PD1 = 1, PD2 = 2 };

inline const char* to_string(Rank r) {
  switch (r) {
    case Rank::PD0: return "PD0";
    case Rank::PD1: return "PD1";
    default: return "PD2";
  }
}

/// Worst witness value seen and the (t, tau) snapshot where it occurred.
struct Witness {
  double value = 0.0;
  double t = 0.0;
  double tau = 0.0;
};

struct DivisibilityClass {
  Rank label = Rank::PD2;
  Witness worst_cp;  // most negative Choi eigenvalue (or rate)
  Witness worst_p;   // largest excess of the output over the state space
  int skipped = 0;   // (t, tau) pairs skipped at singular snapshots
};

struct TestResult {
  bool pass = true;
  double witness = 0.0;
};

// ---- Choi representation -----------------------------------------------------

/// Choi matrix: the map applied to one half of the unnormalized maximally
/// entangled operator, sum_ij |i><j| (x) E(|i><j|). Hermitian whenever the
/// map preserves Hermiticity; PSD iff the map is completely positive.
inline Matrix choi(const ProcessMap& map) {
  const Eigen::Index n = map.dim;
  Matrix c = Matrix::Zero(n * n, n * n);
  Matrix basis = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      basis(i, j) = 1.0;
      const Matrix image = lindblad::apply_map(map, basis);
      basis(i, j) = 0.0;
      c.block(i * n, j * n, n, n) = image;
    }
  }
  return c;
}

/// The map bridging two snapshots of a process, late o early^{-1}. Throws
/// SingularMap when the early map is not invertible (condition number above
/// the cutoff).
inline ProcessMap intermediate_map(const ProcessMap& late,
                                   const ProcessMap& early,
                                   double cond_cutoff = kConditionCutoff) {
  if (late.dim != early.dim) {
    throw DimMismatch("intermediate_map: dims differ");
  }
  Eigen::JacobiSVD<Matrix> svd(early.matrix);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  const double cond = smin > 0 ? smax / smin : qcore::kInfinity;
  if (!(cond <= cond_cutoff)) {
    throw SingularMap("intermediate_map: early map condition number " +
                      std::to_string(cond));
  }
  ProcessMap out{late.dim,
                 early.matrix.transpose()
                     .partialPivLu()
                     .solve(late.matrix.transpose())
                     .transpose()};
  if (lindblad::trace_preservation_defect(out) > 1e-7) {
    throw Error("intermediate_map: result not trace preserving");
  }
  return out;
}

// ---- positivity tests ----------------------------------------------------------

/// Complete positivity: the smallest Choi eigenvalue must not drop below
/// -tol.
inline TestResult cp_test(const ProcessMap& map, double tol = kEigTol) {
  const Matrix c = choi(map);
  if (qcore::hermiticity_deviation(c) > 1e-8) {
    throw Error("cp_test: map is not Hermiticity preserving");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (c + c.adjoint()),
                                           Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return TestResult{lo >= -tol, lo};
}

namespace detail {

/// Pauli transfer decomposition of a qubit map: 3x3 block on the traceless
/// sector plus the translation picked up by the identity.
struct QubitAffine {
  Eigen::Matrix3d block;
  Eigen::Vector3d shift;
};

inline QubitAffine qubit_affine(const ProcessMap& map) {
  const std::array<Matrix, 3> sigma{qcore::sigma_x(), qcore::sigma_y(),
                                    qcore::sigma_z()};
  QubitAffine out;
  const Matrix id_img = lindblad::apply_map(map, qcore::identity(2));
  for (int r = 0; r < 3; ++r) {
    out.shift[r] = 0.5 * (id_img * sigma[r]).trace().real();
    for (int c = 0; c < 3; ++c) {
      const Matrix img = lindblad::apply_map(map, sigma[c]);
      out.block(r, c) = 0.5 * (img * sigma[r]).trace().real();
    }
  }
  return out;
}

/// Deterministic low-discrepancy directions (spiral set plus the six axes).
inline std::vector<Eigen::Vector3d> bloch_directions(int n) {
  std::vector<Eigen::Vector3d> dirs;
  dirs.reserve(n + 6);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * M_PI * std::fmod(i / golden, 1.0);
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  for (int ax = 0; ax < 3; ++ax) {
    for (double s : {1.0, -1.0}) {
      Eigen::Vector3d v = Eigen::Vector3d::Zero();
      v[ax] = s;
      dirs.push_back(v);
    }
  }
  return dirs;
}

}  // namespace detail

/// Plain positivity for qubit maps. Unital maps (no translation) get an
/// exact certificate: the largest singular value of the traceless block must
/// not exceed 1. Otherwise a deterministic sample of pure inputs is pushed
/// through the map and the output spectra are checked.
inline TestResult p_test_qubit(const ProcessMap& map, double tol = kEigTol,
                               int n_samples = 2048) {
  if (map.dim != 2) {
    throw DimMismatch("p_test_qubit: dim " + std::to_string(map.dim) +
                      " != 2");
  }
  const detail::QubitAffine aff = detail::qubit_affine(map);
  if (aff.shift.norm() <= 1e-12) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(aff.block);
    const double top = svd.singularValues().maxCoeff();
    // Witness: how far the worst output sticks out of the Bloch ball.
    return TestResult{top <= 1.0 + tol, top - 1.0};
  }
  double worst = 0.0;
  for (const auto& n : detail::bloch_directions(n_samples)) {
    const Eigen::Vector3d img = aff.block * n + aff.shift;
    worst = std::max(worst, img.norm() - 1.0);
  }
  return TestResult{worst <= tol, worst};
}

// ---- rate-level classification ---------------------------------------------------

/// Classification of a Pauli-diagonal qubit master equation straight from
/// its three rates: completely positive divisibility needs every rate
/// nonnegative, plain positive divisibility needs every pairwise sum
/// nonnegative.
inline DivisibilityClass rate_classify_pauli(const std::array<RateFn, 3>& rates,
                                             const std::vector<double>& grid,
                                             double tol = kEigTol) {
  DivisibilityClass out;
  double min_rate = qcore::kInfinity, min_pair = qcore::kInfinity;
  double t_rate = 0.0, t_pair = 0.0;
  for (double t : grid) {
    const std::array<double, 3> g{rates[0](t), rates[1](t), rates[2](t)};
    for (int i = 0; i < 3; ++i) {
      if (g[i] < min_rate) {
        min_rate = g[i];
        t_rate = t;
      }
      for (int j = i + 1; j < 3; ++j) {
        if (g[i] + g[j] < min_pair) {
          min_pair = g[i] + g[j];
          t_pair = t;
        }
      }
    }
  }
  out.worst_cp = Witness{min_rate, t_rate, 0.0};
  out.worst_p = Witness{min_pair, t_pair, 0.0};
  if (min_pair < -tol) {
    out.label = Rank::PD0;
  } else if (min_rate < -tol) {
    out.label = Rank::PD1;
  } else {
    out.label = Rank::PD2;
  }
  return out;
}

/// Same classification, reading the three rates off a Pauli-diagonal master
/// equation (one channel per Pauli axis, matching jump operator pairs).
/// Throws NotPauliDiagonal for anything else.
inline DivisibilityClass rate_classify_pauli(const MasterEquation& me,
                                             const std::vector<double>& grid,
                                             double tol = kEigTol) {
  if (me.dim != 2) throw NotPauliDiagonal("rate_classify_pauli: dim != 2");
  std::array<RateFn, 3> rates{RateFn{}, RateFn{}, RateFn{}};
  const std::array<Matrix, 3> sigma{qcore::sigma_x(), qcore::sigma_y(),
                                    qcore::sigma_z()};
  for (const auto& ch : me.channels) {
    if ((ch.a_i - ch.a_j).cwiseAbs().maxCoeff() > 1e-12) {
      throw NotPauliDiagonal("rate_classify_pauli: off-diagonal channel \"" +
                             ch.label + "\"");
    }
    int axis = -1;
    for (int k = 0; k < 3; ++k) {
      if ((ch.a_i - sigma[k]).cwiseAbs().maxCoeff() <= 1e-12) axis = k;
    }
    if (axis < 0) {
      throw NotPauliDiagonal("rate_classify_pauli: channel \"" + ch.label +
                             "\" is not a Pauli jump");
    }
    const RateFn prev = rates[axis];
    const RateFn cur = ch.rate;
    rates[axis] = prev ? RateFn([prev, cur](double t) { return prev(t) + cur(t); })
                       : cur;
  }
  for (auto& r : rates) {
    if (!r) r = [](double) { return 0.0; };
  }
  return rate_classify_pauli(rates, grid, tol);
}

// ---- map-level classification ------------------------------------------------------

/// Map-level classification: accumulate the process on the union of the
/// requested snapshot times, form every intermediate map Lambda(t+tau, t),
/// and test complete positivity and positivity. Singular snapshots (early
/// map not invertible) are skipped and counted.
inline DivisibilityClass classify_process(const MasterEquation& me,
                                          const std::vector<double>& t_grid,
                                          const std::vector<double>& tau_grid,
                                          double tol = kEigTol,
                                          double cond_cutoff = kConditionCutoff,
                                          double max_step = lindblad::kDefaultStep) {
  if (me.dim != 2) {
    throw DimMismatch("classify_process: only qubit processes are classified");
  }
  // Union grid of all t and t + tau, starting at 0.
  std::vector<double> times{0.0};
  for (double t : t_grid) {
    times.push_back(t);
    for (double tau : tau_grid) times.push_back(t + tau);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              times.end());
  const std::vector<ProcessMap> maps = lindblad::propagator(me, times, max_step);
  auto index_of = [&times](double t) {
    const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12);
    return static_cast<std::size_t>(it - times.begin());
  };

  DivisibilityClass out;
  bool cp_violated = false, p_violated = false;
  out.worst_cp = Witness{qcore::kInfinity, 0.0, 0.0};
  out.worst_p = Witness{-qcore::kInfinity, 0.0, 0.0};
  for (double t : t_grid) {
    for (double tau : tau_grid) {
      const ProcessMap& early = maps[index_of(t)];
      const ProcessMap& late = maps[index_of(t + tau)];
      ProcessMap lambda;
      try {
        lambda = intermediate_map(late, early, cond_cutoff);
      } catch (const SingularMap&) {
        ++out.skipped;
        continue;
      }
      const TestResult cp = cp_test(lambda, tol);
      if (cp.witness < out.worst_cp.value) out.worst_cp = Witness{cp.witness, t, tau};
      if (!cp.pass) cp_violated = true;
      const TestResult pos = p_test_qubit(lambda, tol);
      if (pos.witness > out.worst_p.value) out.worst_p = Witness{pos.witness, t, tau};
      if (!pos.pass) p_violated = true;
    }
  }
  out.label = p_violated ? Rank::PD0 : (cp_violated ? Rank::PD1 : Rank::PD2);
  return out;
}

// ---- phase diagram --------------------------------------------------------------

struct PhaseDiagram {
  std::vector<double> a_grid;
  std::vector<double> gamma_grid;  // in units of the coupling J
  /// Row-major: cells[ia * gamma_grid.size() + ig].
  std::vector<DivisibilityClass> cells;
};

/// Scan the CNOT target dynamics over control population and depolarizing
/// rate. Cells are classified from the channel rates over one drive period
/// (time_samples points); spot_check_stride > 0 additionally runs the
/// map-level classifier on every stride-th cell and throws on disagreement.
inline PhaseDiagram phase_diagram(const std::vector<double>& a_grid,
                                  const std::vector<double>& gamma_grid,
                                  int time_samples = 2000, double j = 1.0,
                                  int spot_check_stride = 0, int jobs = 1) {
  for (double a : a_grid) {
    if (a < 0.0 || a > 1.0) throw Error("phase_diagram: a outside [0, 1]");
  }
  for (double g : gamma_grid) {
    if (!(g > 0.0)) throw Error("phase_diagram: gamma must be positive");
  }
  const double period = 2.0 * M_PI / j;
  std::vector<double> tgrid(time_samples);
  for (int i = 0; i < time_samples; ++i) {
    tgrid[i] = period * (i + 0.5) / time_samples;  // avoids the r = 0 instant
  }

  PhaseDiagram pd;
  pd.a_grid = a_grid;
  pd.gamma_grid = gamma_grid;
  pd.cells.resize(a_grid.size() * gamma_grid.size());

  const auto classify_cell = [&](std::size_t ia, std::size_t ig) {
    const double a = a_grid[ia];
    const double g = gamma_grid[ig] * j;
    std::array<RateFn, 3> rates{
        [a, j, g](double t) { return 0.5 * (g + models::cnot_rate_cx(t, a, j)); },
        [g](double) { return 0.5 * g; }, [g](double) { return 0.5 * g; }};
    pd.cells[ia * gamma_grid.size() + ig] = rate_classify_pauli(rates, tgrid);
  };

  std::atomic<std::size_t> next{0};
  const std::size_t total = pd.cells.size();
  const int nthreads = std::max(1, jobs);
  auto worker = [&]() {
    for (std::size_t k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
      classify_cell(k / gamma_grid.size(), k % gamma_grid.size());
    }
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (spot_check_stride > 0) {
    std::vector<double> t_grid, tau_grid{period / 400.0, period / 40.0,
                                         period / 8.0};
    for (int i = 0; i <= 200; ++i) t_grid.push_back(period * i / 200.0);
    for (std::size_t k = 0; k < total; k += spot_check_stride) {
      const std::size_t ia = k / gamma_grid.size(), ig = k % gamma_grid.size();
      models::CnotParams p;
      p.a = a_grid[ia];
      p.gamma = gamma_grid[ig] * j;
      p.j_coupling = j;
      if (p.a == 0.5) continue;  // map-level scan is singular there
      const DivisibilityClass map_cls =
          classify_process(models::cnot_master_equation(p), t_grid, tau_grid);
      if (map_cls.label != pd.cells[k].label) {
        throw Error(std::string("phase_diagram: rate and map classifications "
                                "disagree at a = ") +
                    std::to_string(p.a) + ", gamma/J = " +
                    std::to_string(gamma_grid[ig]) + " (" +
                    to_string(pd.cells[k].label) + " vs " +
                    to_string(map_cls.label) + ")");
      }
    }
  }
  return pd;
}

}  // namespace fluxlab::divisibility
