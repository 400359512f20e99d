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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>

#include "fluxlab/errors.hpp"

// Foundational quantum linear algebra on small dense complex matrices:
// validated density matrices, Hermitian observables, entropies, distances,
// partial traces, Gibbs states and the qubit Bloch parametrization.
//
// Conventions used throughout the library:
//   * natural units, hbar = k_B = 1; all entropies in nats
//   * infinite temperature is beta = 0 (never T = infinity)
//   * 0 * ln 0 = 0; eigenvalues are clamped at 1e-12 before logarithms
//   * qubit basis ordering is |0>, |1>; the Bloch chart points its +z axis
//     toward the excited state |1>, so x = <sigma_x>, y = -<sigma_y>,
//     z = -<sigma_z>

namespace fluxlab::qcore {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-10;
inline constexpr double kEigClamp = 1e-12;
inline constexpr double kSupportEps = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---- small helpers --------------------------------------------------------

inline Matrix dagger(const Matrix& m) { return m.adjoint(); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

inline Matrix sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix sigma_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Matrix sigma_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Raising operator |1><0| in the |0>,|1> basis.
inline Matrix sigma_plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}

inline Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

inline double hermiticity_deviation(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

namespace detail {

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": matrix is " << m.rows() << "x" << m.cols()
       << ", expected square";
    throw DimMismatch(os.str());
  }
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace detail

// ---- domain types ----------------------------------------------------------

/// A validated density matrix: Hermitian, unit trace, positive semidefinite
/// (all within 1e-10). Construction cleans roundoff-level violations by
/// hermitizing, clamping eigenvalues into [0, inf) and renormalizing.
class QState {
 public:
  /// Validates and cleans `m`. Throws NotHermitian / NotUnitTrace /
  /// NotPositive with the violation magnitude in the message.
  explicit QState(const Matrix& m) : matrix_(validated(m)) {}

  Eigen::Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }

  /// Relaxed constructor for integrator output: hermitizes and renormalizes
  /// the trace, clamps eigenvalues in [-positivity_floor, 0) to zero and
  /// throws PositivityLost below -positivity_floor.
  static QState sanitized(const Matrix& m, double positivity_floor) {
    detail::require_square(m, "QState::sanitized");
    Matrix a = 0.5 * (m + m.adjoint());
    Complex tr = a.trace();
    if (std::abs(tr) < 1e-300) throw NotUnitTrace("sanitized: zero trace");
    a /= tr.real();
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -positivity_floor) {
      throw PositivityLost("state eigenvalue " + detail::fmt(lo) +
                           " below floor " + detail::fmt(-positivity_floor));
    }
    if (lo < 0.0) {
      RealVector w = es.eigenvalues().cwiseMax(0.0);
      a = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
      a /= a.trace().real();
    }
    QState out;
    out.matrix_ = std::move(a);
    return out;
  }

 private:
  QState() = default;

  static Matrix validated(const Matrix& m) {
    detail::require_square(m, "QState");
    const double hdev = hermiticity_deviation(m);
    if (hdev > kHermTol) {
      throw NotHermitian("state is not Hermitian, max |M - M^dag| = " +
                         detail::fmt(hdev));
    }
    const double tdev = std::abs(m.trace() - Complex(1.0));
    if (tdev > kTraceTol) {
      throw NotUnitTrace("state trace deviates from 1 by " +
                         detail::fmt(tdev));
    }
    Matrix a = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -kPositivityTol) {
      throw NotPositive("state has eigenvalue " + detail::fmt(lo));
    }
    if (lo < 0.0) {
      RealVector w = es.eigenvalues().cwiseMax(0.0);
      a = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    }
    a /= a.trace().real();
    return a;
  }

  Matrix matrix_;
};

inline QState make_state(const Matrix& m) { return QState(m); }

/// A Hermitian observable (energies in natural units).
struct HermitianOp {
  Matrix matrix;

  explicit HermitianOp(Matrix m) : matrix(std::move(m)) {
    detail::require_square(matrix, "HermitianOp");
    const double hdev = hermiticity_deviation(matrix);
    if (hdev > kHermTol) {
      throw NotHermitian("operator is not Hermitian, max |M - M^dag| = " +
                         detail::fmt(hdev));
    }
    matrix = 0.5 * (matrix + matrix.adjoint());
  }

  Eigen::Index dim() const { return matrix.rows(); }
};

/// Polar Bloch coordinates of a qubit state; r in [0, 1], angles in radians.
struct BlochVector {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Thermal state together with ln Z of the generating Hamiltonian.
struct GibbsState {
  QState state;
  double log_partition = 0.0;
};

struct Dims {
  Eigen::Index a = 0;
  Eigen::Index b = 0;
};

enum class Keep { A, B };

// ---- spectra and entropies --------------------------------------------------

/// Von Neumann entropy -Tr rho ln rho in nats, with 0 ln 0 = 0.
inline double von_neumann_entropy(const QState& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix(),
                                           Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()[i];
    if (p > 0.0) s -= p * std::log(p);
  }
  return std::max(s, 0.0);
}

/// Relative entropy Tr rho (ln rho - ln sigma) in nats. Returns +infinity
/// when the support of rho leaks outside the support of sigma (support cut
/// at eigenvalue 1e-12).
inline double relative_entropy(const QState& rho, const QState& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw DimMismatch("relative_entropy: dims " + std::to_string(rho.dim()) +
                      " vs " + std::to_string(sigma.dim()));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> er(rho.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma.matrix());
  const auto& p = er.eigenvalues();
  const auto& q = es.eigenvalues();
  // |<u_i|v_j>|^2 overlap weights between the two eigenbases.
  Eigen::MatrixXd w =
      (er.eigenvectors().adjoint() * es.eigenvectors()).cwiseAbs2();

  double total = 0.0;
  double leak = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= kSupportEps) continue;
    total += p[i] * std::log(p[i]);
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      if (q[j] <= kSupportEps) {
        leak += p[i] * w(i, j);
      } else {
        total -= p[i] * w(i, j) * std::log(q[j]);
      }
    }
  }
  if (leak > 1e-10) return kInfinity;
  return (total < 0.0 && total > -1e-10) ? 0.0 : total;
}

/// Trace distance (1/2)||rho - sigma||_1 in [0, 1].
inline double trace_distance(const QState& rho, const QState& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw DimMismatch("trace_distance: dims " + std::to_string(rho.dim()) +
                      " vs " + std::to_string(sigma.dim()));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix() - sigma.matrix(),
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// ---- bipartite operations ---------------------------------------------------

namespace detail {

inline Matrix partial_trace_matrix(const Matrix& m, Dims d, Keep keep) {
  if (m.rows() != d.a * d.b) {
    throw DimMismatch("partial_trace: matrix dim " + std::to_string(m.rows()) +
                      " != " + std::to_string(d.a) + "*" + std::to_string(d.b));
  }
  if (keep == Keep::A) {
    Matrix out = Matrix::Zero(d.a, d.a);
    for (Eigen::Index i = 0; i < d.a; ++i)
      for (Eigen::Index j = 0; j < d.a; ++j)
        for (Eigen::Index k = 0; k < d.b; ++k)
          out(i, j) += m(i * d.b + k, j * d.b + k);
    return out;
  }
  Matrix out = Matrix::Zero(d.b, d.b);
  for (Eigen::Index i = 0; i < d.b; ++i)
    for (Eigen::Index j = 0; j < d.b; ++j)
      for (Eigen::Index k = 0; k < d.a; ++k)
        out(i, j) += m(k * d.b + i, k * d.b + j);
  return out;
}

}  // namespace detail

inline QState partial_trace(const QState& rho_ab, Dims d, Keep keep) {
  return QState(detail::partial_trace_matrix(rho_ab.matrix(), d, keep));
}

/// Bipartite mutual information S_A + S_B - S_AB, nonnegative, zero on
/// product states.
inline double mutual_information(const QState& rho_ab, Dims d) {
  const QState a = partial_trace(rho_ab, d, Keep::A);
  const QState b = partial_trace(rho_ab, d, Keep::B);
  const double v = von_neumann_entropy(a) + von_neumann_entropy(b) -
                   von_neumann_entropy(rho_ab);
  return std::max(v, 0.0);
}

// ---- thermal states ---------------------------------------------------------

/// exp(-beta H)/Z with log_partition = ln Tr exp(-beta H). beta = 0 encodes
/// infinite temperature and yields the maximally mixed state.
inline GibbsState gibbs_state(const HermitianOp& h, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error("gibbs_state: beta must be finite and >= 0, got " +
                detail::fmt(beta));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
  const RealVector& lam = es.eigenvalues();
  const double shift = lam.minCoeff();
  RealVector w = (-beta * (lam.array() - shift)).exp();
  const double z = w.sum();
  Matrix m = es.eigenvectors() * (w / z).asDiagonal() *
             es.eigenvectors().adjoint();
  return GibbsState{QState(m), std::log(z) - beta * shift};
}

// ---- qubit Bloch chart -------------------------------------------------------

namespace detail {

/// Cartesian chart components (x, y, z) with +z toward |1>.
inline Eigen::Vector3d bloch_components(const Matrix& rho) {
  Eigen::Vector3d v;
  v[0] = (rho * sigma_x()).trace().real();
  v[1] = -(rho * sigma_y()).trace().real();
  v[2] = -(rho * sigma_z()).trace().real();
  return v;
}

inline Matrix state_from_components(const Eigen::Vector3d& v) {
  return 0.5 * (identity(2) + v[0] * sigma_x() - v[1] * sigma_y() -
                v[2] * sigma_z());
}

}  // namespace detail

inline BlochVector bloch_from_state(const QState& rho) {
  if (rho.dim() != 2) {
    throw DimMismatch("bloch_from_state: dim " + std::to_string(rho.dim()) +
                      " != 2");
  }
  const Eigen::Vector3d v = detail::bloch_components(rho.matrix());
  BlochVector b;
  b.r = v.norm();
  if (b.r > 1e-14) {
    b.theta = std::atan2(std::hypot(v[0], v[1]), v[2]);
    if (std::hypot(v[0], v[1]) > 1e-14) b.phi = std::atan2(v[1], v[0]);
  }
  return b;
}

inline QState state_from_bloch(const BlochVector& b) {
  if (b.r < 0.0 || b.r > 1.0 + 1e-10) {
    throw NotPositive("state_from_bloch: radius " + detail::fmt(b.r) +
                      " outside [0, 1]");
  }
  const double r = std::min(b.r, 1.0);
  Eigen::Vector3d v{r * std::sin(b.theta) * std::cos(b.phi),
                    r * std::sin(b.theta) * std::sin(b.phi),
                    r * std::cos(b.theta)};
  return QState(detail::state_from_components(v));
}

// ---- matrix logarithm --------------------------------------------------------

/// ln rho with eigenvalues clamped below at eps (basis preserved), so pure
/// and rank-deficient states produce finite Hermitian results.
inline HermitianOp matrix_log_clamped(const QState& rho,
                                      double eps = kEigClamp) {
  if (!(eps > 0.0)) throw Error("matrix_log_clamped: eps must be > 0");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  RealVector w = es.eigenvalues().cwiseMax(eps).array().log();
  return HermitianOp(es.eigenvectors() * w.asDiagonal() *
                     es.eigenvectors().adjoint());
}

}  // namespace fluxlab::qcore
