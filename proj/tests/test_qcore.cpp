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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fluxlab/qcore.hpp"

using namespace fluxlab;
using namespace fluxlab::qcore;
using Catch::Matchers::WithinAbs;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

QState excited() { return QState(diag2(0.0, 1.0)); }   // |1><1|
QState ground() { return QState(diag2(1.0, 0.0)); }    // |0><0|
QState mixed() { return QState(0.5 * identity(2)); }

/// Deterministic random density matrix (Ginibre construction).
QState random_state(std::mt19937& rng, Eigen::Index n) {
  std::normal_distribution<double> gauss;
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = Complex(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return QState(rho);
}

}  // namespace

TEST_CASE("state validation accepts and cleans good input", "[qcore]") {
  REQUIRE(mixed().dim() == 2);
  const QState s(diag2(0.3, 0.7));
  REQUIRE_THAT(s.matrix()(0, 0).real(), WithinAbs(0.3, 1e-14));

  SECTION("negative eigenvalue is rejected with the magnitude") {
    try {
      QState bad(diag2(1.1, -0.1));
      FAIL("expected NotPositive");
    } catch (const NotPositive& e) {
      REQUIRE(std::string(e.what()).find("-0.1") != std::string::npos);
    }
  }
  SECTION("non-hermitian is rejected") {
    Matrix m = diag2(0.5, 0.5);
    m(0, 1) = Complex(0.2, 0.0);
    REQUIRE_THROWS_AS(QState(m), NotHermitian);
  }
  SECTION("trace violation is rejected") {
    REQUIRE_THROWS_AS(QState(diag2(0.6, 0.6)), NotUnitTrace);
  }
  SECTION("roundoff-level negativity is clamped") {
    const QState s2(diag2(1.0 + 5e-11, -5e-11));
    Eigen::SelfAdjointEigenSolver<Matrix> es(s2.matrix());
    REQUIRE(es.eigenvalues().minCoeff() >= -1e-15);
    REQUIRE_THAT(std::abs(s2.matrix().trace() - Complex(1.0)),
                 WithinAbs(0.0, 1e-14));
  }
}

TEST_CASE("von Neumann entropy closed forms", "[qcore]") {
  REQUIRE_THAT(von_neumann_entropy(excited()), WithinAbs(0.0, 1e-14));
  REQUIRE_THAT(von_neumann_entropy(mixed()),
               WithinAbs(0.6931471805599453, 1e-14));
  // -0.3 ln 0.3 - 0.7 ln 0.7
  REQUIRE_THAT(von_neumann_entropy(QState(diag2(0.3, 0.7))),
               WithinAbs(0.6108643020548935, 1e-13));
}

TEST_CASE("relative entropy values and support handling", "[qcore]") {
  const QState rho(diag2(0.9, 0.1));
  REQUIRE_THAT(relative_entropy(rho, rho), WithinAbs(0.0, 1e-13));
  // ln 2 - S(rho)
  REQUIRE_THAT(relative_entropy(rho, mixed()),
               WithinAbs(0.3680642071684969, 1e-13));
  REQUIRE(std::isinf(relative_entropy(excited(), ground())));

  Matrix m3 = Matrix::Zero(3, 3);
  m3.diagonal().setConstant(1.0 / 3.0);
  REQUIRE_THROWS_AS(relative_entropy(rho, QState(m3)), DimMismatch);
}

TEST_CASE("relative entropy nonnegativity and identity-target identity",
          "[qcore][property]") {
  std::mt19937 rng(20260810);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    const QState a = random_state(rng, n);
    const QState b = random_state(rng, n);
    const double s = relative_entropy(a, b);
    REQUIRE(s >= 0.0);
    const double d = trace_distance(a, b);
    if (d <= 1e-8) {
      REQUIRE_THAT(s, WithinAbs(0.0, 1e-12));
    } else {
      REQUIRE(s > 0.0);
    }
    // S(rho || I/n) = ln n - S(rho)
    Matrix id = Matrix::Identity(n, n);
    id /= double(n);
    REQUIRE_THAT(relative_entropy(a, QState(id)),
                 WithinAbs(std::log(double(n)) - von_neumann_entropy(a), 1e-10));
  }
}

TEST_CASE("relative entropy is quadratic in small commuting perturbations",
          "[qcore][property]") {
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 0.0, 0.7, 1.3;
  const GibbsState eq = gibbs_state(HermitianOp(h), 1.0);
  Eigen::Vector3d direction(1.0, -2.0, 1.0);  // traceless

  // S(rho_eq + t*delta || rho_eq) should approach (1/2) Tr[rho_eq^{-1} (t delta)^2].
  auto measured = [&](double t) {
    Matrix pert = eq.state.matrix();
    for (int i = 0; i < 3; ++i) pert(i, i) += t * direction[i];
    return relative_entropy(QState(pert), eq.state);
  };
  auto quadratic = [&](double t) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      acc += t * t * direction[i] * direction[i] /
             eq.state.matrix()(i, i).real();
    }
    return 0.5 * acc;
  };
  const double t1 = 1e-3, t2 = 1e-4;
  REQUIRE_THAT(measured(t1) / quadratic(t1), WithinAbs(1.0, 2e-2));
  REQUIRE_THAT(measured(t2) / quadratic(t2), WithinAbs(1.0, 2e-3));
  // scaling exponent of the leading term is 2
  const double slope = std::log(measured(t1) / measured(t2)) / std::log(t1 / t2);
  REQUIRE_THAT(slope, WithinAbs(2.0, 0.05));
}

TEST_CASE("trace distance closed forms", "[qcore]") {
  REQUIRE_THAT(trace_distance(mixed(), mixed()), WithinAbs(0.0, 1e-14));
  REQUIRE_THAT(trace_distance(excited(), ground()), WithinAbs(1.0, 1e-14));
  REQUIRE_THAT(trace_distance(mixed(), QState(diag2(0.75, 0.25))),
               WithinAbs(0.25, 1e-14));
}

TEST_CASE("partial trace on products, Bell pairs and randomized states",
          "[qcore]") {
  const QState a(diag2(0.2, 0.8));
  const QState b(diag2(0.6, 0.4));
  const QState ab(kron(a.matrix(), b.matrix()));
  REQUIRE_THAT((partial_trace(ab, {2, 2}, Keep::A).matrix() - a.matrix())
                   .cwiseAbs()
                   .maxCoeff(),
               WithinAbs(0.0, 1e-13));
  REQUIRE_THAT((partial_trace(ab, {2, 2}, Keep::B).matrix() - b.matrix())
                   .cwiseAbs()
                   .maxCoeff(),
               WithinAbs(0.0, 1e-13));

  // Bell state reduces to the maximally mixed state.
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell[0] = 1.0 / std::sqrt(2.0);
  bell[3] = 1.0 / std::sqrt(2.0);
  const QState phi(bell * bell.adjoint());
  REQUIRE_THAT((partial_trace(phi, {2, 2}, Keep::A).matrix() -
                0.5 * identity(2))
                   .cwiseAbs()
                   .maxCoeff(),
               WithinAbs(0.0, 1e-14));
  REQUIRE_THAT(mutual_information(phi, {2, 2}),
               WithinAbs(2.0 * std::log(2.0), 1e-13));
  REQUIRE_THAT(mutual_information(ab, {2, 2}), WithinAbs(0.0, 1e-12));

  SECTION("trace and positivity preservation on random bipartite states") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
      const QState joint = random_state(rng, 6);
      for (Keep k : {Keep::A, Keep::B}) {
        const QState red = partial_trace(joint, {2, 3}, k);
        REQUIRE_THAT(std::abs(red.matrix().trace() - Complex(1.0)),
                     WithinAbs(0.0, 1e-12));
        Eigen::SelfAdjointEigenSolver<Matrix> es(red.matrix());
        REQUIRE(es.eigenvalues().minCoeff() >= -1e-12);
      }
    }
  }
}

TEST_CASE("gibbs states", "[qcore]") {
  Matrix h = diag2(1.0, 0.0);

  SECTION("infinite temperature gives the maximally mixed state") {
    const GibbsState g = gibbs_state(HermitianOp(h), 0.0);
    REQUIRE_THAT((g.state.matrix() - 0.5 * identity(2)).cwiseAbs().maxCoeff(),
                 WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(g.log_partition, WithinAbs(std::log(2.0), 1e-14));
  }
  SECTION("two-level closed form at beta = 1") {
    const GibbsState g = gibbs_state(HermitianOp(h), 1.0);
    const double z = 1.0 + std::exp(-1.0);
    REQUIRE_THAT(g.state.matrix()(0, 0).real(),
                 WithinAbs(std::exp(-1.0) / z, 1e-14));
    REQUIRE_THAT(g.state.matrix()(1, 1).real(), WithinAbs(1.0 / z, 1e-14));
    REQUIRE_THAT(g.log_partition, WithinAbs(std::log(z), 1e-14));
  }
  SECTION("degenerate spectrum gives the maximally mixed state") {
    const GibbsState g = gibbs_state(HermitianOp(diag2(2.5, 2.5)), 2.0);
    REQUIRE_THAT((g.state.matrix() - 0.5 * identity(2)).cwiseAbs().maxCoeff(),
                 WithinAbs(0.0, 1e-14));
  }
  SECTION("thermal state commutes with its Hamiltonian") {
    Matrix h3 = Matrix::Zero(3, 3);
    h3 << 1.0, Complex(0, 0.3), 0.0, Complex(0, -0.3), 0.5, 0.1, 0.0, 0.1, 0.2;
    const GibbsState g = gibbs_state(HermitianOp(h3), 1.7);
    const Matrix comm = g.state.matrix() * h3 - h3 * g.state.matrix();
    REQUIRE_THAT(comm.cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-10));
  }
  SECTION("maximizes entropy at fixed mean energy") {
    Matrix h3 = Matrix::Zero(3, 3);
    h3.diagonal() << 0.0, 1.0, 2.0;
    const GibbsState g = gibbs_state(HermitianOp(h3), 0.8);
    // Diagonal perturbation with zero trace and zero mean energy.
    Eigen::Vector3d d(1.0, -2.0, 1.0);
    for (double eps : {1e-3, -1e-3, 5e-3}) {
      Matrix pert = g.state.matrix();
      for (int i = 0; i < 3; ++i) pert(i, i) += eps * d[i];
      const QState q(pert);
      const double denergy =
          ((q.matrix() - g.state.matrix()) * h3).trace().real();
      REQUIRE_THAT(denergy, WithinAbs(0.0, 1e-12));
      REQUIRE(von_neumann_entropy(q) < von_neumann_entropy(g.state));
    }
  }
}

TEST_CASE("bloch chart round trip and conventions", "[qcore]") {
  // The chart points +z toward the excited state.
  const BlochVector up = bloch_from_state(excited());
  REQUIRE_THAT(up.r, WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(up.theta, WithinAbs(0.0, 1e-12));

  REQUIRE_THAT(bloch_from_state(mixed()).r, WithinAbs(0.0, 1e-14));

  const QState sx_half = state_from_bloch({0.5, M_PI / 2.0, 0.0});
  REQUIRE_THAT((sx_half.matrix() - 0.5 * (identity(2) + 0.5 * sigma_x()))
                   .cwiseAbs()
                   .maxCoeff(),
               WithinAbs(0.0, 1e-13));

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const BlochVector b{uni(rng), uni(rng) * M_PI, uni(rng) * 2.0 * M_PI};
    const QState s = state_from_bloch(b);
    const BlochVector back = bloch_from_state(s);
    const QState s2 = state_from_bloch(back);
    REQUIRE_THAT((s.matrix() - s2.matrix()).cwiseAbs().maxCoeff(),
                 WithinAbs(0.0, 1e-10));
  }

  Matrix m3 = Matrix::Identity(3, 3);
  m3 /= 3.0;
  REQUIRE_THROWS_AS(bloch_from_state(QState(m3)), DimMismatch);
  REQUIRE_THROWS_AS(state_from_bloch({1.2, 0.0, 0.0}), NotPositive);
}

TEST_CASE("clamped matrix logarithm", "[qcore]") {
  const HermitianOp l1 = matrix_log_clamped(mixed());
  REQUIRE_THAT((l1.matrix + std::log(2.0) * identity(2)).cwiseAbs().maxCoeff(),
               WithinAbs(0.0, 1e-13));

  const HermitianOp l2 = matrix_log_clamped(QState(diag2(0.3, 0.7)));
  REQUIRE_THAT(l2.matrix(0, 0).real(), WithinAbs(std::log(0.3), 1e-13));
  REQUIRE_THAT(l2.matrix(1, 1).real(), WithinAbs(std::log(0.7), 1e-13));

  const HermitianOp l3 = matrix_log_clamped(excited(), 1e-12);
  REQUIRE(std::isfinite(l3.matrix(0, 0).real()));
  REQUIRE_THAT(l3.matrix(0, 0).real(), WithinAbs(std::log(1e-12), 1e-6));
  REQUIRE_THAT(l3.matrix(1, 1).real(), WithinAbs(0.0, 1e-11));
}
