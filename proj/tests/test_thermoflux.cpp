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

#include "fluxlab/thermoflux.hpp"

using namespace fluxlab;
using namespace fluxlab::thermoflux;
using lindblad::MasterEquation;
using lindblad::Trajectory;
using qcore::Complex;
using qcore::HermitianOp;
using qcore::Matrix;
using qcore::QState;
using Catch::Matchers::WithinAbs;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

/// Two-level system with energy gap omega coupled to a thermal bath at
/// inverse temperature beta (detailed-balance decay/pump pair).
MasterEquation thermal_qubit(double omega, double beta, double gamma) {
  MasterEquation me;
  me.dim = 2;
  Matrix h = diag2(0.0, omega);
  me.hamiltonian = [h](double) { return h; };
  const double down = gamma;
  const double up = gamma * std::exp(-beta * omega);
  lindblad::Channel decay = lindblad::make_channel(
      "decay", qcore::sigma_minus(), [down](double) { return down; }, beta);
  lindblad::Channel pump = lindblad::make_channel(
      "pump", qcore::sigma_plus(), [up](double) { return up; }, beta);
  me.channels.push_back(std::move(decay));
  me.channels.push_back(std::move(pump));
  return me;
}

}  // namespace

TEST_CASE("nonequilibrium information", "[thermoflux]") {
  const HermitianOp h(diag2(0.0, 1.0));
  const QState eq = qcore::gibbs_state(h, 1.3).state;
  REQUIRE_THAT(neq_information(eq, h, 1.3), WithinAbs(0.0, 1e-12));

  const HermitianOp trivial(Matrix::Zero(2, 2));
  const QState pure(diag2(0.0, 1.0));
  REQUIRE_THAT(neq_information(pure, trivial, 0.7),
               WithinAbs(std::log(2.0), 1e-12));

  // ln 2 - S(diag(0.9, 0.1)) against the maximally mixed equilibrium.
  REQUIRE_THAT(neq_information(QState(diag2(0.9, 0.1)), trivial, 0.0),
               WithinAbs(0.3680642071684969, 1e-13));
}

TEST_CASE("extractable work", "[thermoflux]") {
  const HermitianOp h(diag2(1.0, 0.0));
  const double beta = 1.0;
  const QState eq = qcore::gibbs_state(h, beta).state;
  REQUIRE_THAT(extractable_work(eq, h, beta), WithinAbs(0.0, 1e-11));

  // One fully known bit against a trivial Hamiltonian.
  const HermitianOp trivial(Matrix::Zero(2, 2));
  const QState pure(diag2(1.0, 0.0));
  for (double b : {0.5, 1.0, 2.0}) {
    REQUIRE_THAT(extractable_work(pure, trivial, b),
                 WithinAbs(std::log(2.0) / b, 1e-12));
  }

  // Excited pure state against its own gap: (1/beta) S(rho || rho_eq).
  const double z = 1.0 + std::exp(-1.0);
  REQUIRE_THAT(extractable_work(QState(diag2(1.0, 0.0)), h, 1.0),
               WithinAbs(1.0 + std::log(z), 1e-12));

  REQUIRE_THROWS_AS(extractable_work(pure, trivial, 0.0),
                    InfiniteTemperature);
}

TEST_CASE("unital channels move no heat or entropy at the mixed state",
          "[thermoflux]") {
  const lindblad::Channel ch = lindblad::make_channel(
      "x", qcore::sigma_x(), [](double) { return 0.8; }, 0.0);
  const QState mixed(0.5 * qcore::identity(2));
  const HermitianOp h(diag2(0.0, 1.0));
  REQUIRE_THAT(heat_rate_channel(ch, 0.0, mixed, h), WithinAbs(0.0, 1e-14));
  REQUIRE_THAT(entropy_rate_channel(ch, 0.0, mixed), WithinAbs(0.0, 1e-13));
  REQUIRE_THAT(flux_channel(ch, 0.0, mixed, h), WithinAbs(0.0, 1e-13));
}

TEST_CASE("flux equals the rate combination and its trace form",
          "[thermoflux][property]") {
  const MasterEquation me = thermal_qubit(1.0, 0.8, 0.5);
  Matrix m(2, 2);
  m << 0.62, Complex(0.1, -0.07), Complex(0.1, 0.07), 0.38;
  const QState rho(m);
  const HermitianOp h(me.hamiltonian(0.0));

  for (const auto& ch : me.channels) {
    const double f = flux_channel(ch, 0.0, rho, h);
    const double er = entropy_rate_channel(ch, 0.0, rho);
    const double q = heat_rate_channel(ch, 0.0, rho, h);
    REQUIRE_THAT(f, WithinAbs(-(er - ch.beta * q), 1e-14));
    // Direct trace form gamma Tr(R{rho}(ln rho + beta H)).
    const Matrix kernel = lindblad::dissipator(ch, rho);
    const Matrix weight =
        qcore::matrix_log_clamped(rho).matrix + ch.beta * h.matrix;
    const double direct = ch.rate(0.0) * (kernel * weight).trace().real();
    REQUIRE_THAT(f, WithinAbs(direct, 1e-12));
  }

  SECTION("beta = 0 reduces to the negative entropy rate bitwise") {
    const lindblad::Channel hot = lindblad::make_channel(
        "hot", qcore::sigma_x(), [](double) { return 0.7; }, 0.0);
    REQUIRE(flux_channel(hot, 0.0, rho, h) ==
            -entropy_rate_channel(hot, 0.0, rho));
  }
}

TEST_CASE("entropy production vanishes at the thermal fixed point",
          "[thermoflux]") {
  const double omega = 1.0, beta = 0.8;
  const MasterEquation me = thermal_qubit(omega, beta, 0.5);
  const QState eq = qcore::gibbs_state(HermitianOp(diag2(0.0, omega)), beta).state;
  REQUIRE_THAT(entropy_production_rate(me, eq, 0.0), WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(total_flux(me, eq, 0.0), WithinAbs(0.0, 1e-12));
}

TEST_CASE("entropy production rate matches the finite-difference balance",
          "[thermoflux][property]") {
  const double beta = 0.8;
  const MasterEquation me = thermal_qubit(1.0, beta, 0.5);
  Matrix m(2, 2);
  m << 0.15, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.85;
  const Trajectory traj = lindblad::evolve(me, QState(m), 0.0, 2.0, 1e-3);

  // dS/dt - beta dQ/dt from entropies and heats along the trajectory.
  const double h = 1e-3;
  for (std::size_t i : {200u, 700u, 1500u}) {
    const double t = traj.times[i];
    const double ds_fd = (qcore::von_neumann_entropy(traj.states[i + 1]) -
                          qcore::von_neumann_entropy(traj.states[i - 1])) /
                         (2.0 * h);
    double heat = 0.0;
    const HermitianOp ho(me.hamiltonian(t));
    for (const auto& ch : me.channels)
      heat += heat_rate_channel(ch, t, traj.states[i], ho);
    const double epr = entropy_production_rate(me, traj.states[i], t);
    REQUIRE_THAT(epr, WithinAbs(ds_fd - beta * heat, 1e-6));
  }
}

TEST_CASE("flux trajectory bookkeeping", "[thermoflux]") {
  SECTION("no channels means no flux") {
    MasterEquation me;
    me.dim = 2;
    me.hamiltonian = [](double) -> Matrix { return 0.4 * qcore::sigma_x(); };
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(0.02 * i);
    const auto samples =
        flux_trajectory(me, QState(diag2(0.3, 0.7)), grid);
    for (const auto& s : samples) {
      REQUIRE(s.per_channel.empty());
      REQUIRE(s.total_flux == 0.0);
      REQUIRE(s.cumulative_heat == 0.0);
      REQUIRE(s.cumulative_entropy_production == 0.0);
    }
  }

  SECTION("total flux is the channel sum and entropy balance closes") {
    const double beta = 0.8;
    const MasterEquation me = thermal_qubit(1.0, beta, 0.5);
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(0.005 * i);
    const auto samples = flux_trajectory(me, QState(diag2(0.15, 0.85)), grid);
    for (const auto& s : samples) {
      double sum = 0.0;
      for (const auto& cf : s.per_channel) sum += cf.flux;
      REQUIRE(s.total_flux == sum);  // identical accumulation order
    }
    REQUIRE(samples.back().cumulative_entropy_production >= -1e-8);
  }

  SECTION("Clausius holds cumulatively for constant nonnegative rates") {
    const MasterEquation me = thermal_qubit(1.2, 1.5, 0.7);
    std::vector<double> grid;
    for (int i = 0; i <= 600; ++i) grid.push_back(0.01 * i);
    Matrix m(2, 2);
    m << 0.2, Complex(0.25, -0.15), Complex(0.25, 0.15), 0.8;
    const auto samples = flux_trajectory(me, QState(m), grid);
    for (const auto& s : samples) {
      REQUIRE(s.cumulative_entropy_production >= -1e-8);
    }
  }
}

TEST_CASE("energetics report", "[thermoflux]") {
  SECTION("constant Hamiltonian: no irreversible work, closed balance") {
    const MasterEquation me = thermal_qubit(1.0, 1.0, 0.6);
    const EnergeticsReport rep =
        energetics_report(me, QState(diag2(0.9, 0.1)), 0.0, 3.0, 1e-3);
    REQUIRE(rep.irr_work_over_kT == 0.0);
    REQUIRE_THAT(rep.delta_I_neq + rep.delta_S_irr, WithinAbs(0.0, 1e-6));
    REQUIRE_THAT(rep.residual, WithinAbs(0.0, 1e-5));
  }

  SECTION("driven unitary evolution produces no entropy") {
    MasterEquation me;
    me.dim = 2;
    me.hamiltonian = [](double t) -> Matrix {
      return Matrix(diag2(0.0, 1.0)) + 0.4 * std::sin(t) * qcore::sigma_x();
    };
    const EnergeticsReport rep = energetics_report(
        me, QState(diag2(0.75, 0.25)), 0.0, 1.5, 1e-3, /*beta=*/1.0);
    REQUIRE_THAT(rep.delta_S_irr, WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(rep.residual, WithinAbs(0.0, 1e-5));
  }

  SECTION("mixed channel temperatures are rejected") {
    MasterEquation me = thermal_qubit(1.0, 1.0, 0.6);
    me.channels[1].beta = 0.5;
    REQUIRE_THROWS_AS(
        energetics_report(me, QState(diag2(0.9, 0.1)), 0.0, 1.0, 1e-2),
        MixedTemperatures);
  }
}

TEST_CASE("bipartite identity guards", "[thermoflux]") {
  const HermitianOp h_env(diag2(0.0, 1.0));

  SECTION("trivial at t = 0") {
    const QState prod(
        qcore::kron(diag2(0.6, 0.4), qcore::gibbs_state(h_env, 1.0).state.matrix()));
    const BipartiteReport rep =
        bipartite_entropy_production(prod, prod, {2, 2}, h_env, 1.0);
    REQUIRE_THAT(rep.delta_S_irr, WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(rep.mutual_info, WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(rep.env_neq_0, WithinAbs(0.0, 1e-12));
  }

  SECTION("correlated initial states are rejected") {
    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
    bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
    const QState phi(bell * bell.adjoint());
    REQUIRE_THROWS_AS(
        bipartite_entropy_production(phi, phi, {2, 2}, h_env, 1.0),
        NotProductInitial);
  }
}
