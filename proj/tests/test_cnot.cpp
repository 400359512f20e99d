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

#include "fluxlab/models.hpp"
#include "fluxlab/thermoflux.hpp"

using namespace fluxlab;
using namespace fluxlab::models;
using qcore::Matrix;
using qcore::QState;
using Catch::Matchers::WithinAbs;

namespace {

QState excited() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = 1.0;
  return QState(m);
}

CnotParams base(double a, double gamma) {
  CnotParams p;
  p.a = a;
  p.gamma = gamma;
  return p;
}

}  // namespace

TEST_CASE("control-induced rate", "[cnot]") {
  REQUIRE_THAT(cnot_rate_cx(0.0, 0.3), WithinAbs(0.0, 1e-15));
  for (double t : {0.3, 1.0, 2.5}) {
    REQUIRE_THAT(cnot_rate_cx(t, 0.0), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(cnot_rate_cx(t, 1.0), WithinAbs(0.0, 1e-15));
  }
  // 0.21 / 0.58 at a quarter period.
  REQUIRE_THAT(cnot_rate_cx(M_PI / 2.0, 0.3),
               WithinAbs(0.36206896551724138, 1e-14));
  REQUIRE_THROWS_AS(cnot_rate_cx(M_PI, 0.5), SingularRadius);
}

TEST_CASE("rate amplitude closed form and grid maximization", "[cnot]") {
  REQUIRE_THAT(cnot_amplitude_cx(0.0), WithinAbs(0.0, 1e-15));
  REQUIRE_THAT(cnot_amplitude_cx(0.3), WithinAbs(0.525, 1e-14));
  REQUIRE(std::isinf(cnot_amplitude_cx(0.5)));

  for (double a : {0.05, 0.15, 0.25, 0.35, 0.45}) {
    double peak = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * M_PI * (i + 0.5) / n;
      peak = std::max(peak, std::abs(cnot_rate_cx(t, a)));
    }
    REQUIRE_THAT(cnot_amplitude_cx(a), WithinAbs(peak, 1e-6));
  }
}

TEST_CASE("reduced equation structure", "[cnot]") {
  const lindblad::MasterEquation me = cnot_master_equation(base(0.3, 0.4));
  REQUIRE(me.channels.size() == 4);
  REQUIRE(me.channels[0].label == "C,x");
  REQUIRE(me.channels[1].label == "dep,x");

  // Rate triple {gamma + gamma_cx, gamma, gamma} / 2 at sampled times.
  for (double t : {0.2, 1.3, 4.0}) {
    const double combined =
        me.channels[0].rate(t) + me.channels[1].rate(t);
    REQUIRE_THAT(combined, WithinAbs(0.5 * (0.4 + cnot_rate_cx(t, 0.3)), 1e-14));
    REQUIRE_THAT(me.channels[2].rate(t), WithinAbs(0.2, 1e-15));
    REQUIRE_THAT(me.channels[3].rate(t), WithinAbs(0.2, 1e-15));
  }
  for (const auto& ch : me.channels) REQUIRE(ch.beta == 0.0);

  SECTION("a = 0 turns off the drive and the control channel") {
    const lindblad::MasterEquation m0 = cnot_master_equation(base(0.0, 0.4));
    for (double t : {0.0, 0.7, 2.0}) {
      REQUIRE_THAT(m0.hamiltonian(t).cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-15));
      REQUIRE_THAT(m0.channels[0].rate(t), WithinAbs(0.0, 1e-15));
    }
  }
}

TEST_CASE("closed-form state", "[cnot]") {
  SECTION("initial condition is reproduced exactly") {
    CnotParams p = base(0.3, 0.2);
    p.r0 = 0.8;
    p.theta0 = 1.1;
    p.phi0 = 2.0;
    const QState s0 = cnot_analytic_state(p, 0.0);
    const QState ref = qcore::state_from_bloch({p.r0, p.theta0, p.phi0});
    REQUIRE_THAT((s0.matrix() - ref.matrix()).cwiseAbs().maxCoeff(),
                 WithinAbs(0.0, 1e-14));
  }
  SECTION("half-period radius with no damping") {
    const QState s = cnot_analytic_state(base(0.3, 0.0), M_PI);
    REQUIRE_THAT(qcore::bloch_from_state(s).r, WithinAbs(0.4, 1e-12));
  }
  SECTION("a = 0 is plain depolarizing decay of the excited state") {
    const double g = 0.25, t = 1.7;
    const QState s = cnot_analytic_state(base(0.0, g), t);
    REQUIRE_THAT(s.matrix()(1, 1).real(),
                 WithinAbs(0.5 * (1.0 + std::exp(-2.0 * g * t)), 1e-13));
    REQUIRE_THAT(s.matrix()(0, 0).real(),
                 WithinAbs(0.5 * (1.0 - std::exp(-2.0 * g * t)), 1e-13));
  }
  SECTION("radius follows the contraction formula") {
    CnotParams p = base(0.45, 0.15);
    p.r0 = 0.9;
    p.theta0 = 0.8;
    p.phi0 = 1.9;
    for (double t : {0.3, 1.1, 5.2}) {
      REQUIRE_THAT(qcore::bloch_from_state(cnot_analytic_state(p, t)).r,
                   WithinAbs(cnot_analytic_radius(p, t), 1e-12));
    }
  }
}

TEST_CASE("closed-form state solves the reduced equation", "[cnot]") {
  const CnotParams p = base(0.3, 0.2);
  const lindblad::MasterEquation me = cnot_master_equation(p);
  const double h = 1e-5;
  for (double t : {h, 0.6, 2.9}) {
    const Matrix fd = (cnot_analytic_state(p, t + h).matrix() -
                       cnot_analytic_state(p, t - h).matrix()) /
                      (2.0 * h);
    const Matrix gen = lindblad::rhs(me, t, cnot_analytic_state(p, t));
    REQUIRE_THAT((fd - gen).cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-8));
  }
}

TEST_CASE("reduced integration matches the closed form", "[cnot]") {
  const CnotParams p = base(0.3, 0.1);
  const lindblad::MasterEquation me = cnot_master_equation(p);
  const lindblad::Trajectory traj = lindblad::evolve(me, excited(), 0.0, 8.0, 1e-3);
  for (std::size_t i = 800; i < traj.times.size(); i += 1600) {
    const QState ana = cnot_analytic_state(p, traj.times[i]);
    REQUIRE(qcore::trace_distance(traj.states[i], ana) <= 1e-6);
  }
}

TEST_CASE("two-qubit oracle", "[cnot]") {
  SECTION("pure control values give a unitary rotation of the target") {
    const CnotParams p = base(1.0, 0.0);
    const QState c1 = cnot_control_state(1.0);
    const QState out = cnot_full_pair_oracle(p, c1, excited(), M_PI);
    // Half period of the x rotation flips |1> to |0>.
    REQUIRE_THAT(out.matrix()(0, 0).real(), WithinAbs(1.0, 1e-9));
  }
  SECTION("reduced closed form agrees with the oracle") {
    const CnotParams p = base(0.3, 0.1);
    const QState c = cnot_control_state(0.3);
    for (double t : {1.0, 7.0, 20.0}) {
      const QState oracle = cnot_full_pair_oracle(p, c, excited(), t);
      const QState ana = cnot_analytic_state(p, t);
      REQUIRE(qcore::trace_distance(oracle, ana) <= 1e-6);
    }
  }
  SECTION("the control population never moves") {
    const CnotParams p = base(0.3, 0.25);
    const lindblad::MasterEquation me = cnot_pair_equation(p);
    const QState joint(
        qcore::kron(cnot_control_state(0.3).matrix(), excited().matrix()));
    const lindblad::Trajectory traj = lindblad::evolve(me, joint, 0.0, 6.0, 1e-3);
    for (std::size_t i = 0; i < traj.states.size(); i += 1500) {
      const QState c =
          qcore::partial_trace(traj.states[i], {2, 2}, qcore::Keep::A);
      REQUIRE_THAT(c.matrix()(1, 1).real(), WithinAbs(0.3, 1e-9));
    }
  }
}

TEST_CASE("closed-form fluxes", "[cnot]") {
  SECTION("x channels never move heat") {
    CnotParams p = base(0.35, 0.2);
    p.theta0 = 1.2;
    p.phi0 = 0.4;
    p.r0 = 0.95;
    for (double t : {0.05, 1.0, 3.3}) {
      const thermoflux::FluxSample s = cnot_analytic_fluxes(p, t);
      REQUIRE(s.per_channel[0].heat_rate == 0.0);
      REQUIRE(s.per_channel[1].heat_rate == 0.0);
    }
  }
  SECTION("plain depolarizing total flux at gamma t = 1/2") {
    const double g = 0.1, t = 5.0;
    const thermoflux::FluxSample s = cnot_analytic_fluxes(base(0.0, g), t);
    const double expect =
        -2.0 * g * std::exp(-1.0) * std::atanh(std::exp(-1.0));
    REQUIRE_THAT(s.total_flux, WithinAbs(expect, 1e-12));
    REQUIRE_THAT(s.total_flux / g, WithinAbs(-0.284, 5e-4));
  }
  SECTION("total is the channel sum") {
    CnotParams p = base(0.3, 0.4);
    for (double t : {0.1, 0.9, 2.2, 6.0}) {
      const thermoflux::FluxSample s = cnot_analytic_fluxes(p, t);
      double sum = 0.0;
      for (const auto& cf : s.per_channel) sum += cf.flux;
      REQUIRE_THAT(s.total_flux - sum, WithinAbs(0.0, 1e-10));
    }
  }
  SECTION("pure initial state is singular at t = 0") {
    REQUIRE_THROWS_AS(cnot_analytic_fluxes(base(0.3, 0.1), 0.0),
                      SingularAtPureState);
  }
}

TEST_CASE("flux formulas agree with the dissipator algebra",
          "[cnot][property]") {
  // Two independent code paths: trace algebra with the clamped logarithm on
  // the closed-form state, against the per-channel closed forms.
  CnotParams p = base(0.3, 0.4);
  p.r0 = 0.9;
  p.theta0 = 1.05;
  p.phi0 = 0.6;
  const lindblad::MasterEquation me = cnot_master_equation(p);
  for (double t : {0.05, 0.6, 1.8, 4.4, 9.0}) {
    const QState rho = cnot_analytic_state(p, t);
    const qcore::HermitianOp h(me.hamiltonian(t));
    const thermoflux::FluxSample ana = cnot_analytic_fluxes(p, t);
    for (std::size_t c = 0; c < me.channels.size(); ++c) {
      const auto& ch = me.channels[c];
      REQUIRE_THAT(thermoflux::heat_rate_channel(ch, t, rho, h),
                   WithinAbs(ana.per_channel[c].heat_rate, 1e-10));
      REQUIRE_THAT(thermoflux::entropy_rate_channel(ch, t, rho),
                   WithinAbs(ana.per_channel[c].entropy_rate, 1e-9));
      REQUIRE_THAT(thermoflux::flux_channel(ch, t, rho, h),
                   WithinAbs(ana.per_channel[c].flux, 1e-9));
    }
  }
}

TEST_CASE("channel entropy rates sum to the entropy derivative",
          "[cnot][property]") {
  const CnotParams p = base(0.0, 0.3);
  const lindblad::MasterEquation me = cnot_master_equation(p);
  const double h = 1e-5;
  for (double t : {0.4, 1.5, 3.0}) {
    const double fd =
        (qcore::von_neumann_entropy(cnot_analytic_state(p, t + h)) -
         qcore::von_neumann_entropy(cnot_analytic_state(p, t - h))) /
        (2.0 * h);
    const QState rho = cnot_analytic_state(p, t);
    double sum = 0.0;
    for (const auto& ch : me.channels)
      sum += thermoflux::entropy_rate_channel(ch, t, rho);
    REQUIRE_THAT(sum, WithinAbs(fd, 1e-7));
  }
}
