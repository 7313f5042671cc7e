// SPDX-License-Identifier: Apache-2.0
//
// irsopt: manifold optimization for IRS-aided multi-user downlink rate maximization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "doctest.h"

#include <numbers>

#include "irsopt/baselines.hpp"
#include "irsopt/domalo.hpp"
#include "irsopt/errors.hpp"
#include "support/oracles.hpp"

using namespace irsopt;
using testing::Rng;

namespace {

struct Instance {
  ChannelSet ch;
  SystemConfig sys;
};

Instance small_instance(Rng& rng, int n, std::vector<int> panels, int k, bool lambda) {
  return {testing::random_channels(rng, n, panels, k, lambda), testing::small_system(n, panels, k)};
}

Eigen::VectorXd random_zeta(Rng& rng, int k) {
  Eigen::VectorXd z(k);
  for (int i = 0; i < k; ++i) z[i] = rng.uniform(0.1, 3.0);
  return z;
}

}  // namespace

TEST_CASE("zeta update") {
  Rng rng(31);
  const auto in = small_instance(rng, 3, {2, 2}, 2, false);
  const ReflectionVector u = rng.oblique(4);
  CHECK(update_zeta(CMatrix::Zero(3, 2), u, in.ch, in.sys).norm() == 0.0);

  const auto one = small_instance(rng, 3, {2}, 1, false);
  const CMatrix v = rng.matrix(3, 1);
  const ReflectionVector u1 = rng.oblique(2);
  CHECK(update_zeta(v, u1, one.ch, one.sys)[0] == sinr(0, v, u1, one.ch, one.sys));
}

TEST_CASE("auxiliary objective recovers the sum-rate at zeta = SINR") {
  Rng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    auto in = small_instance(rng, 3, {2, 2}, 3, false);
    in.sys.weights = {rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2)};
    const ReflectionVector u = rng.oblique(4);
    const CMatrix V = rng.matrix(3, 3);
    const Eigen::VectorXd zeta = update_zeta(V, u, in.ch, in.sys);
    CHECK(std::abs(sumrate_auxiliary(V, u, zeta, in.ch, in.sys) - weighted_sum_rate(V, u, in.ch, in.sys)) <= 1e-10);
    // Any other zeta gives a lower bound.
    CHECK(sumrate_auxiliary(V, u, zeta * 1.3, in.ch, in.sys) <= weighted_sum_rate(V, u, in.ch, in.sys) + 1e-12);
  }
}

TEST_CASE("beamformer cost and gradient") {
  Rng rng(33);
  SUBCASE("slack-only point has zero cost and gradient") {
    const auto in = small_instance(rng, 3, {2, 2}, 2, false);
    CMatrix slack = CMatrix::Zero(4, 2);
    slack(3, 0) = 1.0;
    const SpherePoint x(slack);
    const Eigen::VectorXd zeta = random_zeta(rng, 2);
    const ReflectionVector u = rng.oblique(4);
    CHECK(sumrate_cost_v(x, u, zeta, in.ch, in.sys) == 0.0);
    CHECK(sumrate_egrad_v(x, u, zeta, in.ch, in.sys).norm() == 0.0);
  }
  SUBCASE("single user matches the hand-derived quotient rule") {
    // f = z |c|^2 / (|c|^2 + s), c = h^H v  =>  Egrad = 2 z s c h / (|c|^2 + s)^2
    const auto in = small_instance(rng, 3, {2}, 1, false);
    const ReflectionVector u = rng.oblique(2);
    const SpherePoint x = rng.sphere(4, 1);
    const Eigen::VectorXd zeta = Eigen::VectorXd::Constant(1, 0.7);
    CVector h = CVector::Zero(4);
    h.head(3) = std::sqrt(in.sys.power_budget) * effective_channel(0, u, in.ch).adjoint();
    const cd c = h.dot(x.matrix().col(0));
    const double z = 1.7, s = in.sys.noise_power[0];
    const double p = std::norm(c);
    CHECK(sumrate_cost_v(x, u, zeta, in.ch, in.sys) == doctest::Approx(z * p / (p + s)).epsilon(1e-13));
    const CVector expected = 2.0 * z * s / ((p + s) * (p + s)) * c * h;
    CHECK((sumrate_egrad_v(x, u, zeta, in.ch, in.sys).col(0) - expected).norm() <= 1e-12 * expected.norm());
  }
  SUBCASE("finite differences at N = 4, M = 4, S = 2, K = 2") {
    const auto in = small_instance(rng, 4, {4, 4}, 2, false);
    const ReflectionVector u = rng.oblique(8);
    const Eigen::VectorXd zeta = random_zeta(rng, 2);
    const SpherePoint x = rng.sphere(5, 2);
    const double err = testing::sphere_gradient_error(
        [&](const SpherePoint& p) { return sumrate_cost_v(p, u, zeta, in.ch, in.sys); },
        [&](const SpherePoint& p) { return sumrate_egrad_v(p, u, zeta, in.ch, in.sys); }, x, rng);
    CHECK(err <= 1e-5);
  }
  SUBCASE("selector identity") {
    const SpherePoint x = rng.sphere(4, 3);
    for (int j = 0; j < 3; ++j) {
      CHECK((x.matrix() * CMatrix::Identity(3, 3).col(j) - x.matrix().col(j)).norm() == 0.0);
    }
  }
}

TEST_CASE("reflection cost and gradient") {
  Rng rng(34);
  SUBCASE("zero beamformer") {
    const auto in = small_instance(rng, 3, {2, 2}, 2, false);
    CHECK(sumrate_cost_u(rng.oblique(4), CMatrix::Zero(3, 2), random_zeta(rng, 2), in.ch, in.sys) == 0.0);
  }
  SUBCASE("unit zeta-tilde gives sum of r / (1 + r)") {
    const auto in = small_instance(rng, 3, {2, 2}, 3, false);
    const ReflectionVector u = rng.oblique(4);
    const CMatrix V = rng.matrix(3, 3);
    double expected = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double r = sinr(k, V, u, in.ch, in.sys);
      expected += r / (1.0 + r);
    }
    CHECK(sumrate_cost_u(u, V, Eigen::VectorXd::Zero(3), in.ch, in.sys) == doctest::Approx(expected).epsilon(1e-13));
  }
  SUBCASE("finite differences at N = 4, M = 4, S = 2, K = 2") {
    const auto in = small_instance(rng, 4, {4, 4}, 2, false);
    const CMatrix V = rng.matrix(4, 2);
    const Eigen::VectorXd zeta = random_zeta(rng, 2);
    const double err = testing::oblique_gradient_error(
        [&](const ObliquePoint& p) { return sumrate_cost_u(p, V, zeta, in.ch, in.sys); },
        [&](const ObliquePoint& p) { return sumrate_egrad_u(p, V, zeta, in.ch, in.sys); },
        rng.oblique(8), rng);
    CHECK(err <= 1e-5);
  }
}

TEST_CASE("inter-IRS gradients") {
  Rng rng(35);
  const auto in = small_instance(rng, 2, {2, 2}, 2, true);
  const Eigen::VectorXd zeta = random_zeta(rng, 2);
  const ReflectionVector u = rng.oblique(4);
  const CMatrix V = rng.matrix(2, 2);
  const LinkMode mode = LinkMode::with_inter_irs;
  CHECK(testing::sphere_gradient_error(
            [&](const SpherePoint& p) { return sumrate_cost_v(p, u, zeta, in.ch, in.sys, mode); },
            [&](const SpherePoint& p) { return sumrate_egrad_v(p, u, zeta, in.ch, in.sys, mode); },
            rng.sphere(3, 2), rng) <= 1e-5);
  CHECK(testing::oblique_gradient_error(
            [&](const ObliquePoint& p) { return sumrate_cost_u(p, V, zeta, in.ch, in.sys, mode); },
            [&](const ObliquePoint& p) { return sumrate_egrad_u(p, V, zeta, in.ch, in.sys, mode); },
            rng.oblique(4), rng) <= 1e-5);
  // Cost with the cascade matches the brute-force composite channel.
  const auto gains = testing::loop_gains(testing::loop_channel_rows(u.vector(), in.ch, true), V);
  double expected = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double total = gains[k][0] + gains[k][1] + in.sys.noise_power[k];
    expected += (1.0 + zeta[k]) * gains[k][k] / total;
  }
  CHECK(sumrate_cost_u(u, V, zeta, in.ch, in.sys, mode) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("run_domalo") {
  const SystemConfig sys = SystemConfig::uniform(10, 10, 2, 3, dbm_to_watts(30), dbm_to_watts(-80));
  const ChannelSet ch = synthesize_channels(sys, GeometryConfig{}, ChannelParams{}, 5);

  SUBCASE("zero outer budget returns the initialization") {
    DomaloOptions o;
    o.max_outer = 0;
    const SolverInit init = default_init(ch, sys);
    const SolveResult r = run_domalo(ch, sys, o, init);
    CHECK(r.vhat == init.vhat);
    CHECK(r.u == init.u);
    CHECK(r.report.iterations == 0);
    CHECK(r.report.trace.empty());
    CHECK(r.report.final_objective == r.report.initial_objective);
  }
  SUBCASE("monotone trace and power feasibility") {
    DomaloOptions o;
    o.max_outer = 10;
    const SolveResult r = run_domalo(ch, sys, o);
    double prev = r.report.initial_objective;
    for (const auto& e : r.report.trace) {
      CHECK(e.objective >= prev - 1e-9);
      prev = e.objective;
    }
    CHECK((r.V * r.V.adjoint()).trace().real() <= sys.power_budget + 1e-9);
    CHECK(r.report.final_objective == doctest::Approx(weighted_sum_rate(r.V, r.u, ch, sys)).epsilon(1e-14));
  }
  SUBCASE("shape errors") {
    DomaloOptions o;
    const SolverInit bad{SpherePoint::normalized(CMatrix::Ones(4, 3)), ReflectionVector::ones(20)};
    CHECK_THROWS_AS(run_domalo(ch, sys, o, bad), DimensionError);
  }
}

TEST_CASE("single user beats a random reflection") {
  const SystemConfig sys = SystemConfig::uniform(5, 5, 1, 1, dbm_to_watts(30), dbm_to_watts(-80));
  GeometryConfig geo;
  geo.irs_positions = {{24.0, 10.0}};
  double ours = 0.0, rand = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    const ChannelSet ch = synthesize_channels(sys, geo, ChannelParams{}, seed);
    ours += run_domalo(ch, sys, DomaloOptions{}).report.final_objective;
    rand += run_baseline(BaselineKind::random_phi, ch, sys, BaselineOptions{}, seed).report.final_objective;
  }
  CHECK(ours >= rand);
}

TEST_CASE("inter-IRS loop with a zero cascade follows the direct loop") {
  const SystemConfig sys = SystemConfig::uniform(5, 5, 2, 2, dbm_to_watts(30), dbm_to_watts(-80));
  ChannelSet ch = synthesize_channels(sys, GeometryConfig{}, ChannelParams{}, 8);
  ch.mutable_inter_irs()->setZero();
  DomaloOptions o;
  o.max_outer = 8;
  const SolveResult a = run_domalo(ch, sys, o);
  const SolveResult b = run_domalo_inter_irs(ch, sys, o);
  REQUIRE(a.report.trace.size() == b.report.trace.size());
  for (std::size_t i = 0; i < a.report.trace.size(); ++i) {
    CHECK(std::abs(a.report.trace[i].objective - b.report.trace[i].objective) <= 1e-8);
  }

  o.inter_irs_update = InterIrsUpdate::sequential;
  ChannelSet live = synthesize_channels(sys, GeometryConfig{}, ChannelParams{}, 8);
  const SolveResult c = run_domalo_inter_irs(live, sys, o);
  double prev = c.report.initial_objective;
  for (const auto& e : c.report.trace) {
    CHECK(e.objective >= prev - 1e-9);
    prev = e.objective;
  }

  const SystemConfig one = SystemConfig::uniform(5, 5, 1, 2, 1.0, 1e-11);
  GeometryConfig geo;
  geo.irs_positions = {{10.0, 24.0}};
  CHECK_THROWS_AS(run_domalo_inter_irs(synthesize_channels(one, geo, ChannelParams{}, 1), one, o),
                  UnsupportedConfiguration);
}

TEST_CASE("phase quantization") {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  // Oracle: enumerate every level and take the smallest wrap-around distance.
  auto nearest = [&](double phase, int q) {
    double best = 0.0, best_d = 1e9;
    for (int i = 0; i < q; ++i) {
      const double level = kTwoPi * i / q;
      double d = std::fmod(std::abs(phase - level), kTwoPi);
      d = std::min(d, kTwoPi - d);
      if (d < best_d - 1e-15) {
        best_d = d;
        best = level;
      }
    }
    return best;
  };

  Eigen::VectorXd grid(4);
  grid << 0.0, kTwoPi / 4, kTwoPi / 2, 3 * kTwoPi / 4;
  const ReflectionVector on_grid = ReflectionVector::from_phases(grid);
  CHECK((quantize_phases(on_grid, 4).vector() - on_grid.vector()).norm() <= 1e-15);

  Rng rng(36);
  const ReflectionVector u = rng.oblique(50);
  const ReflectionVector q1 = quantize_phases(u, 1);
  for (Eigen::Index i = 0; i < 50; ++i) CHECK(q1.vector()[i] == cd(1.0, 0.0));

  const ReflectionVector near_wrap = ReflectionVector::from_phases(Eigen::VectorXd::Constant(1, kTwoPi - 0.01));
  CHECK(std::abs(quantize_phases(near_wrap, 4).vector()[0] - cd(1.0, 0.0)) <= 1e-15);
  CHECK(nearest(kTwoPi - 0.01, 4) == 0.0);

  for (int q : {2, 3, 4, 8, 16}) {
    const Eigen::VectorXd ph = quantize_phases(u, q).phases();
    const Eigen::VectorXd orig = u.phases();
    for (Eigen::Index i = 0; i < 50; ++i) {
      const double expected = nearest(orig[i], q);
      double d = std::abs(ph[i] - expected);
      d = std::min(d, kTwoPi - d);
      CHECK(d <= 1e-12);
    }
  }
  CHECK_THROWS_AS(quantize_phases(u, 0), PreconditionError);
}
