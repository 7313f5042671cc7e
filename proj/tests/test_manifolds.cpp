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

#include "irsopt/errors.hpp"
#include "irsopt/manifolds.hpp"
#include "support/oracles.hpp"

using namespace irsopt;
using irsopt::testing::Rng;

TEST_CASE("sphere projection") {
  Rng rng(11);
  const SpherePoint x = rng.sphere(3, 2);

  SUBCASE("base point projects to zero") {
    CHECK(project_sphere(x, x.matrix()).norm() <= 1e-15);
  }
  SUBCASE("tangent input is unchanged") {
    const CMatrix xi = project_sphere(x, rng.matrix(3, 2));
    CHECK((project_sphere(x, xi) - xi).norm() <= 1e-12);
  }
  SUBCASE("matches scalar-loop oracle") {
    const CMatrix amb = rng.matrix(3, 2);
    const CMatrix expected = testing::loop_project_sphere(x.matrix(), amb);
    CHECK((project_sphere(x, amb) - expected).norm() <= 1e-13);
    CHECK(std::abs(testing::loop_inner(x.matrix(), project_sphere(x, amb))) <= 1e-8 * amb.norm());
  }
  SUBCASE("self-adjoint and idempotent") {
    const CMatrix a = rng.matrix(3, 2);
    const CMatrix b = rng.matrix(3, 2);
    CHECK(std::abs(real_inner(project_sphere(x, a), b) - real_inner(a, project_sphere(x, b))) <= 1e-10);
    const CMatrix pa = project_sphere(x, a);
    CHECK((project_sphere(x, pa) - pa).norm() <= 1e-12);
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(project_sphere(x, rng.matrix(2, 2)), DimensionError);
  }
}

TEST_CASE("oblique projection") {
  Rng rng(12);
  const ObliquePoint u = rng.oblique(4);

  CHECK(project_oblique(u, u.vector()).norm() <= 1e-15);

  // i * u_i rotates along the circle.
  const CVector rot = cd(0.0, 1.0) * u.vector();
  CHECK((project_oblique(u, rot) - rot).norm() <= 1e-12);

  const CVector amb = rng.vector(4);
  CHECK((project_oblique(u, amb) - testing::loop_project_oblique(u.vector(), amb)).norm() <= 1e-13);
  const CVector p = project_oblique(u, amb);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(std::real(p[i] * std::conj(u.vector()[i]))) <= 1e-12);
  CHECK((project_oblique(u, p) - p).norm() <= 1e-12);

  const CVector b = rng.vector(4);
  CHECK(std::abs(real_inner(project_oblique(u, amb), b) - real_inner(amb, project_oblique(u, b))) <= 1e-10);
  CHECK_THROWS_AS(project_oblique(u, rng.vector(3)), DimensionError);
}

TEST_CASE("sphere retraction") {
  Rng rng(13);
  const SpherePoint x = rng.sphere(4, 3);

  CHECK(retract_sphere(x, CMatrix::Zero(4, 3)) == x);

  for (double scale : {1e-3, 1.0, 1e3}) {
    CMatrix xi = project_sphere(x, rng.matrix(4, 3));
    xi *= scale / xi.norm();
    const SpherePoint y = retract_sphere(x, xi);
    CHECK(std::abs(y.matrix().norm() - 1.0) <= 1e-12);
  }

  CMatrix base(2, 1);
  base << 1.0, 0.0;
  CMatrix step(2, 1);
  step << 0.0, 1.0;
  const SpherePoint y = retract_sphere(SpherePoint(base), step);
  CHECK(std::abs(y.matrix()(0, 0) - 1.0 / std::sqrt(2.0)) <= 1e-15);
  CHECK(std::abs(y.matrix()(1, 0) - 1.0 / std::sqrt(2.0)) <= 1e-15);

  CHECK_THROWS_AS(retract_sphere(SpherePoint(base), -base), DegenerateRetraction);
}

TEST_CASE("oblique retraction") {
  CVector u(2);
  u << 1.0, cd(0.0, 1.0);
  const ObliquePoint x(u);
  CHECK(retract_oblique(x, CVector::Zero(2)) == x);

  CVector step(2);
  step << cd(0.0, 0.5), 0.0;
  const ObliquePoint y = retract_oblique(x, step);
  const cd first = cd(1.0, 0.5) / std::abs(cd(1.0, 0.5));
  CHECK(std::abs(y.vector()[0] - first) <= 1e-15);
  CHECK(std::abs(y.vector()[1] - cd(0.0, 1.0)) <= 1e-15);

  Rng rng(14);
  const ObliquePoint z = rng.oblique(6);
  CVector big = project_oblique(z, rng.vector(6));
  big *= 1e3 / big.norm();
  const ObliquePoint w = retract_oblique(z, big);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(std::abs(std::abs(w.vector()[i]) - 1.0) <= 1e-12);

  CHECK_THROWS_AS(retract_oblique(x, -x.vector()), DegenerateRetraction);
}

TEST_CASE("retractions are first order") {
  Rng rng(15);
  const SpherePoint x = rng.sphere(3, 2);
  CMatrix xi = project_sphere(x, rng.matrix(3, 2));
  xi /= xi.norm();
  const ObliquePoint u = rng.oblique(5);
  CVector eta = project_oblique(u, rng.vector(5));
  eta /= eta.norm();

  // ||R(x, t xi) - (x + t xi)|| / t^2 stays bounded as t shrinks.
  std::vector<double> ratios_s, ratios_o;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    ratios_s.push_back((retract_sphere(x, t * xi).matrix() - (x.matrix() + t * xi)).norm() / (t * t));
    ratios_o.push_back((retract_oblique(u, t * eta).vector() - (u.vector() + t * eta)).norm() / (t * t));
  }
  for (std::size_t i = 1; i < ratios_s.size(); ++i) {
    CHECK(ratios_s[i] <= 2.0 * ratios_s[0] + 1e-6);
    CHECK(ratios_o[i] <= 2.0 * ratios_o[0] + 1e-6);
  }
}

TEST_CASE("vector transport") {
  Rng rng(16);
  const SpherePoint x = rng.sphere(3, 2);
  const CMatrix v = project_sphere(x, rng.matrix(3, 2));
  CHECK((transport_sphere(x, v) - v).norm() <= 1e-12);
  CHECK(transport_sphere(x, CMatrix::Zero(3, 2)).norm() == 0.0);
  const SpherePoint y = retract_sphere(x, 0.3 * v);
  CHECK((transport_sphere(y, v) - testing::loop_project_sphere(y.matrix(), v)).norm() <= 1e-13);
  CHECK_THROWS_AS(transport_sphere(y, rng.matrix(3, 3)), DimensionError);

  const ObliquePoint u = rng.oblique(4);
  const CVector w = project_oblique(u, rng.vector(4));
  CHECK((transport_oblique(u, w) - w).norm() <= 1e-12);
  CHECK(transport_oblique(u, CVector::Zero(4)).norm() == 0.0);
  const ObliquePoint u2 = retract_oblique(u, 0.3 * w);
  CHECK((transport_oblique(u2, w) - testing::loop_project_oblique(u2.vector(), w)).norm() <= 1e-13);
  CHECK_THROWS_AS(transport_oblique(u2, rng.vector(5)), DimensionError);
}

TEST_CASE("riemannian gradient matches directional derivatives") {
  Rng rng(17);
  const SpherePoint x = rng.sphere(4, 2);
  const ObliquePoint u = rng.oblique(5);
  CHECK(riemannian_gradient(x, CMatrix::Zero(4, 2)).norm() == 0.0);
  const CMatrix tangent = project_sphere(x, rng.matrix(4, 2));
  CHECK((riemannian_gradient(x, tangent) - tangent).norm() <= 1e-12);

  // f(X) = |tr(A^H X)|^2 + <B, X>, Egrad = 2 tr(A^H X) A + B
  const CMatrix A = rng.matrix(4, 2);
  const CMatrix B = rng.matrix(4, 2);
  auto f = [&](const SpherePoint& p) {
    return std::norm((A.adjoint() * p.matrix()).trace()) + testing::loop_inner(B, p.matrix());
  };
  auto g = [&](const SpherePoint& p) -> CMatrix {
    const cd c = (A.adjoint() * p.matrix()).trace();
    return 2.0 * c * A + B;
  };
  CHECK(testing::sphere_gradient_error(f, g, x, rng) <= 1e-5);

  const CVector a = rng.vector(5);
  auto fu = [&](const ObliquePoint& p) { return std::norm(p.vector().dot(a)); };
  auto gu = [&](const ObliquePoint& p) -> CVector { return 2.0 * std::conj(p.vector().dot(a)) * a; };
  CHECK(testing::oblique_gradient_error(fu, gu, u, rng) <= 1e-5);
}

TEST_CASE("point constructors enforce the constraints") {
  CMatrix m(2, 1);
  m << 1.0, 1.0;
  CHECK_THROWS_AS(SpherePoint{m}, PreconditionError);
  CVector v(2);
  v << 1.0, 2.0;
  CHECK_THROWS_AS(ObliquePoint{v}, PreconditionError);
  const Eigen::VectorXd ph = ObliquePoint::from_phases(Eigen::VectorXd::Constant(3, -0.5)).phases();
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(ph[i] == doctest::Approx(2.0 * std::numbers::pi - 0.5));
}
