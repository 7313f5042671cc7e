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

#include "irsopt/manifolds.hpp"

#include <cmath>
#include <numbers>

#include "irsopt/errors.hpp"

namespace irsopt {

namespace {

void require_shape(const char* op, Eigen::Index rows, Eigen::Index cols, Eigen::Index want_rows,
                   Eigen::Index want_cols) {
  if (rows != want_rows || cols != want_cols) {
    throw DimensionError(std::string(op) + ": expected " + std::to_string(want_rows) + "x" +
                         std::to_string(want_cols) + ", got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
}

}  // namespace

SpherePoint::SpherePoint(CMatrix entries) : entries_(std::move(entries)) {
  if (std::abs(entries_.squaredNorm() - 1.0) > kManifoldTolerance) {
    throw PreconditionError("SpherePoint: Frobenius norm is not one");
  }
}

SpherePoint SpherePoint::normalized(const CMatrix& entries) {
  const double norm = entries.norm();
  if (!(norm >= kDegenerateRetractionNorm)) {
    throw DegenerateRetraction("SpherePoint::normalized: zero matrix");
  }
  return SpherePoint(entries / norm, Unchecked{});
}

ObliquePoint::ObliquePoint(CVector entries) : entries_(std::move(entries)) {
  for (Eigen::Index i = 0; i < entries_.size(); ++i) {
    if (std::abs(std::abs(entries_[i]) - 1.0) > kManifoldTolerance) {
      throw PreconditionError("ObliquePoint: entry " + std::to_string(i) + " is not unit modulus");
    }
  }
}

ObliquePoint ObliquePoint::normalized(const CVector& entries) {
  CVector out(entries.size());
  for (Eigen::Index i = 0; i < entries.size(); ++i) {
    const double mag = std::abs(entries[i]);
    if (!(mag >= kDegenerateRetractionNorm)) {
      throw DegenerateRetraction("ObliquePoint::normalized: zero entry " + std::to_string(i));
    }
    out[i] = entries[i] / mag;
  }
  return ObliquePoint(std::move(out), Unchecked{});
}

ObliquePoint ObliquePoint::from_phases(const Eigen::VectorXd& phases) {
  CVector out(phases.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) out[i] = std::polar(1.0, phases[i]);
  return ObliquePoint(std::move(out), Unchecked{});
}

Eigen::VectorXd ObliquePoint::phases() const {
  Eigen::VectorXd out(entries_.size());
  for (Eigen::Index i = 0; i < entries_.size(); ++i) {
    double p = std::arg(entries_[i]);
    if (p < 0.0) p += 2.0 * std::numbers::pi;
    if (p >= 2.0 * std::numbers::pi) p -= 2.0 * std::numbers::pi;
    out[i] = p;
  }
  return out;
}

CMatrix project_sphere(const SpherePoint& base, const CMatrix& ambient) {
  require_shape("project_sphere", ambient.rows(), ambient.cols(), base.rows(), base.cols());
  const double radial = real_inner(base.matrix(), ambient);
  return ambient - radial * base.matrix();
}

CVector project_oblique(const ObliquePoint& base, const CVector& ambient) {
  require_shape("project_oblique", ambient.size(), 1, base.size(), 1);
  const CVector& u = base.vector();
  CVector out(ambient.size());
  for (Eigen::Index i = 0; i < ambient.size(); ++i) {
    const double radial = (ambient[i] * std::conj(u[i])).real();
    out[i] = ambient[i] - radial * u[i];
  }
  return out;
}

SpherePoint retract_sphere(const SpherePoint& base, const CMatrix& step) {
  require_shape("retract_sphere", step.rows(), step.cols(), base.rows(), base.cols());
  if (step.isZero(0.0)) return base;
  CMatrix moved = base.matrix() + step;
  const double norm = moved.norm();
  if (!(norm >= kDegenerateRetractionNorm)) {
    throw DegenerateRetraction("retract_sphere: base + step vanishes");
  }
  moved /= norm;
  return SpherePoint(std::move(moved), SpherePoint::Unchecked{});
}

ObliquePoint retract_oblique(const ObliquePoint& base, const CVector& step) {
  require_shape("retract_oblique", step.size(), 1, base.size(), 1);
  if (step.isZero(0.0)) return base;
  CVector moved = base.vector() + step;
  for (Eigen::Index i = 0; i < moved.size(); ++i) {
    const double mag = std::abs(moved[i]);
    if (!(mag >= kDegenerateRetractionNorm)) {
      throw DegenerateRetraction("retract_oblique: entry " + std::to_string(i) + " vanishes");
    }
    moved[i] /= mag;
  }
  return ObliquePoint(std::move(moved), ObliquePoint::Unchecked{});
}

CMatrix transport_sphere(const SpherePoint& new_base, const CMatrix& v) {
  return project_sphere(new_base, v);
}

CVector transport_oblique(const ObliquePoint& new_base, const CVector& v) {
  return project_oblique(new_base, v);
}

CMatrix riemannian_gradient(const SpherePoint& base, const CMatrix& egrad) {
  return project_sphere(base, egrad);
}

CVector riemannian_gradient(const ObliquePoint& base, const CVector& egrad) {
  return project_oblique(base, egrad);
}

double SphereManifold::constraint_violation(const Point& x) {
  return std::abs(x.matrix().squaredNorm() - 1.0);
}

double ObliqueManifold::constraint_violation(const Point& x) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(std::abs(x.vector()[i]) - 1.0));
  }
  return worst;
}

}  // namespace irsopt
