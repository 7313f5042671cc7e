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

#pragma once

// Complex trace-one sphere and complex oblique (unit-modulus) manifolds.
//
// Both are treated as real Riemannian submanifolds of C^{n x p} with the
// inner product <A, B> = Re{tr(A^H B)}. Tangent vectors are plain ambient
// matrices; the caller keeps track of the base point.

#include "irsopt/linalg.hpp"

namespace irsopt {

/// Tolerance used when validating that a point lies on its manifold.
inline constexpr double kManifoldTolerance = 1e-10;
/// Below this norm a retraction is considered degenerate.
inline constexpr double kDegenerateRetractionNorm = 1e-14;

/// Point on {X in C^{n x p} : ||X||_F = 1}. Houses the lifted beamformer.
class SpherePoint {
 public:
  /// Throws PreconditionError unless |tr(X X^H) - 1| <= kManifoldTolerance.
  explicit SpherePoint(CMatrix entries);

  /// Scales `entries` to unit Frobenius norm. Throws DegenerateRetraction for a zero matrix.
  static SpherePoint normalized(const CMatrix& entries);

  const CMatrix& matrix() const noexcept { return entries_; }
  Eigen::Index rows() const noexcept { return entries_.rows(); }
  Eigen::Index cols() const noexcept { return entries_.cols(); }

  bool operator==(const SpherePoint& other) const { return entries_ == other.entries_; }

 private:
  struct Unchecked {};
  SpherePoint(CMatrix entries, Unchecked) : entries_(std::move(entries)) {}
  friend SpherePoint retract_sphere(const SpherePoint&, const CMatrix&);

  CMatrix entries_;
};

/// Point on {u in C^n : |u_i| = 1 for all i}. Houses the IRS reflection vector.
class ObliquePoint {
 public:
  /// Throws PreconditionError unless every entry has modulus 1 within kManifoldTolerance.
  explicit ObliquePoint(CVector entries);

  /// Entrywise normalization. Throws DegenerateRetraction on a zero entry.
  static ObliquePoint normalized(const CVector& entries);
  static ObliquePoint ones(Eigen::Index n) { return ObliquePoint(CVector::Ones(n)); }
  /// u_i = exp(j * phases_i).
  static ObliquePoint from_phases(const Eigen::VectorXd& phases);

  const CVector& vector() const noexcept { return entries_; }
  Eigen::Index size() const noexcept { return entries_.size(); }
  /// arg(u_i) mapped into [0, 2*pi).
  Eigen::VectorXd phases() const;

  bool operator==(const ObliquePoint& other) const { return entries_ == other.entries_; }

 private:
  struct Unchecked {};
  ObliquePoint(CVector entries, Unchecked) : entries_(std::move(entries)) {}
  friend ObliquePoint retract_oblique(const ObliquePoint&, const CVector&);

  CVector entries_;
};

/// Orthogonal projection onto the tangent space at `base`: Xi - Re{tr(base^H Xi)} base.
CMatrix project_sphere(const SpherePoint& base, const CMatrix& ambient);
/// Entrywise xi_i - Re{xi_i conj(u_i)} u_i.
CVector project_oblique(const ObliquePoint& base, const CVector& ambient);

/// (base + step) / ||base + step||_F.
SpherePoint retract_sphere(const SpherePoint& base, const CMatrix& step);
/// Entrywise (u_i + step_i) / |u_i + step_i|.
ObliquePoint retract_oblique(const ObliquePoint& base, const CVector& step);

/// Projection-based vector transport onto the tangent space at `new_base`.
CMatrix transport_sphere(const SpherePoint& new_base, const CMatrix& v);
CVector transport_oblique(const ObliquePoint& new_base, const CVector& v);

CMatrix riemannian_gradient(const SpherePoint& base, const CMatrix& egrad);
CVector riemannian_gradient(const ObliquePoint& base, const CVector& egrad);

/// Manifold policy types consumed by the conjugate-gradient solver.
struct SphereManifold {
  using Point = SpherePoint;
  using Tangent = CMatrix;

  static Tangent project(const Point& x, const Tangent& v) { return project_sphere(x, v); }
  static Point retract(const Point& x, const Tangent& v) { return retract_sphere(x, v); }
  static Tangent transport(const Point& y, const Tangent& v) { return transport_sphere(y, v); }
  static const CMatrix& ambient(const Point& x) { return x.matrix(); }
  static Eigen::Index dimension(const Point& x) { return x.matrix().size(); }
  /// Largest violation of the manifold constraint at `x`.
  static double constraint_violation(const Point& x);
};

struct ObliqueManifold {
  using Point = ObliquePoint;
  using Tangent = CVector;

  static Tangent project(const Point& x, const Tangent& v) { return project_oblique(x, v); }
  static Point retract(const Point& x, const Tangent& v) { return retract_oblique(x, v); }
  static Tangent transport(const Point& y, const Tangent& v) { return transport_oblique(y, v); }
  static const CVector& ambient(const Point& x) { return x.vector(); }
  static Eigen::Index dimension(const Point& x) { return x.size(); }
  static double constraint_violation(const Point& x);
};

}  // namespace irsopt
