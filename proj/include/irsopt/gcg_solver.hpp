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

// Riemannian conjugate-gradient ascent with Armijo backtracking.
//
// The manifold is a policy type (see SphereManifold / ObliqueManifold) that
// supplies tangent projection, retraction and vector transport. The cost and
// Euclidean-gradient callbacks are evaluated at manifold points; the
// Riemannian gradient is the tangent projection of the Euclidean one.

#include <cassert>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irsopt/errors.hpp"
#include "irsopt/linalg.hpp"
#include "irsopt/manifolds.hpp"

namespace irsopt {

struct GcgOptions {
  int max_iters = 100;
  double grad_tol = 1e-6;
  double armijo_initial_step = 1.0;
  double armijo_backtrack = 0.5;
  double armijo_sufficient = 1e-4;
  int max_backtracks = 30;
  /// Fletcher-Reeves restart period; 0 selects the real dimension count of the point.
  int restart_interval = 0;
  /// Called with the ambient coordinates of every retracted point, including rejected line-search trials.
  std::function<void(const CMatrix&)> on_retract;

  void validate() const {
    if (max_iters < 0 || max_backtracks < 0 || restart_interval < 0) {
      throw PreconditionError("GcgOptions: counts must be non-negative");
    }
    if (!(grad_tol >= 0.0) || !(armijo_initial_step > 0.0)) {
      throw PreconditionError("GcgOptions: grad_tol >= 0 and armijo_initial_step > 0 required");
    }
    if (!(armijo_backtrack > 0.0 && armijo_backtrack < 1.0) ||
        !(armijo_sufficient > 0.0 && armijo_sufficient < 1.0)) {
      throw PreconditionError("GcgOptions: Armijo factors must lie strictly inside (0, 1)");
    }
  }
};

enum class GcgTermination { gradient_tol, max_iters, line_search_stalled };

inline const char* to_string(GcgTermination t) {
  switch (t) {
    case GcgTermination::gradient_tol: return "gradient_tol";
    case GcgTermination::max_iters: return "max_iters";
    case GcgTermination::line_search_stalled: return "line_search_stalled";
  }
  return "unknown";
}

template <typename Point>
struct GcgResult {
  Point point;
  /// cost_trace[0] is the cost at x0; one entry per accepted step after that.
  std::vector<double> cost_trace;
  int iterations = 0;
  GcgTermination termination = GcgTermination::max_iters;
  double final_grad_norm = 0.0;
  int restarts = 0;
};

/// Maximizes `cost` over `Manifold` starting from `x0`.
///
/// Every accepted step satisfies the Armijo condition
///   cost(R(x, a*eta)) >= cost(x) + c * a * <rgrad(x), eta>,
/// so the cost trace never decreases. Non-ascent conjugate directions and
/// periodic restarts fall back to the plain Riemannian gradient.
template <typename Manifold, typename CostFn, typename EgradFn>
GcgResult<typename Manifold::Point> gcg_maximize(CostFn&& cost, EgradFn&& egrad,
                                                 typename Manifold::Point x0,
                                                 const GcgOptions& opts) {
  using Point = typename Manifold::Point;
  using Tangent = typename Manifold::Tangent;
  opts.validate();
  if (!(Manifold::constraint_violation(x0) <= kManifoldTolerance)) {
    throw PreconditionError("gcg_maximize: initial point is off the manifold");
  }

  Point x = std::move(x0);
  double fx = cost(x);
  Tangent grad = Manifold::project(x, egrad(x));
  double grad_sq = real_inner(grad, grad);
  Tangent dir = grad;

  const int restart_every = opts.restart_interval > 0
                                ? opts.restart_interval
                                : std::max<int>(1, static_cast<int>(2 * Manifold::dimension(x)));

  GcgResult<Point> result{x, {fx}, 0, GcgTermination::max_iters, std::sqrt(grad_sq), 0};
  int since_restart = 0;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (std::sqrt(grad_sq) <= opts.grad_tol) {
      result.termination = GcgTermination::gradient_tol;
      break;
    }
    double slope = real_inner(grad, dir);
    if (!(slope > 0.0)) {
      dir = grad;
      slope = grad_sq;
      since_restart = 0;
      ++result.restarts;
    }

    double alpha = opts.armijo_initial_step;
    std::optional<Point> trial;
    double f_trial = 0.0;
    bool accepted = false;
    for (int b = 0; b <= opts.max_backtracks; ++b) {
      trial.emplace(Manifold::retract(x, Tangent(alpha * dir)));
      assert(Manifold::constraint_violation(*trial) <= kManifoldTolerance);
      if (opts.on_retract) opts.on_retract(CMatrix(Manifold::ambient(*trial)));
      f_trial = cost(*trial);
      if (f_trial >= fx + opts.armijo_sufficient * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= opts.armijo_backtrack;
    }
    if (!accepted) {
      result.termination = GcgTermination::line_search_stalled;
      break;
    }

    Tangent grad_next = Manifold::project(*trial, egrad(*trial));
    const double grad_next_sq = real_inner(grad_next, grad_next);
    double beta = grad_sq < 1e-30 ? 0.0 : grad_next_sq / grad_sq;
    if (++since_restart >= restart_every) {
      beta = 0.0;
      since_restart = 0;
      ++result.restarts;
    }
    if (beta == 0.0) {
      dir = grad_next;
    } else {
      dir = grad_next + beta * Manifold::transport(*trial, dir);
    }

    x = std::move(*trial);
    fx = f_trial;
    grad = std::move(grad_next);
    grad_sq = grad_next_sq;
    result.cost_trace.push_back(fx);
    result.iterations = iter + 1;
  }

  result.point = std::move(x);
  result.final_grad_norm = std::sqrt(grad_sq);
  return result;
}

}  // namespace irsopt
