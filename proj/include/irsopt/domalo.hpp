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

// Weighted sum-rate maximization by alternating ascent over the auxiliary
// SINR variables, the lifted beamformer (sphere) and the reflection vector
// (oblique manifold).

#include <functional>
#include <optional>
#include <vector>

#include "irsopt/channel_model.hpp"
#include "irsopt/gcg_solver.hpp"
#include "irsopt/linalg.hpp"
#include "irsopt/manifolds.hpp"
#include "irsopt/rate_metrics.hpp"
#include "irsopt/solve_report.hpp"
#include "irsopt/system_config.hpp"

namespace irsopt {

/// How the two panels are updated when the inter-IRS cascade is modelled.
enum class InterIrsUpdate {
  joint,       ///< one solve over the stacked (u_1, u_2)
  sequential,  ///< u_1 with u_2 fixed, then u_2 with u_1 fixed
};

struct DomaloOptions {
  double outer_tol = 1e-4;
  int max_outer = 30;
  GcgOptions inner_v;
  GcgOptions inner_u;
  /// Baselines freeze one block; the full algorithm updates both.
  bool optimize_beamformer = true;
  bool optimize_reflection = true;
  InterIrsUpdate inter_irs_update = InterIrsUpdate::joint;

  void validate() const;
};

/// Starting point of an alternating solve.
struct SolverInit {
  SpherePoint vhat;
  ReflectionVector u;
};

/// u = 1 and the lifted matched filter Htilde^H / ||Htilde||_F on the
/// composite channel of that u (slack row zero).
SolverInit default_init(const ChannelSet& ch, const SystemConfig& sys,
                        LinkMode mode = LinkMode::direct);

struct SolveResult {
  BeamformerMatrix V;
  ReflectionVector u;
  SpherePoint vhat;
  SolveReport report;
};

/// V = sqrt(P) * vhat(0:N-1, :)
BeamformerMatrix physical_beamformer(const SpherePoint& vhat, const SystemConfig& sys);

/// zeta_k = SINR_k of the current point.
Eigen::VectorXd update_zeta(const BeamformerMatrix& V, const ReflectionVector& u,
                            const ChannelSet& ch, const SystemConfig& sys,
                            LinkMode mode = LinkMode::direct);

/// Auxiliary-variable objective in bits; equals the weighted sum-rate when zeta = SINR.
double sumrate_auxiliary(const BeamformerMatrix& V, const ReflectionVector& u,
                         const Eigen::VectorXd& zeta, const ChannelSet& ch,
                         const SystemConfig& sys, LinkMode mode = LinkMode::direct);

double sumrate_cost_v(const SpherePoint& vhat, const ReflectionVector& u,
                      const Eigen::VectorXd& zeta, const ChannelSet& ch, const SystemConfig& sys,
                      LinkMode mode = LinkMode::direct);
CMatrix sumrate_egrad_v(const SpherePoint& vhat, const ReflectionVector& u,
                        const Eigen::VectorXd& zeta, const ChannelSet& ch,
                        const SystemConfig& sys, LinkMode mode = LinkMode::direct);

double sumrate_cost_u(const ReflectionVector& u, const BeamformerMatrix& V,
                      const Eigen::VectorXd& zeta, const ChannelSet& ch, const SystemConfig& sys,
                      LinkMode mode = LinkMode::direct);
CVector sumrate_egrad_u(const ReflectionVector& u, const BeamformerMatrix& V,
                        const Eigen::VectorXd& zeta, const ChannelSet& ch,
                        const SystemConfig& sys, LinkMode mode = LinkMode::direct);

SolveResult run_domalo(const ChannelSet& ch, const SystemConfig& sys, const DomaloOptions& opts,
                       const std::optional<SolverInit>& init = std::nullopt);

/// Same loop on the composite channel including the IRS1 -> IRS2 cascade.
/// Requires S = 2 and a Lambda matrix.
SolveResult run_domalo_inter_irs(const ChannelSet& ch, const SystemConfig& sys,
                                 const DomaloOptions& opts,
                                 const std::optional<SolverInit>& init = std::nullopt);

/// Rounds every phase to the nearest of 2*pi*q/Q under wrap-around distance.
ReflectionVector quantize_phases(const ReflectionVector& u, int levels);

namespace detail {

/// Runs a reflection solve, jointly or panel by panel. Shared with the max-min solver.
struct ReflectionStep {
  ReflectionVector u;
  int iterations = 0;
};
ReflectionStep optimize_reflection(const std::function<double(const ReflectionVector&)>& cost,
                                   const std::function<CVector(const ReflectionVector&)>& egrad,
                                   const ReflectionVector& u0, const ChannelSet& ch,
                                   LinkMode mode, InterIrsUpdate update,
                                   const GcgOptions& opts);

/// max(N K, S M), the conjugate-gradient restart period.
int default_restart_interval(const SystemConfig& sys);

}  // namespace detail

}  // namespace irsopt
