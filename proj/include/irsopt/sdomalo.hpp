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

// Weighted max-min rate via a parametric (Dinkelbach-type) power-margin
// problem. For a target level tau the per-user margin is
//   t_k = w_k |h_k^H v_k|^2 - tau (sum_{j != k} |h_k^H v_j|^2 + noise_k),
// its minimum over users is replaced by a log-sum-exp lower bound with gap
// at most mu log K, and tau is raised to min_k w_k SINR_k whenever a block
// update does not lower the hard minimum.

#include <functional>
#include <optional>

#include "irsopt/domalo.hpp"

namespace irsopt {

enum class UpdateBlock { beamformer, reflection };

/// Reported after every block update, accepted or not.
struct SdomaloEvent {
  UpdateBlock block;
  bool accepted;
  int iteration;
  const SpherePoint& vhat;
  const ReflectionVector& u;
  const BeamformerMatrix& V;
  double tau;  ///< target level in force after the decision
  double mu;   ///< smoothing used by this block's inner solve
};

struct SdomaloOptions {
  double shrink = 0.8;
  /// Floor on both smoothing parameters; empty means 1e-8 times the initial value.
  std::optional<double> mu_floor;
  int max_outer = 30;
  /// Initial smoothing; empty derives it from the spread of the initial margins.
  std::optional<double> mu_v_init;
  std::optional<double> mu_u_init;
  GcgOptions inner_v;
  GcgOptions inner_u;
  bool optimize_beamformer = true;
  bool optimize_reflection = true;
  InterIrsUpdate inter_irs_update = InterIrsUpdate::joint;
  std::function<void(const SdomaloEvent&)> observer;

  void validate() const;
};

/// min_k of the power margins.
double g3(const BeamformerMatrix& V, const ReflectionVector& u, double tau, const ChannelSet& ch,
          const SystemConfig& sys, LinkMode mode = LinkMode::direct);

/// Log-sum-exp lower bound of g3 with smoothing mu.
double smooth_g3(const BeamformerMatrix& V, const ReflectionVector& u, double tau, double mu,
                 const ChannelSet& ch, const SystemConfig& sys, LinkMode mode = LinkMode::direct);

/// min_k w_k SINR_k
double update_tau(const BeamformerMatrix& V, const ReflectionVector& u, const ChannelSet& ch,
                  const SystemConfig& sys, LinkMode mode = LinkMode::direct);

/// smooth_g3 as a function of the lifted beamformer.
double maxmin_cost_v(const SpherePoint& vhat, const ReflectionVector& u, double tau, double mu,
                     const ChannelSet& ch, const SystemConfig& sys,
                     LinkMode mode = LinkMode::direct);
CMatrix maxmin_egrad_v(const SpherePoint& vhat, const ReflectionVector& u, double tau, double mu,
                       const ChannelSet& ch, const SystemConfig& sys,
                       LinkMode mode = LinkMode::direct);

double maxmin_cost_u(const ReflectionVector& u, const BeamformerMatrix& V, double tau, double mu,
                     const ChannelSet& ch, const SystemConfig& sys,
                     LinkMode mode = LinkMode::direct);
CVector maxmin_egrad_u(const ReflectionVector& u, const BeamformerMatrix& V, double tau,
                       double mu, const ChannelSet& ch, const SystemConfig& sys,
                       LinkMode mode = LinkMode::direct);

/// 0.1 * (max_k t_k - min_k t_k) / log K at the given point, with tau = update_tau.
double default_smoothing(const BeamformerMatrix& V, const ReflectionVector& u,
                         const ChannelSet& ch, const SystemConfig& sys,
                         LinkMode mode = LinkMode::direct);

SolveResult run_sdomalo(const ChannelSet& ch, const SystemConfig& sys, const SdomaloOptions& opts,
                        const std::optional<SolverInit>& init = std::nullopt);

SolveResult run_sdomalo_inter_irs(const ChannelSet& ch, const SystemConfig& sys,
                                  const SdomaloOptions& opts,
                                  const std::optional<SolverInit>& init = std::nullopt);

namespace detail {

/// Accept test shared with the closed-form baselines: the hard minimum at the
/// old tau did not drop and the new tau is at least the old one.
bool margin_step_accepted(double g3_old, double g3_new, double tau_old, double tau_new,
                          double scale);

/// One max-min reflection update with the accept/shrink rule. Returns true if accepted.
bool maxmin_reflection_step(ReflectionVector& u, double& tau, double& mu_u,
                            const BeamformerMatrix& V, const ChannelSet& ch,
                            const SystemConfig& sys, LinkMode mode, double shrink,
                            InterIrsUpdate update, const GcgOptions& opts, int* inner_iters);

}  // namespace detail

}  // namespace irsopt
