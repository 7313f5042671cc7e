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

// Shared algebra for the beamformer and reflection sub-problems.
//
// Every objective here depends on the cross gains C(k, j) = h_k^H v_j only
// through |C(k, j)|^2. Writing W(k, j) for the partial derivative with
// respect to |C(k, j)|^2, the Euclidean gradients (convention
// Df[xi] = Re{tr(G^H xi)}) are
//   beamformer:  G = 2 Htilde^H (W .* C)
//   reflection:  G = sum_{k,j} 2 W(k, j) conj(C(k, j)) d_{kj}
// where d_{kj} is the direction along which C(k, j) varies with u.

#include <vector>

#include "irsopt/channel_model.hpp"
#include "irsopt/linalg.hpp"
#include "irsopt/rate_metrics.hpp"

namespace irsopt {

/// Objective value together with W(k, j) = d value / d |C(k, j)|^2.
struct CrossGainSlope {
  double value = 0.0;
  Eigen::MatrixXd weights;
};

/// sum_k zt_k |C_kk|^2 / (sum_j |C_kj|^2 + noise_k)
CrossGainSlope fractional_objective(const CMatrix& gains, const Eigen::VectorXd& zeta_tilde,
                                    const std::vector<double>& noise);

/// Per-user power margin w_k |C_kk|^2 - tau (sum_{j != k} |C_kj|^2 + noise_k).
Eigen::VectorXd power_margins(const CMatrix& gains, const std::vector<double>& weights, double tau,
                              const std::vector<double>& noise);

/// -mu log sum_k exp(-margin_k / mu), max-shifted so it stays finite for tiny mu.
double log_sum_exp_min(const Eigen::VectorXd& margins, double mu);
/// Softmax weights exp(-margin_k / mu) / sum_j exp(-margin_j / mu).
Eigen::VectorXd soft_min_weights(const Eigen::VectorXd& margins, double mu);

/// Smoothed min of the power margins and its cross-gain slope.
CrossGainSlope smooth_minmax_objective(const CMatrix& gains, const std::vector<double>& weights,
                                       double tau, double mu, const std::vector<double>& noise);

/// Lifted channel Htilde = sqrt(P) [H_eff, 0], K x (N + 1).
CMatrix lifted_channel_rows(const CMatrix& channel_rows, double power_budget);

/// 2 Htilde^H (W .* C)
CMatrix beamformer_egrad(const CMatrix& lifted_rows, const CMatrix& gains,
                         const Eigen::MatrixXd& weights);

/// Directions d_{kj} of the cross gains with respect to the stacked reflection vector.
///
/// In direct mode C(k, j) = u^H d_{kj}. With the inter-IRS cascade the gain
/// is bilinear in (u_1, u_2); the panel-1 block of d_{kj} is
/// diag(g_{1,k}^H + g_{2,k}^H Phi_2 Lambda) H_1 v_j and the panel-2 block is
/// diag(g_{2,k}^H) (H_2 + Lambda Phi_1 H_1) v_j, i.e. the partial
/// derivatives with the other panel held fixed.
struct ReflectionLinearization {
  /// directions[k] is SM x K; column j holds d_{kj}.
  std::vector<CMatrix> directions;
};

ReflectionLinearization linearize_reflection(const ReflectionVector& u, const ChannelSet& ch,
                                             const BeamformerMatrix& V, LinkMode mode);

/// sum_{k,j} 2 W(k, j) conj(C(k, j)) d_{kj}
CVector reflection_egrad(const ReflectionLinearization& lin, const CMatrix& gains,
                         const Eigen::MatrixXd& weights);

}  // namespace irsopt
