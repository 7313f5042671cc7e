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

#include "irsopt/channel_model.hpp"
#include "irsopt/linalg.hpp"
#include "irsopt/manifolds.hpp"
#include "irsopt/system_config.hpp"

namespace irsopt {

/// BS precoder V (N x K), column k serves user k.
using BeamformerMatrix = CMatrix;
/// Stacked reflection vector u with u* = vec(Phi).
using ReflectionVector = ObliquePoint;

/// Which propagation paths make up the composite channel.
enum class LinkMode {
  direct,          ///< sum_s g_{s,k}^H Phi_s H_s
  with_inter_irs,  ///< plus g_{2,k}^H Phi_2 Lambda_{1,2} Phi_1 H_1 (S = 2 only)
};

/// Rows h_k^H of the composite channel, K x N.
CMatrix effective_channel_rows(const ReflectionVector& u, const ChannelSet& ch,
                               LinkMode mode = LinkMode::direct);

/// u^H diag(g_k^H) H for user k.
CRowVector effective_channel(int k, const ReflectionVector& u, const ChannelSet& ch);

/// Per-user SINR from a precomputed composite channel.
Eigen::VectorXd sinr_all(const CMatrix& channel_rows, const BeamformerMatrix& V,
                         const SystemConfig& sys);

double sinr(int k, const BeamformerMatrix& V, const ReflectionVector& u, const ChannelSet& ch,
            const SystemConfig& sys);

/// SINR including the IRS1 -> IRS2 cascade. Throws UnsupportedConfiguration without Lambda.
double sinr_inter_irs(int k, const BeamformerMatrix& V, const ReflectionVector& u1,
                      const ReflectionVector& u2, const ChannelSet& ch, const SystemConfig& sys);

/// sum_k w_k log2(1 + sinr_k)
double weighted_sum_rate(const Eigen::VectorXd& sinrs, const std::vector<double>& weights);
/// min_k w_k log2(1 + sinr_k)
double weighted_min_rate(const Eigen::VectorXd& sinrs, const std::vector<double>& weights);

double weighted_sum_rate(const BeamformerMatrix& V, const ReflectionVector& u, const ChannelSet& ch,
                         const SystemConfig& sys, LinkMode mode = LinkMode::direct);
double weighted_min_rate(const BeamformerMatrix& V, const ReflectionVector& u, const ChannelSet& ch,
                         const SystemConfig& sys, LinkMode mode = LinkMode::direct);

/// Splits a stacked reflection vector into its per-panel segment.
CVector panel_segment(const ReflectionVector& u, const ChannelSet& ch, int s);
/// Stacks per-panel reflection vectors.
ReflectionVector stack_panels(const ReflectionVector& u1, const ReflectionVector& u2);

/// Throws unless `mode` is usable with `ch`.
void require_link_mode(const ChannelSet& ch, LinkMode mode);

}  // namespace irsopt
