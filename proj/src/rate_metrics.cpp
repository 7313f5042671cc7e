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

#include "irsopt/rate_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "irsopt/errors.hpp"

namespace irsopt {

void require_link_mode(const ChannelSet& ch, LinkMode mode) {
  if (mode == LinkMode::with_inter_irs && (ch.num_irs() != 2 || !ch.inter_irs())) {
    throw UnsupportedConfiguration("inter-IRS link mode needs S = 2 and a Lambda_{1,2} channel");
  }
}

CMatrix effective_channel_rows(const ReflectionVector& u, const ChannelSet& ch, LinkMode mode) {
  require_link_mode(ch, mode);
  if (u.size() != ch.total_elements()) {
    throw DimensionError("effective_channel_rows: reflection vector length differs from SM");
  }
  const int k_users = ch.num_users();
  CMatrix rows = CMatrix::Zero(k_users, ch.num_bs_antennas());
  std::vector<CRowVector> phases;
  for (int s = 0; s < ch.num_irs(); ++s) {
    phases.push_back(u.vector().segment(ch.panel_offset(s), ch.elements(s)).conjugate().transpose());
  }
  for (int k = 0; k < k_users; ++k) {
    for (int s = 0; s < ch.num_irs(); ++s) {
      rows.row(k) += ch.irs_to_user()[k][s].cwiseProduct(phases[s]) * ch.bs_to_irs()[s];
    }
  }
  if (mode == LinkMode::with_inter_irs) {
    const CMatrix& lam = *ch.inter_irs();
    const CMatrix phi1_h1 = phases[0].transpose().asDiagonal() * ch.bs_to_irs()[0];
    for (int k = 0; k < k_users; ++k) {
      const CRowVector g2_phi2 = ch.irs_to_user()[k][1].cwiseProduct(phases[1]);
      rows.row(k) += (g2_phi2 * lam) * phi1_h1;
    }
  }
  return rows;
}

CRowVector effective_channel(int k, const ReflectionVector& u, const ChannelSet& ch) {
  if (k < 0 || k >= ch.num_users()) throw DimensionError("effective_channel: user index out of range");
  if (u.size() != ch.total_elements()) {
    throw DimensionError("effective_channel: reflection vector length differs from SM");
  }
  // u^H diag(g_k^H) H
  const CVector weighted = ch.stacked_g().row(k).transpose().cwiseProduct(u.vector().conjugate());
  return weighted.transpose() * ch.stacked_H();
}

Eigen::VectorXd sinr_all(const CMatrix& channel_rows, const BeamformerMatrix& V,
                         const SystemConfig& sys) {
  if (channel_rows.cols() != V.rows() || channel_rows.rows() != V.cols() ||
      static_cast<int>(sys.noise_power.size()) != V.cols()) {
    throw DimensionError("sinr_all: shapes of channel, beamformer and noise disagree");
  }
  const Eigen::MatrixXd gains = (channel_rows * V).cwiseAbs2();
  Eigen::VectorXd out(gains.rows());
  for (Eigen::Index k = 0; k < gains.rows(); ++k) {
    const double signal = gains(k, k);
    const double interference = gains.row(k).sum() - signal;
    out[k] = signal / (interference + sys.noise_power[k]);
  }
  return out;
}

double sinr(int k, const BeamformerMatrix& V, const ReflectionVector& u, const ChannelSet& ch,
            const SystemConfig& sys) {
  if (k < 0 || k >= ch.num_users()) throw DimensionError("sinr: user index out of range");
  return sinr_all(effective_channel_rows(u, ch), V, sys)[k];
}

double sinr_inter_irs(int k, const BeamformerMatrix& V, const ReflectionVector& u1,
                      const ReflectionVector& u2, const ChannelSet& ch, const SystemConfig& sys) {
  require_link_mode(ch, LinkMode::with_inter_irs);
  if (k < 0 || k >= ch.num_users()) throw DimensionError("sinr_inter_irs: user index out of range");
  return sinr_all(effective_channel_rows(stack_panels(u1, u2), ch, LinkMode::with_inter_irs), V, sys)[k];
}

double weighted_sum_rate(const Eigen::VectorXd& sinrs, const std::vector<double>& weights) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < sinrs.size(); ++k) total += weights[k] * std::log2(1.0 + sinrs[k]);
  return total;
}

double weighted_min_rate(const Eigen::VectorXd& sinrs, const std::vector<double>& weights) {
  double worst = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < sinrs.size(); ++k) {
    worst = std::min(worst, weights[k] * std::log2(1.0 + sinrs[k]));
  }
  return worst;
}

double weighted_sum_rate(const BeamformerMatrix& V, const ReflectionVector& u, const ChannelSet& ch,
                         const SystemConfig& sys, LinkMode mode) {
  return weighted_sum_rate(sinr_all(effective_channel_rows(u, ch, mode), V, sys), sys.weights);
}

double weighted_min_rate(const BeamformerMatrix& V, const ReflectionVector& u, const ChannelSet& ch,
                         const SystemConfig& sys, LinkMode mode) {
  return weighted_min_rate(sinr_all(effective_channel_rows(u, ch, mode), V, sys), sys.weights);
}

CVector panel_segment(const ReflectionVector& u, const ChannelSet& ch, int s) {
  return u.vector().segment(ch.panel_offset(s), ch.elements(s));
}

ReflectionVector stack_panels(const ReflectionVector& u1, const ReflectionVector& u2) {
  CVector stacked(u1.size() + u2.size());
  stacked << u1.vector(), u2.vector();
  return ReflectionVector(std::move(stacked));
}

}  // namespace irsopt
