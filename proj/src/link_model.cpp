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

#include "irsopt/link_model.hpp"

#include <cmath>

#include "irsopt/errors.hpp"

namespace irsopt {

CrossGainSlope fractional_objective(const CMatrix& gains, const Eigen::VectorXd& zeta_tilde,
                                    const std::vector<double>& noise) {
  const Eigen::Index k_users = gains.rows();
  const Eigen::MatrixXd power = gains.cwiseAbs2();
  CrossGainSlope out{0.0, Eigen::MatrixXd::Zero(k_users, gains.cols())};
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const double signal = power(k, k);
    const double denom = power.row(k).sum() + noise[k];
    out.value += zeta_tilde[k] * signal / denom;
    const double cross = -zeta_tilde[k] * signal / (denom * denom);
    out.weights.row(k).setConstant(cross);
    out.weights(k, k) += zeta_tilde[k] / denom;
  }
  return out;
}

Eigen::VectorXd power_margins(const CMatrix& gains, const std::vector<double>& weights, double tau,
                              const std::vector<double>& noise) {
  const Eigen::MatrixXd power = gains.cwiseAbs2();
  Eigen::VectorXd margins(power.rows());
  for (Eigen::Index k = 0; k < power.rows(); ++k) {
    const double interference = power.row(k).sum() - power(k, k);
    margins[k] = weights[k] * power(k, k) - tau * (interference + noise[k]);
  }
  return margins;
}

double log_sum_exp_min(const Eigen::VectorXd& margins, double mu) {
  if (!(mu > 0.0)) throw PreconditionError("smoothing parameter mu must be positive");
  const double lowest = margins.minCoeff();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < margins.size(); ++k) acc += std::exp(-(margins[k] - lowest) / mu);
  return lowest - mu * std::log(acc);
}

Eigen::VectorXd soft_min_weights(const Eigen::VectorXd& margins, double mu) {
  if (!(mu > 0.0)) throw PreconditionError("smoothing parameter mu must be positive");
  const double lowest = margins.minCoeff();
  Eigen::VectorXd psi(margins.size());
  for (Eigen::Index k = 0; k < margins.size(); ++k) psi[k] = std::exp(-(margins[k] - lowest) / mu);
  return psi / psi.sum();
}

CrossGainSlope smooth_minmax_objective(const CMatrix& gains, const std::vector<double>& weights,
                                       double tau, double mu, const std::vector<double>& noise) {
  const Eigen::VectorXd margins = power_margins(gains, weights, tau, noise);
  const Eigen::VectorXd psi = soft_min_weights(margins, mu);
  CrossGainSlope out{log_sum_exp_min(margins, mu), Eigen::MatrixXd(gains.rows(), gains.cols())};
  for (Eigen::Index k = 0; k < gains.rows(); ++k) {
    out.weights.row(k).setConstant(-tau * psi[k]);
    out.weights(k, k) = weights[k] * psi[k];
  }
  return out;
}

CMatrix lifted_channel_rows(const CMatrix& channel_rows, double power_budget) {
  CMatrix lifted = CMatrix::Zero(channel_rows.rows(), channel_rows.cols() + 1);
  lifted.leftCols(channel_rows.cols()) = std::sqrt(power_budget) * channel_rows;
  return lifted;
}

CMatrix beamformer_egrad(const CMatrix& lifted_rows, const CMatrix& gains,
                         const Eigen::MatrixXd& weights) {
  const CMatrix scaled = gains.cwiseProduct(weights.cast<cd>());
  return 2.0 * lifted_rows.adjoint() * scaled;
}

ReflectionLinearization linearize_reflection(const ReflectionVector& u, const ChannelSet& ch,
                                             const BeamformerMatrix& V, LinkMode mode) {
  require_link_mode(ch, mode);
  if (V.rows() != ch.num_bs_antennas() || V.cols() != ch.num_users()) {
    throw DimensionError("linearize_reflection: beamformer must be N x K");
  }
  if (u.size() != ch.total_elements()) {
    throw DimensionError("linearize_reflection: reflection vector length differs from SM");
  }
  const int k_users = ch.num_users();
  const int total = ch.total_elements();

  // H_s V per panel, shared by every user.
  std::vector<CMatrix> hv;
  for (int s = 0; s < ch.num_irs(); ++s) hv.push_back(ch.bs_to_irs()[s] * V);

  ReflectionLinearization lin;
  lin.directions.reserve(k_users);
  for (int k = 0; k < k_users; ++k) {
    CMatrix d(total, V.cols());
    for (int s = 0; s < ch.num_irs(); ++s) {
      const CRowVector& g = ch.irs_to_user()[k][s];
      d.middleRows(ch.panel_offset(s), ch.elements(s)) = g.transpose().asDiagonal() * hv[s];
    }
    lin.directions.push_back(std::move(d));
  }

  if (mode == LinkMode::with_inter_irs) {
    const CMatrix& lam = *ch.inter_irs();
    const CVector conj_u1 = panel_segment(u, ch, 0).conjugate();
    const CVector conj_u2 = panel_segment(u, ch, 1).conjugate();
    const int m1 = ch.elements(0);
    const int m2 = ch.elements(1);
    // Lambda Phi_1 H_1 V
    const CMatrix cascade_in = lam * (conj_u1.asDiagonal() * hv[0]);
    for (int k = 0; k < k_users; ++k) {
      const CRowVector& g1 = ch.irs_to_user()[k][0];
      const CRowVector& g2 = ch.irs_to_user()[k][1];
      const CRowVector g1_eff = g1 + (g2.cwiseProduct(conj_u2.transpose())) * lam;
      lin.directions[k].topRows(m1) = g1_eff.transpose().asDiagonal() * hv[0];
      lin.directions[k].middleRows(m1, m2) = g2.transpose().asDiagonal() * (hv[1] + cascade_in);
    }
  }
  return lin;
}

CVector reflection_egrad(const ReflectionLinearization& lin, const CMatrix& gains,
                         const Eigen::MatrixXd& weights) {
  const Eigen::Index total = lin.directions.front().rows();
  CVector grad = CVector::Zero(total);
  for (Eigen::Index k = 0; k < gains.rows(); ++k) {
    const CVector coeff = (2.0 * weights.row(k).transpose()).cast<cd>().cwiseProduct(
        gains.row(k).transpose().conjugate());
    grad += lin.directions[k] * coeff;
  }
  return grad;
}

}  // namespace irsopt
