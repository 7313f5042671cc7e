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

#include "irsopt/sdomalo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "irsopt/errors.hpp"
#include "irsopt/link_model.hpp"

namespace irsopt {

void SdomaloOptions::validate() const {
  if (!(shrink > 0.0 && shrink < 1.0)) throw PreconditionError("SdomaloOptions: shrink must lie in (0, 1)");
  if (mu_floor && !(*mu_floor > 0.0)) throw PreconditionError("SdomaloOptions: mu_floor must be positive");
  if (mu_v_init && !(*mu_v_init > 0.0)) throw PreconditionError("SdomaloOptions: mu_v_init must be positive");
  if (mu_u_init && !(*mu_u_init > 0.0)) throw PreconditionError("SdomaloOptions: mu_u_init must be positive");
  if (max_outer < 0) throw PreconditionError("SdomaloOptions: max_outer must be non-negative");
  inner_v.validate();
  inner_u.validate();
}

namespace {

// Margins are powers of order noise * SINR; the inner solves work on the
// cost divided by this reference so that gradient tolerances and unit
// Armijo steps mean the same thing at every power scale.
double noise_reference(const SystemConfig& sys) {
  return std::accumulate(sys.noise_power.begin(), sys.noise_power.end(), 0.0) /
         static_cast<double>(sys.noise_power.size());
}

GcgOptions with_restart(GcgOptions opts, const SystemConfig& sys) {
  if (opts.restart_interval == 0) opts.restart_interval = detail::default_restart_interval(sys);
  return opts;
}

CMatrix lifted_rows(const ReflectionVector& u, const ChannelSet& ch, const SystemConfig& sys,
                    LinkMode mode) {
  return lifted_channel_rows(effective_channel_rows(u, ch, mode), sys.power_budget);
}

SolveResult solve_max_min(const ChannelSet& ch, const SystemConfig& sys,
                          const SdomaloOptions& opts, const std::optional<SolverInit>& init,
                          LinkMode mode) {
  sys.validate();
  ch.check_against(sys);
  require_link_mode(ch, mode);
  opts.validate();
  const SolverInit start = init ? *init : default_init(ch, sys, mode);
  if (start.vhat.rows() != ch.num_bs_antennas() + 1 || start.vhat.cols() != ch.num_users() ||
      start.u.size() != ch.total_elements()) {
    throw DimensionError("run_sdomalo: initial point has the wrong shape");
  }

  const GcgOptions inner_v = with_restart(opts.inner_v, sys);
  const GcgOptions inner_u = with_restart(opts.inner_u, sys);
  const double scale = noise_reference(sys);

  SpherePoint vhat = start.vhat;
  ReflectionVector u = start.u;
  BeamformerMatrix V = physical_beamformer(vhat, sys);
  double tau = update_tau(V, u, ch, sys, mode);

  const double mu0 = default_smoothing(V, u, ch, sys, mode);
  double mu_v = opts.mu_v_init.value_or(mu0);
  double mu_u = opts.mu_u_init.value_or(mu0);
  const double floor = opts.mu_floor.value_or(1e-8 * std::min(mu_v, mu_u));

  SolveReport report;
  report.initial_objective = weighted_min_rate(V, u, ch, sys, mode);
  report.termination = SolveTermination::max_iters;

  for (int t = 1; t <= opts.max_outer; ++t) {
    if (mu_v <= floor || mu_u <= floor) {
      report.termination = SolveTermination::mu_floor;
      break;
    }
    TraceEntry entry;
    entry.iteration = t;

    if (opts.optimize_beamformer) {
      const double mu = mu_v;
      auto res = gcg_maximize<SphereManifold>(
          [&](const SpherePoint& x) { return maxmin_cost_v(x, u, tau, mu, ch, sys, mode) / scale; },
          [&](const SpherePoint& x) {
            return CMatrix(maxmin_egrad_v(x, u, tau, mu, ch, sys, mode) / scale);
          },
          vhat, inner_v);
      entry.inner_v_iters = res.iterations;
      const BeamformerMatrix V_new = physical_beamformer(res.point, sys);
      const double tau_new = update_tau(V_new, u, ch, sys, mode);
      const bool ok = detail::margin_step_accepted(g3(V, u, tau, ch, sys, mode),
                                                   g3(V_new, u, tau, ch, sys, mode), tau, tau_new,
                                                   scale);
      if (ok) {
        vhat = std::move(res.point);
        V = V_new;
        tau = tau_new;
      } else {
        mu_v *= opts.shrink;
      }
      if (opts.observer) opts.observer({UpdateBlock::beamformer, ok, t, vhat, u, V, tau, mu});
    }
    entry.tau_beam = tau;

    if (opts.optimize_reflection) {
      const double mu = mu_u;
      const bool ok = detail::maxmin_reflection_step(u, tau, mu_u, V, ch, sys, mode, opts.shrink,
                                                     opts.inter_irs_update, inner_u,
                                                     &entry.inner_u_iters);
      if (opts.observer) opts.observer({UpdateBlock::reflection, ok, t, vhat, u, V, tau, mu});
    }
    entry.tau_phase = tau;
    entry.tau = tau;
    entry.mu_v = mu_v;
    entry.mu_u = mu_u;
    entry.objective = weighted_min_rate(V, u, ch, sys, mode);
    report.trace.push_back(entry);
    report.iterations = t;
  }

  report.final_objective = weighted_min_rate(V, u, ch, sys, mode);
  return SolveResult{std::move(V), std::move(u), std::move(vhat), std::move(report)};
}

}  // namespace

namespace detail {

bool margin_step_accepted(double g3_old, double g3_new, double tau_old, double tau_new,
                          double scale) {
  return g3_new >= g3_old - 1e-12 * scale && tau_new >= tau_old;
}

bool maxmin_reflection_step(ReflectionVector& u, double& tau, double& mu_u,
                            const BeamformerMatrix& V, const ChannelSet& ch,
                            const SystemConfig& sys, LinkMode mode, double shrink,
                            InterIrsUpdate update, const GcgOptions& opts, int* inner_iters) {
  const double scale = noise_reference(sys);
  const double mu = mu_u;
  const double tau_fixed = tau;
  auto step = optimize_reflection(
      [&](const ReflectionVector& x) {
        return maxmin_cost_u(x, V, tau_fixed, mu, ch, sys, mode) / scale;
      },
      [&](const ReflectionVector& x) {
        return CVector(maxmin_egrad_u(x, V, tau_fixed, mu, ch, sys, mode) / scale);
      },
      u, ch, mode, update, opts);
  if (inner_iters) *inner_iters = step.iterations;
  // Discrete phases are enforced on the candidate, so the accept test below
  // guards the quantized point and tau stays monotone.
  if (sys.quantizer_levels) step.u = quantize_phases(step.u, *sys.quantizer_levels);
  const double tau_new = update_tau(V, step.u, ch, sys, mode);
  const bool ok = margin_step_accepted(g3(V, u, tau, ch, sys, mode),
                                       g3(V, step.u, tau, ch, sys, mode), tau, tau_new, scale);
  if (ok) {
    u = std::move(step.u);
    tau = tau_new;
  } else {
    mu_u *= shrink;
  }
  return ok;
}

}  // namespace detail

double g3(const BeamformerMatrix& V, const ReflectionVector& u, double tau, const ChannelSet& ch,
          const SystemConfig& sys, LinkMode mode) {
  const CMatrix gains = effective_channel_rows(u, ch, mode) * V;
  return power_margins(gains, sys.weights, tau, sys.noise_power).minCoeff();
}

double smooth_g3(const BeamformerMatrix& V, const ReflectionVector& u, double tau, double mu,
                 const ChannelSet& ch, const SystemConfig& sys, LinkMode mode) {
  const CMatrix gains = effective_channel_rows(u, ch, mode) * V;
  return log_sum_exp_min(power_margins(gains, sys.weights, tau, sys.noise_power), mu);
}

double update_tau(const BeamformerMatrix& V, const ReflectionVector& u, const ChannelSet& ch,
                  const SystemConfig& sys, LinkMode mode) {
  const Eigen::VectorXd s = sinr_all(effective_channel_rows(u, ch, mode), V, sys);
  double out = sys.weights[0] * s[0];
  for (Eigen::Index k = 1; k < s.size(); ++k) out = std::min(out, sys.weights[k] * s[k]);
  return out;
}

double maxmin_cost_v(const SpherePoint& vhat, const ReflectionVector& u, double tau, double mu,
                     const ChannelSet& ch, const SystemConfig& sys, LinkMode mode) {
  const CMatrix lifted = lifted_rows(u, ch, sys, mode);
  if (lifted.cols() != vhat.rows()) throw DimensionError("maxmin_cost_v: vhat must have N + 1 rows");
  const CMatrix gains = lifted * vhat.matrix();
  return log_sum_exp_min(power_margins(gains, sys.weights, tau, sys.noise_power), mu);
}

CMatrix maxmin_egrad_v(const SpherePoint& vhat, const ReflectionVector& u, double tau, double mu,
                       const ChannelSet& ch, const SystemConfig& sys, LinkMode mode) {
  const CMatrix lifted = lifted_rows(u, ch, sys, mode);
  if (lifted.cols() != vhat.rows()) throw DimensionError("maxmin_egrad_v: vhat must have N + 1 rows");
  const CMatrix gains = lifted * vhat.matrix();
  const auto slope = smooth_minmax_objective(gains, sys.weights, tau, mu, sys.noise_power);
  return beamformer_egrad(lifted, gains, slope.weights);
}

double maxmin_cost_u(const ReflectionVector& u, const BeamformerMatrix& V, double tau, double mu,
                     const ChannelSet& ch, const SystemConfig& sys, LinkMode mode) {
  return smooth_g3(V, u, tau, mu, ch, sys, mode);
}

CVector maxmin_egrad_u(const ReflectionVector& u, const BeamformerMatrix& V, double tau,
                       double mu, const ChannelSet& ch, const SystemConfig& sys, LinkMode mode) {
  const CMatrix gains = effective_channel_rows(u, ch, mode) * V;
  const auto slope = smooth_minmax_objective(gains, sys.weights, tau, mu, sys.noise_power);
  return reflection_egrad(linearize_reflection(u, ch, V, mode), gains, slope.weights);
}

double default_smoothing(const BeamformerMatrix& V, const ReflectionVector& u,
                         const ChannelSet& ch, const SystemConfig& sys, LinkMode mode) {
  const double tau = update_tau(V, u, ch, sys, mode);
  const CMatrix gains = effective_channel_rows(u, ch, mode) * V;
  const Eigen::VectorXd t = power_margins(gains, sys.weights, tau, sys.noise_power);
  const double spread = t.maxCoeff() - t.minCoeff();
  const double log_k = std::max(std::log(static_cast<double>(t.size())), std::log(2.0));
  if (spread > 0.0) return 0.1 * spread / log_k;
  const double noise = *std::min_element(sys.noise_power.begin(), sys.noise_power.end());
  return tau > 0.0 ? 0.1 * tau * noise : noise;
}

SolveResult run_sdomalo(const ChannelSet& ch, const SystemConfig& sys, const SdomaloOptions& opts,
                        const std::optional<SolverInit>& init) {
  return solve_max_min(ch, sys, opts, init, LinkMode::direct);
}

SolveResult run_sdomalo_inter_irs(const ChannelSet& ch, const SystemConfig& sys,
                                  const SdomaloOptions& opts,
                                  const std::optional<SolverInit>& init) {
  return solve_max_min(ch, sys, opts, init, LinkMode::with_inter_irs);
}

}  // namespace irsopt
