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

#include "irsopt/domalo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "irsopt/errors.hpp"
#include "irsopt/link_model.hpp"

namespace irsopt {

const char* to_string(SolveTermination t) {
  switch (t) {
    case SolveTermination::converged: return "converged";
    case SolveTermination::max_iters: return "max_iters";
    case SolveTermination::mu_floor: return "mu_floor";
  }
  return "unknown";
}

void DomaloOptions::validate() const {
  if (!(outer_tol > 0.0)) throw PreconditionError("DomaloOptions: outer_tol must be positive");
  if (max_outer < 0) throw PreconditionError("DomaloOptions: max_outer must be non-negative");
  inner_v.validate();
  inner_u.validate();
}

namespace {

Eigen::VectorXd zeta_tilde(const Eigen::VectorXd& zeta, const SystemConfig& sys) {
  Eigen::VectorXd out(zeta.size());
  for (Eigen::Index k = 0; k < zeta.size(); ++k) out[k] = sys.weights[k] * (1.0 + zeta[k]);
  return out;
}

void check_zeta(const Eigen::VectorXd& zeta, const ChannelSet& ch) {
  if (zeta.size() != ch.num_users()) throw DimensionError("zeta must have one entry per user");
}

void check_init(const SolverInit& init, const ChannelSet& ch) {
  if (init.vhat.rows() != ch.num_bs_antennas() + 1 || init.vhat.cols() != ch.num_users()) {
    throw DimensionError("initial lifted beamformer must be (N + 1) x K");
  }
  if (init.u.size() != ch.total_elements()) {
    throw DimensionError("initial reflection vector must have length SM");
  }
}

GcgOptions with_restart(GcgOptions opts, const SystemConfig& sys) {
  if (opts.restart_interval == 0) opts.restart_interval = detail::default_restart_interval(sys);
  return opts;
}

ReflectionVector splice(const ReflectionVector& u, const ChannelSet& ch, int s,
                        const ReflectionVector& panel) {
  CVector out = u.vector();
  out.segment(ch.panel_offset(s), ch.elements(s)) = panel.vector();
  return ReflectionVector(std::move(out));
}

SolveResult solve_sum_rate(const ChannelSet& ch, const SystemConfig& sys,
                           const DomaloOptions& opts, const std::optional<SolverInit>& init,
                           LinkMode mode) {
  sys.validate();
  ch.check_against(sys);
  require_link_mode(ch, mode);
  opts.validate();
  SolverInit start = init ? *init : default_init(ch, sys, mode);
  check_init(start, ch);

  const GcgOptions inner_v = with_restart(opts.inner_v, sys);
  const GcgOptions inner_u = with_restart(opts.inner_u, sys);

  SpherePoint vhat = start.vhat;
  ReflectionVector u = start.u;
  BeamformerMatrix V = physical_beamformer(vhat, sys);

  SolveReport report;
  report.initial_objective = weighted_sum_rate(V, u, ch, sys, mode);
  double previous = report.initial_objective;
  report.termination = SolveTermination::max_iters;

  for (int t = 1; t <= opts.max_outer; ++t) {
    TraceEntry entry;
    entry.iteration = t;
    const Eigen::VectorXd zeta = update_zeta(V, u, ch, sys, mode);

    if (opts.optimize_beamformer) {
      auto res = gcg_maximize<SphereManifold>(
          [&](const SpherePoint& x) { return sumrate_cost_v(x, u, zeta, ch, sys, mode); },
          [&](const SpherePoint& x) { return sumrate_egrad_v(x, u, zeta, ch, sys, mode); }, vhat,
          inner_v);
      vhat = std::move(res.point);
      entry.inner_v_iters = res.iterations;
      V = physical_beamformer(vhat, sys);
    }

    if (opts.optimize_reflection) {
      auto step = detail::optimize_reflection(
          [&](const ReflectionVector& x) { return sumrate_cost_u(x, V, zeta, ch, sys, mode); },
          [&](const ReflectionVector& x) { return sumrate_egrad_u(x, V, zeta, ch, sys, mode); },
          u, ch, mode, opts.inter_irs_update, inner_u);
      u = std::move(step.u);
      entry.inner_u_iters = step.iterations;
      if (sys.quantizer_levels) u = quantize_phases(u, *sys.quantizer_levels);
    }

    entry.objective = weighted_sum_rate(V, u, ch, sys, mode);
    report.trace.push_back(entry);
    report.iterations = t;
    const double change = std::abs(entry.objective - previous);
    previous = entry.objective;
    if (change <= opts.outer_tol) {
      report.termination = SolveTermination::converged;
      break;
    }
  }

  // Rounding the phases moves u off the point the last beamformer was fitted
  // to; one more beamformer pass on the quantized reflection recovers part
  // of that loss.
  if (sys.quantizer_levels && opts.optimize_beamformer && report.iterations > 0) {
    const Eigen::VectorXd zeta = update_zeta(V, u, ch, sys, mode);
    auto res = gcg_maximize<SphereManifold>(
        [&](const SpherePoint& x) { return sumrate_cost_v(x, u, zeta, ch, sys, mode); },
        [&](const SpherePoint& x) { return sumrate_egrad_v(x, u, zeta, ch, sys, mode); }, vhat,
        inner_v);
    vhat = std::move(res.point);
    V = physical_beamformer(vhat, sys);
  }

  report.final_objective = weighted_sum_rate(V, u, ch, sys, mode);
  return SolveResult{std::move(V), std::move(u), std::move(vhat), std::move(report)};
}

}  // namespace

namespace detail {

int default_restart_interval(const SystemConfig& sys) {
  return std::max(sys.num_bs_antennas * sys.num_users, sys.total_elements());
}

ReflectionStep optimize_reflection(const std::function<double(const ReflectionVector&)>& cost,
                                   const std::function<CVector(const ReflectionVector&)>& egrad,
                                   const ReflectionVector& u0, const ChannelSet& ch,
                                   LinkMode mode, InterIrsUpdate update,
                                   const GcgOptions& opts) {
  if (mode == LinkMode::direct || update == InterIrsUpdate::joint) {
    auto res = gcg_maximize<ObliqueManifold>(cost, egrad, u0, opts);
    return {std::move(res.point), res.iterations};
  }
  ReflectionStep out{u0, 0};
  for (int s = 0; s < ch.num_irs(); ++s) {
    const int offset = ch.panel_offset(s);
    const int len = ch.elements(s);
    const ReflectionVector base = out.u;
    auto res = gcg_maximize<ObliqueManifold>(
        [&](const ReflectionVector& p) { return cost(splice(base, ch, s, p)); },
        [&](const ReflectionVector& p) {
          return CVector(egrad(splice(base, ch, s, p)).segment(offset, len));
        },
        ReflectionVector(base.vector().segment(offset, len)), opts);
    out.u = splice(base, ch, s, res.point);
    out.iterations += res.iterations;
  }
  return out;
}

}  // namespace detail

SolverInit default_init(const ChannelSet& ch, const SystemConfig& sys, LinkMode mode) {
  ch.check_against(sys);
  ReflectionVector u = ReflectionVector::ones(ch.total_elements());
  const CMatrix rows = effective_channel_rows(u, ch, mode);
  CMatrix lifted = lifted_channel_rows(rows, 1.0).adjoint();
  if (lifted.norm() == 0.0) {
    // Every link is blocked; any feasible point is optimal.
    lifted.setZero();
    for (int k = 0; k < ch.num_users(); ++k) lifted(k % ch.num_bs_antennas(), k) = 1.0;
  }
  return SolverInit{SpherePoint::normalized(lifted), std::move(u)};
}

BeamformerMatrix physical_beamformer(const SpherePoint& vhat, const SystemConfig& sys) {
  if (vhat.rows() != sys.num_bs_antennas + 1) {
    throw DimensionError("physical_beamformer: lifted beamformer must have N + 1 rows");
  }
  return std::sqrt(sys.power_budget) * vhat.matrix().topRows(sys.num_bs_antennas);
}

Eigen::VectorXd update_zeta(const BeamformerMatrix& V, const ReflectionVector& u,
                            const ChannelSet& ch, const SystemConfig& sys, LinkMode mode) {
  return sinr_all(effective_channel_rows(u, ch, mode), V, sys);
}

double sumrate_auxiliary(const BeamformerMatrix& V, const ReflectionVector& u,
                         const Eigen::VectorXd& zeta, const ChannelSet& ch,
                         const SystemConfig& sys, LinkMode mode) {
  check_zeta(zeta, ch);
  const Eigen::VectorXd r = update_zeta(V, u, ch, sys, mode);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    const double w = sys.weights[k];
    acc += w * std::log1p(zeta[k]) - w * zeta[k] + w * (1.0 + zeta[k]) * r[k] / (1.0 + r[k]);
  }
  return acc / std::numbers::ln2;
}

double sumrate_cost_v(const SpherePoint& vhat, const ReflectionVector& u,
                      const Eigen::VectorXd& zeta, const ChannelSet& ch, const SystemConfig& sys,
                      LinkMode mode) {
  check_zeta(zeta, ch);
  const CMatrix lifted = lifted_channel_rows(effective_channel_rows(u, ch, mode), sys.power_budget);
  if (lifted.cols() != vhat.rows()) throw DimensionError("sumrate_cost_v: vhat must have N + 1 rows");
  return fractional_objective(lifted * vhat.matrix(), zeta_tilde(zeta, sys), sys.noise_power).value;
}

CMatrix sumrate_egrad_v(const SpherePoint& vhat, const ReflectionVector& u,
                        const Eigen::VectorXd& zeta, const ChannelSet& ch,
                        const SystemConfig& sys, LinkMode mode) {
  check_zeta(zeta, ch);
  const CMatrix lifted = lifted_channel_rows(effective_channel_rows(u, ch, mode), sys.power_budget);
  if (lifted.cols() != vhat.rows()) throw DimensionError("sumrate_egrad_v: vhat must have N + 1 rows");
  const CMatrix gains = lifted * vhat.matrix();
  const auto slope = fractional_objective(gains, zeta_tilde(zeta, sys), sys.noise_power);
  return beamformer_egrad(lifted, gains, slope.weights);
}

double sumrate_cost_u(const ReflectionVector& u, const BeamformerMatrix& V,
                      const Eigen::VectorXd& zeta, const ChannelSet& ch, const SystemConfig& sys,
                      LinkMode mode) {
  check_zeta(zeta, ch);
  const CMatrix gains = effective_channel_rows(u, ch, mode) * V;
  return fractional_objective(gains, zeta_tilde(zeta, sys), sys.noise_power).value;
}

CVector sumrate_egrad_u(const ReflectionVector& u, const BeamformerMatrix& V,
                        const Eigen::VectorXd& zeta, const ChannelSet& ch,
                        const SystemConfig& sys, LinkMode mode) {
  check_zeta(zeta, ch);
  const CMatrix gains = effective_channel_rows(u, ch, mode) * V;
  const auto slope = fractional_objective(gains, zeta_tilde(zeta, sys), sys.noise_power);
  return reflection_egrad(linearize_reflection(u, ch, V, mode), gains, slope.weights);
}

SolveResult run_domalo(const ChannelSet& ch, const SystemConfig& sys, const DomaloOptions& opts,
                       const std::optional<SolverInit>& init) {
  return solve_sum_rate(ch, sys, opts, init, LinkMode::direct);
}

SolveResult run_domalo_inter_irs(const ChannelSet& ch, const SystemConfig& sys,
                                 const DomaloOptions& opts,
                                 const std::optional<SolverInit>& init) {
  return solve_sum_rate(ch, sys, opts, init, LinkMode::with_inter_irs);
}

ReflectionVector quantize_phases(const ReflectionVector& u, int levels) {
  if (levels < 1) throw PreconditionError("quantize_phases: need at least one level");
  const double step = 2.0 * std::numbers::pi / levels;
  Eigen::VectorXd phases = u.phases();
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    // phases lie in [0, 2 pi), so rounding to the nearest multiple and
    // wrapping Q back to 0 is the circular nearest neighbour.
    const long q = std::lround(phases[i] / step) % levels;
    phases[i] = static_cast<double>(q) * step;
  }
  return ReflectionVector::from_phases(phases);
}

}  // namespace irsopt
