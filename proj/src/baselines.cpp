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

#include "irsopt/baselines.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "irsopt/errors.hpp"
#include "irsopt/link_model.hpp"

namespace irsopt {

const char* to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::random_phi: return "random_phi";
    case BaselineKind::mrt_alt: return "mrt_alt";
    case BaselineKind::zf_alt: return "zf_alt";
    case BaselineKind::mmse_alt: return "mmse_alt";
  }
  return "unknown";
}

const char* to_string(Objective objective) {
  return objective == Objective::sum_rate ? "sum_rate" : "min_rate";
}

CMatrix effective_channel_matrix(const ReflectionVector& u, const ChannelSet& ch, LinkMode mode) {
  return effective_channel_rows(u, ch, mode);
}

namespace {

BeamformerMatrix scale_to_budget(const CMatrix& F, const SystemConfig& sys) {
  const double energy = F.squaredNorm();
  if (!(energy > 0.0)) throw DegenerateChannel("closed-form precoder has zero energy");
  return std::sqrt(sys.power_budget / energy) * F;
}

void check_channel(const CMatrix& heff, const SystemConfig& sys) {
  if (heff.rows() != sys.num_users || heff.cols() != sys.num_bs_antennas) {
    throw DimensionError("composite channel must be K x N");
  }
}

}  // namespace

BeamformerMatrix mrt_beamformer(const CMatrix& heff, const SystemConfig& sys) {
  check_channel(heff, sys);
  if (heff.squaredNorm() == 0.0) throw DegenerateChannel("MRT: composite channel is zero");
  return scale_to_budget(heff.adjoint(), sys);
}

BeamformerMatrix zf_beamformer(const CMatrix& heff, const SystemConfig& sys) {
  check_channel(heff, sys);
  const CMatrix gram = heff * heff.adjoint();
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  const double bottom = eig.eigenvalues().minCoeff();
  if (!(top > 0.0) || !(bottom > 0.0) || top / bottom > kZfConditionLimit) {
    throw SingularChannel("ZF: Gram matrix of the composite channel is rank deficient");
  }
  return scale_to_budget(heff.adjoint() * gram.ldlt().solve(CMatrix::Identity(gram.rows(), gram.cols())), sys);
}

BeamformerMatrix mmse_beamformer(const CMatrix& heff, const SystemConfig& sys) {
  check_channel(heff, sys);
  // Common regularizer sigma^2 K / P; unequal noise uses the mean.
  double noise = 0.0;
  for (double s : sys.noise_power) noise += s;
  noise /= static_cast<double>(sys.noise_power.size());
  const double reg = noise * sys.num_users / sys.power_budget;
  const CMatrix gram = heff * heff.adjoint() + reg * CMatrix::Identity(heff.rows(), heff.rows());
  return scale_to_budget(heff.adjoint() * gram.ldlt().solve(CMatrix::Identity(gram.rows(), gram.cols())), sys);
}

BeamformerMatrix mrt_beamformer(const ReflectionVector& u, const ChannelSet& ch,
                                const SystemConfig& sys, LinkMode mode) {
  return mrt_beamformer(effective_channel_matrix(u, ch, mode), sys);
}

BeamformerMatrix zf_beamformer(const ReflectionVector& u, const ChannelSet& ch,
                               const SystemConfig& sys, LinkMode mode) {
  return zf_beamformer(effective_channel_matrix(u, ch, mode), sys);
}

BeamformerMatrix mmse_beamformer(const ReflectionVector& u, const ChannelSet& ch,
                                 const SystemConfig& sys, LinkMode mode) {
  return mmse_beamformer(effective_channel_matrix(u, ch, mode), sys);
}

ReflectionVector random_reflection(int length, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Eigen::VectorXd phases(length);
  for (int i = 0; i < length; ++i) phases[i] = phase(engine);
  return ReflectionVector::from_phases(phases);
}

namespace {

using ClosedForm = BeamformerMatrix (*)(const CMatrix&, const SystemConfig&);

ClosedForm closed_form_for(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::mrt_alt: return &mrt_beamformer;
    case BaselineKind::zf_alt: return &zf_beamformer;
    case BaselineKind::mmse_alt: return &mmse_beamformer;
    case BaselineKind::random_phi: break;
  }
  throw PreconditionError("no closed-form precoder for this baseline");
}

double objective_value(Objective obj, const BeamformerMatrix& V, const ReflectionVector& u,
                       const ChannelSet& ch, const SystemConfig& sys, LinkMode mode) {
  return obj == Objective::sum_rate ? weighted_sum_rate(V, u, ch, sys, mode)
                                    : weighted_min_rate(V, u, ch, sys, mode);
}

// Lifted point whose physical part is V; the slack row takes the unused power.
SpherePoint lift(const BeamformerMatrix& V, const SystemConfig& sys) {
  CMatrix lifted = CMatrix::Zero(V.rows() + 1, V.cols());
  lifted.topRows(V.rows()) = V / std::sqrt(sys.power_budget);
  const double slack = 1.0 - lifted.squaredNorm();
  lifted(V.rows(), 0) = std::sqrt(std::max(0.0, slack));
  return SpherePoint::normalized(lifted);
}

SolveResult run_alternating(ClosedForm closed_form, const ChannelSet& ch, const SystemConfig& sys,
                            const BaselineOptions& opts, LinkMode mode) {
  const int max_outer =
      opts.objective == Objective::sum_rate ? opts.sum_rate.max_outer : opts.min_rate.max_outer;
  GcgOptions inner_u =
      opts.objective == Objective::sum_rate ? opts.sum_rate.inner_u : opts.min_rate.inner_u;
  if (inner_u.restart_interval == 0) inner_u.restart_interval = detail::default_restart_interval(sys);
  const InterIrsUpdate update = opts.objective == Objective::sum_rate
                                    ? opts.sum_rate.inter_irs_update
                                    : opts.min_rate.inter_irs_update;

  ReflectionVector u = ReflectionVector::ones(ch.total_elements());
  BeamformerMatrix V = closed_form(effective_channel_matrix(u, ch, mode), sys);

  SolveReport report;
  report.initial_objective = objective_value(opts.objective, V, u, ch, sys, mode);
  report.termination = SolveTermination::max_iters;

  double tau = update_tau(V, u, ch, sys, mode);
  double mu_u = opts.min_rate.mu_u_init.value_or(default_smoothing(V, u, ch, sys, mode));

  for (int t = 1; t <= max_outer; ++t) {
    TraceEntry entry;
    entry.iteration = t;
    V = closed_form(effective_channel_matrix(u, ch, mode), sys);
    if (opts.objective == Objective::sum_rate) {
      const Eigen::VectorXd zeta = update_zeta(V, u, ch, sys, mode);
      auto step = detail::optimize_reflection(
          [&](const ReflectionVector& x) { return sumrate_cost_u(x, V, zeta, ch, sys, mode); },
          [&](const ReflectionVector& x) { return sumrate_egrad_u(x, V, zeta, ch, sys, mode); },
          u, ch, mode, update, inner_u);
      u = std::move(step.u);
      entry.inner_u_iters = step.iterations;
      if (sys.quantizer_levels) u = quantize_phases(u, *sys.quantizer_levels);
    } else {
      tau = update_tau(V, u, ch, sys, mode);
      detail::maxmin_reflection_step(u, tau, mu_u, V, ch, sys, mode, opts.min_rate.shrink, update,
                                     inner_u, &entry.inner_u_iters);
      entry.tau = tau;
      entry.mu_u = mu_u;
    }
    entry.objective = objective_value(opts.objective, V, u, ch, sys, mode);
    report.trace.push_back(entry);
    report.iterations = t;
  }

  V = closed_form(effective_channel_matrix(u, ch, mode), sys);
  report.final_objective = objective_value(opts.objective, V, u, ch, sys, mode);
  SpherePoint vhat = lift(V, sys);
  return SolveResult{std::move(V), std::move(u), std::move(vhat), std::move(report)};
}

}  // namespace

SolveResult run_baseline(BaselineKind kind, const ChannelSet& ch, const SystemConfig& sys,
                         const BaselineOptions& opts, std::uint64_t seed, LinkMode mode) {
  sys.validate();
  ch.check_against(sys);
  require_link_mode(ch, mode);

  if (kind != BaselineKind::random_phi) {
    return run_alternating(closed_form_for(kind), ch, sys, opts, mode);
  }

  ReflectionVector u = random_reflection(ch.total_elements(), seed);
  if (sys.quantizer_levels) u = quantize_phases(u, *sys.quantizer_levels);
  CMatrix lifted = lifted_channel_rows(effective_channel_matrix(u, ch, mode), 1.0).adjoint();
  if (lifted.norm() == 0.0) lifted = default_init(ch, sys, mode).vhat.matrix();
  const SolverInit init{SpherePoint::normalized(lifted), u};

  if (opts.objective == Objective::sum_rate) {
    DomaloOptions o = opts.sum_rate;
    o.optimize_reflection = false;
    return mode == LinkMode::direct ? run_domalo(ch, sys, o, init)
                                    : run_domalo_inter_irs(ch, sys, o, init);
  }
  SdomaloOptions o = opts.min_rate;
  o.optimize_reflection = false;
  return mode == LinkMode::direct ? run_sdomalo(ch, sys, o, init)
                                  : run_sdomalo_inter_irs(ch, sys, o, init);
}

}  // namespace irsopt
