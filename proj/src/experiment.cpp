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

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include "irsopt/errors.hpp"
#include "irsopt/harness.hpp"

namespace irsopt {

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Task {
  double sweep_value;
  Scheme scheme;
  LinkScheme link;
  int trial;
};

std::vector<LinkScheme> link_schemes(const ExperimentSpec& spec) {
  if (spec.inter_irs_scheme) return {*spec.inter_irs_scheme};
  if (spec.family == Family::blocking_schemes) {
    return {LinkScheme::scheme1, LinkScheme::scheme2, LinkScheme::scheme3};
  }
  return {LinkScheme::none};
}

ResultRow run_task(const HarnessConfig& cfg, const Task& task, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  ResultRow row{cfg.spec.family, task.sweep_value, task.scheme, task.link, cfg.spec.objective,
                task.trial,      cfg.spec.base_seed + static_cast<std::uint64_t>(task.trial),
                std::nullopt,    std::nullopt,      0.0};
  try {
    const SweepPoint point = apply_sweep(cfg, task.sweep_value);
    const ChannelSet ch = trial_channels(cfg, point, row.seed);
    const SchemeOutcome out = evaluate_scheme(ch, point.sys, task.scheme, task.link,
                                              cfg.spec.objective, cfg.spec, point.max_outer, row.seed);
    if (std::isfinite(out.objective_value) && out.objective_value >= 0.0) {
      row.objective_value = out.objective_value;
      row.iterations = out.result.report.iterations;
    }
  } catch (const std::exception&) {
    // Failed solves (e.g. singular ZF) stay in the table as NA rows.
  }
  if (timing) {
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over seed and stream index
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

ChannelSet trial_channels(const HarnessConfig& cfg, const SweepPoint& point, std::uint64_t seed) {
  ChannelSet ch = synthesize_channels(point.sys, point.geo, cfg.params, seed);
  if (cfg.spec.blocking) ch = apply_blocking(ch, point.geo, *cfg.spec.blocking, derive_seed(seed, 1));
  return ch;
}

SchemeOutcome evaluate_scheme(const ChannelSet& ch, const SystemConfig& sys, Scheme scheme,
                              LinkScheme link, Objective objective, const ExperimentSpec& spec,
                              int max_outer, std::uint64_t seed) {
  // Without a second panel there is no cascade and every link scheme is scheme1.
  const bool cascade = ch.inter_irs().has_value();
  const LinkMode solve_mode =
      cascade && link == LinkScheme::scheme3 ? LinkMode::with_inter_irs : LinkMode::direct;
  const LinkMode score_mode = cascade && (link == LinkScheme::scheme2 || link == LinkScheme::scheme3)
                                  ? LinkMode::with_inter_irs
                                  : LinkMode::direct;

  GcgOptions inner;
  inner.max_iters = spec.inner_max_iters;
  inner.grad_tol = spec.inner_grad_tol;
  BaselineOptions opts;
  opts.objective = objective;
  opts.sum_rate.max_outer = max_outer;
  opts.sum_rate.outer_tol = spec.outer_tol;
  opts.sum_rate.inner_v = opts.sum_rate.inner_u = inner;
  opts.min_rate.max_outer = max_outer;
  opts.min_rate.inner_v = opts.min_rate.inner_u = inner;

  auto solve = [&]() -> SolveResult {
    switch (scheme) {
      case Scheme::proposed:
        if (objective == Objective::sum_rate) {
          return solve_mode == LinkMode::direct ? run_domalo(ch, sys, opts.sum_rate)
                                                : run_domalo_inter_irs(ch, sys, opts.sum_rate);
        }
        return solve_mode == LinkMode::direct ? run_sdomalo(ch, sys, opts.min_rate)
                                              : run_sdomalo_inter_irs(ch, sys, opts.min_rate);
      case Scheme::random_phi:
        return run_baseline(BaselineKind::random_phi, ch, sys, opts, derive_seed(seed, 2), solve_mode);
      case Scheme::mrt_alt:
        return run_baseline(BaselineKind::mrt_alt, ch, sys, opts, seed, solve_mode);
      case Scheme::zf_alt:
        return run_baseline(BaselineKind::zf_alt, ch, sys, opts, seed, solve_mode);
      case Scheme::mmse_alt:
        return run_baseline(BaselineKind::mmse_alt, ch, sys, opts, seed, solve_mode);
    }
    throw PreconditionError("unknown scheme");
  };
  SolveResult result = solve();
  const double value = objective == Objective::sum_rate
                           ? weighted_sum_rate(result.V, result.u, ch, sys, score_mode)
                           : weighted_min_rate(result.V, result.u, ch, sys, score_mode);
  return SchemeOutcome{value, std::move(result)};
}

std::vector<ResultRow> run_experiment(const HarnessConfig& cfg, const RunOptions& opts) {
  validate_config(cfg);
  std::vector<Task> tasks;
  for (double v : cfg.spec.sweep_values) {
    for (Scheme s : cfg.spec.schemes) {
      for (LinkScheme l : link_schemes(cfg.spec)) {
        for (int t = 0; t < cfg.spec.trials; ++t) tasks.push_back({v, s, l, t});
      }
    }
  }

  std::vector<ResultRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) rows[i] = run_task(cfg, tasks[i], opts.timing);
  };
  const int threads = std::max(1, opts.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows, bool timing) {
  os << kCsvSchema << "\n";
  os << "family,sweep_value,scheme,link_scheme,objective,trial,seed,objective_value,iterations";
  if (timing) os << ",wall_time";
  os << "\n";
  for (const auto& r : rows) {
    os << to_string(r.family) << ',' << fmt(r.sweep_value) << ',' << to_string(r.scheme) << ','
       << to_string(r.link) << ',' << to_string(r.objective) << ',' << r.trial << ',' << r.seed << ','
       << (r.objective_value ? fmt(*r.objective_value) : "NA") << ','
       << (r.iterations ? std::to_string(*r.iterations) : "NA");
    if (timing) os << ',' << fmt(r.wall_time);
    os << "\n";
  }
}

void emit_trace(const SolveReport& report, std::ostream& os) {
  os << "iter,objective,tau,mu_v,mu_u\n";
  for (const auto& e : report.trace) {
    os << e.iteration << ',' << fmt(e.objective) << ',' << fmt(e.tau) << ',' << fmt(e.mu_v) << ','
       << fmt(e.mu_u) << "\n";
  }
  if (!os) throw std::runtime_error("failed to write trace");
}

void emit_trace(const SolveReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file '" + path + "'");
  emit_trace(report, out);
}

}  // namespace irsopt
