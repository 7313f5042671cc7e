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

// Experiment harness: flat key = value configs, Monte Carlo sweeps and CSV output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irsopt/baselines.hpp"
#include "irsopt/channel_model.hpp"
#include "irsopt/solve_report.hpp"
#include "irsopt/system_config.hpp"

namespace irsopt {

enum class Family {
  convergence,      ///< sweep value = outer iteration budget
  vs_bs_antennas,   ///< N
  vs_irs_elements,  ///< M per panel
  vs_users,         ///< K
  vs_power,         ///< P in dBm
  vs_quantization,  ///< Q, 0 for continuous phases
  irs_split,        ///< M_1, with M_2 = irs_split_total - M_1
  blocking_schemes, ///< M per panel, with blocking and the three link schemes
};

/// scheme1: optimize and score without the cascade; scheme2: optimize
/// without, score with; scheme3: optimize and score with.
enum class LinkScheme { none, scheme1, scheme2, scheme3 };

enum class Scheme { proposed, random_phi, mrt_alt, zf_alt, mmse_alt };

const char* to_string(Family f);
const char* to_string(LinkScheme s);
const char* to_string(Scheme s);
Family parse_family(const std::string& s);
LinkScheme parse_link_scheme(const std::string& s);
Scheme parse_scheme(const std::string& s);

struct ExperimentSpec {
  Family family = Family::convergence;
  std::vector<double> sweep_values;
  int trials = 20;
  std::uint64_t base_seed = 1;
  Objective objective = Objective::sum_rate;
  std::vector<Scheme> schemes{Scheme::proposed};
  std::optional<BlockingConfig> blocking;
  /// Empty runs without the cascade; blocking_schemes then runs all three.
  std::optional<LinkScheme> inter_irs_scheme;
  int irs_split_total = 30;
  int max_outer = 30;
  double outer_tol = 1e-4;
  int inner_max_iters = 100;
  double inner_grad_tol = 1e-6;
};

struct HarnessConfig {
  SystemConfig sys;
  GeometryConfig geo;
  ChannelParams params;
  ExperimentSpec spec;
};

/// Default sweep used when a config names a family but no values.
std::vector<double> default_sweep(Family f);

/// Throws ConfigError with the offending line on syntax errors and unknown keys,
/// PreconditionError on constraint violations.
HarnessConfig parse_config(std::istream& is);
HarnessConfig load_config(const std::string& path);
/// Every key in a fixed order; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const HarnessConfig& cfg);
void validate_config(const HarnessConfig& cfg);

/// Concrete instance for one sweep point.
struct SweepPoint {
  SystemConfig sys;
  GeometryConfig geo;
  int max_outer = 30;
};
SweepPoint apply_sweep(const HarnessConfig& cfg, double value);

/// Independent seed stream derived from a trial seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Channels for one trial, blocking included when configured.
ChannelSet trial_channels(const HarnessConfig& cfg, const SweepPoint& point, std::uint64_t seed);

struct SchemeOutcome {
  double objective_value = 0.0;
  SolveResult result;
};

/// Runs one scheme on fixed channels and scores it under the link scheme.
SchemeOutcome evaluate_scheme(const ChannelSet& ch, const SystemConfig& sys, Scheme scheme,
                              LinkScheme link, Objective objective, const ExperimentSpec& spec,
                              int max_outer, std::uint64_t seed);

struct ResultRow {
  Family family;
  double sweep_value = 0.0;
  Scheme scheme;
  LinkScheme link = LinkScheme::none;
  Objective objective = Objective::sum_rate;
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> objective_value;  ///< empty marks a failed solve
  std::optional<int> iterations;
  double wall_time = 0.0;
};

struct RunOptions {
  int threads = 1;
  bool timing = false;
};

std::vector<ResultRow> run_experiment(const HarnessConfig& cfg, const RunOptions& opts = {});
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows, bool timing);

inline constexpr const char* kCsvSchema = "# irsopt results v1";

/// One line per outer iteration: iter,objective,tau,mu_v,mu_u (NA where undefined).
void emit_trace(const SolveReport& report, std::ostream& os);
void emit_trace(const SolveReport& report, const std::string& path);

}  // namespace irsopt
