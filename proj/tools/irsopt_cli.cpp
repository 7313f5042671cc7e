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

// irsopt: command-line front end of the experiment harness.
//
//   irsopt run --config exp.cfg --out results.csv [--trials N] [--seed S] [--threads T] [--timing]
//   irsopt trace --config exp.cfg --out trace.csv [--seed S] [--scheme NAME]
//   irsopt validate --config exp.cfg [--print]
//   irsopt dump-channels --config exp.cfg --out channels.txt [--seed S]

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "irsopt/errors.hpp"
#include "irsopt/harness.hpp"

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace irsopt;
  CLI::App app{"Manifold optimization for IRS-aided multi-user downlink"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool timing = false;
  bool print = false;
  std::string scheme_name = "proposed";

  auto* run = app.add_subcommand("run", "Run a Monte Carlo sweep and write CSV rows");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_path, "CSV output path")->required();
  run->add_option("--trials", trials, "Override the trial count");
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--timing", timing, "Add a wall_time column (output is then not reproducible)");

  auto* trace = app.add_subcommand("trace", "Single solve at the first sweep value; writes its trace");
  trace->add_option("--config", config_path, "Config file")->required();
  trace->add_option("--out", out_path, "Trace output path")->required();
  trace->add_option("--seed", seed, "Channel seed (default: base_seed)");
  trace->add_option("--scheme", scheme_name, "Scheme identifier");

  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("--config", config_path, "Config file")->required();
  validate->add_flag("--print", print, "Print the canonical form");

  auto* dump = app.add_subcommand("dump-channels", "Write one channel realization as text");
  dump->add_option("--config", config_path, "Config file")->required();
  dump->add_option("--out", out_path, "Output path")->required();
  dump->add_option("--seed", seed, "Channel seed (default: base_seed)");

  CLI11_PARSE(app, argc, argv);

  try {
    HarnessConfig cfg = load_config(config_path);
    if (trials) cfg.spec.trials = *trials;
    if (seed) cfg.spec.base_seed = *seed;
    validate_config(cfg);

    if (*run) {
      const auto rows = run_experiment(cfg, RunOptions{threads, timing});
      auto out = open_output(out_path);
      write_csv(out, rows, timing);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.objective_value ? 0 : 1;
      std::cerr << rows.size() << " rows written to " << out_path;
      if (failed) std::cerr << " (" << failed << " NA)";
      std::cerr << "\n";
    } else if (*trace) {
      const SweepPoint point = apply_sweep(cfg, cfg.spec.sweep_values.front());
      const ChannelSet ch = trial_channels(cfg, point, cfg.spec.base_seed);
      const LinkScheme link = cfg.spec.inter_irs_scheme.value_or(LinkScheme::none);
      const auto outcome = evaluate_scheme(ch, point.sys, parse_scheme(scheme_name), link,
                                           cfg.spec.objective, cfg.spec, point.max_outer,
                                           cfg.spec.base_seed);
      emit_trace(outcome.result.report, out_path);
      std::cerr << outcome.result.report.iterations << " iterations, objective "
                << outcome.objective_value << " (" << to_string(outcome.result.report.termination)
                << ")\n";
    } else if (*validate) {
      if (print) std::cout << serialize_config(cfg);
      std::cerr << config_path << ": ok\n";
    } else if (*dump) {
      const SweepPoint point = apply_sweep(cfg, cfg.spec.sweep_values.front());
      auto out = open_output(out_path);
      write_channel_set(out, trial_channels(cfg, point, cfg.spec.base_seed));
    }
  } catch (const ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
