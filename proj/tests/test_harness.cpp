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

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "irsopt/errors.hpp"
#include "irsopt/harness.hpp"

using namespace irsopt;

namespace {

HarnessConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string csv_of(const HarnessConfig& cfg, int threads = 1) {
  std::ostringstream os;
  write_csv(os, run_experiment(cfg, RunOptions{threads, false}), false);
  return os.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Minimal reader of the results table, the way a plotting script would consume it.
struct Table {
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
};

Table read_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Table t;
  std::getline(in, line);
  REQUIRE(line == "# irsopt results v1");
  std::getline(in, line);
  t.header = split(line);
  while (std::getline(in, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == t.header.size());
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < cells.size(); ++i) row[t.header[i]] = cells[i];
    t.rows.push_back(row);
  }
  return t;
}

const char* kSmall =
    "num_bs_antennas = 5\n"
    "elements_per_irs = 5\n"
    "num_users = 2\n"
    "trials = 2\n"
    "max_outer = 3\n";

}  // namespace

TEST_CASE("empty config gives the reference setup") {
  const HarnessConfig c = parse("");
  CHECK(c.sys.num_bs_antennas == 20);
  CHECK(c.sys.irs_elements == std::vector<int>{20, 20});
  CHECK(c.sys.num_users == 4);
  CHECK(c.sys.power_budget == doctest::Approx(1.0));
  CHECK(c.sys.noise_power == std::vector<double>(4, dbm_to_watts(-80.0)));
  CHECK(c.sys.weights == std::vector<double>(4, 1.0));
  CHECK(!c.sys.quantizer_levels);
  CHECK(c.geo.bs_position == Position{0.0, 0.0});
  CHECK(c.geo.irs_positions == std::vector<Position>{{10.0, 24.0}, {24.0, 10.0}});
  CHECK(c.geo.user_center == Position{20.0, 0.0});
  CHECK(c.params.num_nlos_paths == 3);
  CHECK(c.spec.trials == 20);
  CHECK(c.spec.sweep_values == default_sweep(Family::convergence));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("num_users = 0\n"), PreconditionError);
  try {
    parse("# comment\nnum_users = 3\nbogus = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse("num_users = 3\nnum_users = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse("num_users\n"), ConfigError);
  CHECK_THROWS_AS(parse("num_users = three\n"), ConfigError);
  try {
    parse("num_bs_antennas = 12\n");
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("num_bs_antennas = 12 is not a multiple of rows_per_panel = 5") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(parse("weights = 1, 2\n"), PreconditionError);
  CHECK_THROWS_AS(parse("schemes = magic\n"), ConfigError);
}

TEST_CASE("config round trip") {
  const std::string text =
      "# user section\n"
      "num_users = 3\n"
      "weights = 1, 0.5, 2\n"
      "power_dbm = 17.5\n"
      "quantizer_levels = 4\n"
      "irs_positions = 10, 24; 24, 10\n"
      "family = vs_power\n"
      "sweep = 0, 12.5, 30\n"
      "schemes = proposed, mrt_alt\n"
      "blocking = 0.1, 0.2\n"
      "inter_irs_scheme = scheme2\n"
      "objective = min_rate\n";
  const HarnessConfig a = parse(text);
  const std::string canon = serialize_config(a);
  const HarnessConfig b = parse(canon);
  CHECK(serialize_config(b) == canon);
  CHECK(b.sys.weights == std::vector<double>{1.0, 0.5, 2.0});
  CHECK(b.sys.quantizer_levels == 4);
  CHECK(watts_to_dbm(b.sys.power_budget) == doctest::Approx(17.5));
  CHECK(b.spec.sweep_values == std::vector<double>{0.0, 12.5, 30.0});
  CHECK(b.spec.schemes == std::vector<Scheme>{Scheme::proposed, Scheme::mrt_alt});
  REQUIRE(b.spec.blocking);
  CHECK(b.spec.blocking->p2 == 0.2);
  CHECK(b.spec.inter_irs_scheme == LinkScheme::scheme2);
  CHECK(b.spec.objective == Objective::min_rate);
  CHECK(serialize_config(parse("")) == serialize_config(parse(serialize_config(parse("")))));
}

TEST_CASE("sweep points") {
  HarnessConfig c = parse(kSmall);
  c.spec.family = Family::vs_users;
  const SweepPoint users = apply_sweep(c, 3);
  CHECK(users.sys.num_users == 3);
  CHECK(users.sys.noise_power.size() == 3);
  c.spec.family = Family::vs_quantization;
  CHECK(apply_sweep(c, 0).sys.quantizer_levels == std::nullopt);
  CHECK(apply_sweep(c, 8).sys.quantizer_levels == 8);
  c.spec.family = Family::irs_split;
  const SweepPoint one = apply_sweep(c, 30);
  CHECK(one.sys.irs_elements == std::vector<int>{30});
  CHECK(one.geo.irs_positions.size() == 1);
  CHECK(apply_sweep(c, 15).sys.irs_elements == std::vector<int>{15, 15});
  CHECK_THROWS_AS(apply_sweep(c, 31), PreconditionError);
  c.spec.family = Family::convergence;
  CHECK(apply_sweep(c, 7).max_outer == 7);
  CHECK_THROWS_AS(apply_sweep(c, 2.5), PreconditionError);
}

TEST_CASE("seed streams") {
  CHECK(derive_seed(5, 1) == derive_seed(5, 1));
  CHECK(derive_seed(5, 1) != derive_seed(5, 2));
  CHECK(derive_seed(5, 1) != derive_seed(6, 1));
}

TEST_CASE("results table") {
  SUBCASE("one trial, one point, one scheme") {
    HarnessConfig c = parse(kSmall);
    c.spec.trials = 1;
    c.spec.sweep_values = {3};
    const auto rows = run_experiment(c);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].seed == c.spec.base_seed);
    REQUIRE(rows[0].objective_value);
    CHECK(*rows[0].objective_value >= 0.0);
  }
  SUBCASE("layout and ordering") {
    HarnessConfig c = parse(std::string(kSmall) + "family = vs_power\nsweep = 10, 20\nschemes = proposed, mmse_alt\nbase_seed = 40\n");
    const Table t = read_table(csv_of(c));
    CHECK(t.header == std::vector<std::string>{"family", "sweep_value", "scheme", "link_scheme", "objective",
                                               "trial", "seed", "objective_value", "iterations"});
    REQUIRE(t.rows.size() == 8);
    const char* sweeps[] = {"10", "10", "10", "10", "20", "20", "20", "20"};
    const char* schemes[] = {"proposed", "proposed", "mmse_alt", "mmse_alt"};
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(t.rows[i].at("family") == "vs_power");
      CHECK(t.rows[i].at("sweep_value") == sweeps[i]);
      CHECK(t.rows[i].at("scheme") == schemes[i % 4]);
      CHECK(t.rows[i].at("trial") == std::to_string(i % 2));
      CHECK(t.rows[i].at("seed") == std::to_string(40 + i % 2));
      CHECK(t.rows[i].at("link_scheme") == "none");
      CHECK(std::stod(t.rows[i].at("objective_value")) > 0.0);
    }
    // Values round-trip exactly through the text form.
    const auto rows = run_experiment(c);
    CHECK(std::stod(t.rows[5].at("objective_value")) == *rows[5].objective_value);
  }
  SUBCASE("timing column is opt-in") {
    HarnessConfig c = parse(kSmall);
    c.spec.trials = 1;
    c.spec.sweep_values = {1};
    std::ostringstream os;
    write_csv(os, run_experiment(c, RunOptions{1, true}), true);
    const Table t = read_table(os.str());
    CHECK(t.header.back() == "wall_time");
    CHECK(std::stod(t.rows[0].at("wall_time")) >= 0.0);
  }
  SUBCASE("failed solves become NA rows") {
    HarnessConfig c = parse(
        "num_users = 9\nschemes = zf_alt, proposed\ntrials = 1\nsweep = 1\nfamily = convergence\n");
    const Table t = read_table(csv_of(c));
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].at("objective_value") == "NA");
    CHECK(t.rows[0].at("iterations") == "NA");
    CHECK(t.rows[1].at("objective_value") != "NA");
  }
}

TEST_CASE("byte-identical reruns") {
  HarnessConfig c = parse(std::string(kSmall) + "schemes = proposed, random_phi, zf_alt\nfamily = vs_users\nsweep = 1, 2\n");
  const std::string a = csv_of(c, 1);
  CHECK(a == csv_of(c, 1));
  CHECK(a == csv_of(c, 4));
}

TEST_CASE("link schemes") {
  HarnessConfig c = parse(kSmall);
  const SweepPoint p = apply_sweep(c, 3);
  ChannelSet ch = trial_channels(c, p, 11);
  REQUIRE(ch.inter_irs());
  ch.mutable_inter_irs()->setZero();
  for (Objective obj : {Objective::sum_rate, Objective::min_rate}) {
    const auto two = evaluate_scheme(ch, p.sys, Scheme::proposed, LinkScheme::scheme2, obj, c.spec, 3, 11);
    const auto three = evaluate_scheme(ch, p.sys, Scheme::proposed, LinkScheme::scheme3, obj, c.spec, 3, 11);
    CHECK(std::abs(two.objective_value - three.objective_value) <= 1e-8);
  }

  HarnessConfig b = parse(std::string(kSmall) + "family = blocking_schemes\nsweep = 5\nblocking = 0.2, 0.2\n");
  const Table t = read_table(csv_of(b));
  REQUIRE(t.rows.size() == 6);
  CHECK(t.rows[0].at("link_scheme") == "scheme1");
  CHECK(t.rows[2].at("link_scheme") == "scheme2");
  CHECK(t.rows[4].at("link_scheme") == "scheme3");
  // scheme1 and scheme2 share the solve and differ only in scoring.
  CHECK(t.rows[0].at("iterations") == t.rows[2].at("iterations"));
}

TEST_CASE("trace output") {
  HarnessConfig c = parse(kSmall);
  const SweepPoint p = apply_sweep(c, 6);
  const ChannelSet ch = trial_channels(c, p, 2);
  for (Objective obj : {Objective::sum_rate, Objective::min_rate}) {
    const auto out = evaluate_scheme(ch, p.sys, Scheme::proposed, LinkScheme::none, obj, c.spec, 6, 2);
    const auto path = std::filesystem::temp_directory_path() / "irsopt_trace_test.csv";
    emit_trace(out.result.report, path.string());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "iter,objective,tau,mu_v,mu_u");
    int n = 0;
    double prev_obj = -1.0, prev_tau = -1.0;
    while (std::getline(in, line)) {
      const auto cells = split(line);
      REQUIRE(cells.size() == 5);
      CHECK(std::stoi(cells[0]) == ++n);
      if (obj == Objective::sum_rate) {
        const double v = std::stod(cells[1]);
        CHECK(v >= prev_obj - 1e-9);
        prev_obj = v;
        CHECK(cells[2] == "NA");
      } else {
        const double tau = std::stod(cells[2]);
        CHECK(tau >= prev_tau);
        prev_tau = tau;
      }
    }
    CHECK(n == out.result.report.iterations);
    std::filesystem::remove(path);
  }
  CHECK_THROWS(emit_trace(SolveReport{}, "/nonexistent-dir/trace.csv"));
}
