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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "irsopt/errors.hpp"
#include "irsopt/harness.hpp"

namespace irsopt {

namespace {

struct Named {
  const char* name;
  int value;
};

constexpr Named kFamilies[] = {
    {"convergence", static_cast<int>(Family::convergence)},
    {"vs_bs_antennas", static_cast<int>(Family::vs_bs_antennas)},
    {"vs_irs_elements", static_cast<int>(Family::vs_irs_elements)},
    {"vs_users", static_cast<int>(Family::vs_users)},
    {"vs_power", static_cast<int>(Family::vs_power)},
    {"vs_quantization", static_cast<int>(Family::vs_quantization)},
    {"irs_split", static_cast<int>(Family::irs_split)},
    {"blocking_schemes", static_cast<int>(Family::blocking_schemes)},
};
constexpr Named kLinkSchemes[] = {
    {"none", static_cast<int>(LinkScheme::none)},
    {"scheme1", static_cast<int>(LinkScheme::scheme1)},
    {"scheme2", static_cast<int>(LinkScheme::scheme2)},
    {"scheme3", static_cast<int>(LinkScheme::scheme3)},
};
constexpr Named kSchemes[] = {
    {"proposed", static_cast<int>(Scheme::proposed)},
    {"random_phi", static_cast<int>(Scheme::random_phi)},
    {"mrt_alt", static_cast<int>(Scheme::mrt_alt)},
    {"zf_alt", static_cast<int>(Scheme::zf_alt)},
    {"mmse_alt", static_cast<int>(Scheme::mmse_alt)},
};

template <std::size_t N>
const char* name_of(const Named (&table)[N], int value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "unknown";
}

template <std::size_t N>
int value_of(const Named (&table)[N], const std::string& name, const char* what) {
  for (const auto& e : table) {
    if (name == e.name) return e.value;
  }
  throw ConfigError(std::string("unknown ") + what + " '" + name + "'");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  return v;
}

long long to_integer(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s) { return static_cast<int>(to_integer(s)); }

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(to_double(part));
  return out;
}

Position to_position(const std::string& s) {
  const auto v = to_doubles(s);
  if (v.size() != 2) throw ConfigError("expected a position 'x, y', got '" + s + "'");
  return {v[0], v[1]};
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// dBm values pass through log10/pow; rounding keeps the text stable.
std::string fmt_dbm(double watts) {
  return fmt(std::round(watts_to_dbm(watts) * 1e9) / 1e9);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

std::string fmt_position(const Position& p) { return fmt(p[0]) + ", " + fmt(p[1]); }

using Setter = std::function<void(HarnessConfig&, const std::string&)>;

// Keys in canonical order.
const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"num_bs_antennas", [](HarnessConfig& c, const std::string& v) { c.sys.num_bs_antennas = to_int(v); }},
      {"num_irs",
       [](HarnessConfig& c, const std::string& v) {
         const int s = to_int(v);
         if (s < 1) throw ConfigError("num_irs must be >= 1");
         c.sys.irs_elements.assign(s, c.sys.irs_elements.empty() ? 20 : c.sys.irs_elements.front());
       }},
      {"elements_per_irs",
       [](HarnessConfig& c, const std::string& v) {
         std::fill(c.sys.irs_elements.begin(), c.sys.irs_elements.end(), to_int(v));
       }},
      {"num_users", [](HarnessConfig& c, const std::string& v) { c.sys.num_users = to_int(v); }},
      {"power_dbm", [](HarnessConfig& c, const std::string& v) { c.sys.power_budget = dbm_to_watts(to_double(v)); }},
      {"noise_dbm",
       [](HarnessConfig& c, const std::string& v) { c.sys.noise_power.assign(1, dbm_to_watts(to_double(v))); }},
      {"weights", [](HarnessConfig& c, const std::string& v) { c.sys.weights = to_doubles(v); }},
      {"quantizer_levels",
       [](HarnessConfig& c, const std::string& v) {
         const int q = to_int(v);
         if (q < 0) throw ConfigError("quantizer_levels must be >= 0 (0 means continuous)");
         c.sys.quantizer_levels = q == 0 ? std::nullopt : std::optional<int>(q);
       }},
      {"bs_position", [](HarnessConfig& c, const std::string& v) { c.geo.bs_position = to_position(v); }},
      {"irs_positions",
       [](HarnessConfig& c, const std::string& v) {
         c.geo.irs_positions.clear();
         for (const auto& p : split(v, ';')) c.geo.irs_positions.push_back(to_position(p));
       }},
      {"user_center", [](HarnessConfig& c, const std::string& v) { c.geo.user_center = to_position(v); }},
      {"user_radius", [](HarnessConfig& c, const std::string& v) { c.geo.user_radius = to_double(v); }},
      {"carrier_freq", [](HarnessConfig& c, const std::string& v) { c.geo.carrier_freq = to_double(v); }},
      {"nlos_paths", [](HarnessConfig& c, const std::string& v) { c.params.num_nlos_paths = to_int(v); }},
      {"los_gain_var", [](HarnessConfig& c, const std::string& v) { c.params.los_gain_var = to_double(v); }},
      {"nlos_gain_var", [](HarnessConfig& c, const std::string& v) { c.params.nlos_gain_var = to_double(v); }},
      {"rows_per_panel", [](HarnessConfig& c, const std::string& v) { c.params.rows_per_panel = to_int(v); }},
      {"family",
       [](HarnessConfig& c, const std::string& v) { c.spec.family = parse_family(v); }},
      {"sweep", [](HarnessConfig& c, const std::string& v) { c.spec.sweep_values = to_doubles(v); }},
      {"trials", [](HarnessConfig& c, const std::string& v) { c.spec.trials = to_int(v); }},
      {"base_seed",
       [](HarnessConfig& c, const std::string& v) {
         const long long s = to_integer(v);
         if (s < 0) throw ConfigError("base_seed must be non-negative");
         c.spec.base_seed = static_cast<std::uint64_t>(s);
       }},
      {"objective",
       [](HarnessConfig& c, const std::string& v) {
         if (v == "sum_rate") {
           c.spec.objective = Objective::sum_rate;
         } else if (v == "min_rate") {
           c.spec.objective = Objective::min_rate;
         } else {
           throw ConfigError("objective must be sum_rate or min_rate, got '" + v + "'");
         }
       }},
      {"schemes",
       [](HarnessConfig& c, const std::string& v) {
         c.spec.schemes.clear();
         for (const auto& s : split(v, ',')) c.spec.schemes.push_back(parse_scheme(s));
       }},
      {"blocking",
       [](HarnessConfig& c, const std::string& v) {
         if (v == "none") {
           c.spec.blocking.reset();
           return;
         }
         const auto p = to_doubles(v);
         if (p.size() != 2) throw ConfigError("blocking expects 'p1, p2' or 'none'");
         c.spec.blocking = BlockingConfig{p[0], p[1]};
       }},
      {"inter_irs_scheme",
       [](HarnessConfig& c, const std::string& v) {
         const LinkScheme s = parse_link_scheme(v);
         c.spec.inter_irs_scheme = s == LinkScheme::none ? std::nullopt : std::optional<LinkScheme>(s);
       }},
      {"irs_split_total", [](HarnessConfig& c, const std::string& v) { c.spec.irs_split_total = to_int(v); }},
      {"max_outer", [](HarnessConfig& c, const std::string& v) { c.spec.max_outer = to_int(v); }},
      {"outer_tol", [](HarnessConfig& c, const std::string& v) { c.spec.outer_tol = to_double(v); }},
      {"inner_max_iters", [](HarnessConfig& c, const std::string& v) { c.spec.inner_max_iters = to_int(v); }},
      {"inner_grad_tol", [](HarnessConfig& c, const std::string& v) { c.spec.inner_grad_tol = to_double(v); }},
  };
  return table;
}

// Per-user vectors given as one value apply to every user.
std::vector<double> broadcast(const std::vector<double>& v, int k, const char* what) {
  if (static_cast<int>(v.size()) == k) return v;
  if (v.size() == 1) return std::vector<double>(k, v.front());
  throw PreconditionError(std::string(what) + " lists " + std::to_string(v.size()) +
                          " values for " + std::to_string(k) + " users");
}

bool all_equal(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

void require_multiple(int value, int rows, const std::string& what) {
  if (value % rows != 0) {
    throw PreconditionError(what + " = " + std::to_string(value) +
                            " is not a multiple of rows_per_panel = " + std::to_string(rows));
  }
}

}  // namespace

const char* to_string(Family f) { return name_of(kFamilies, static_cast<int>(f)); }
const char* to_string(LinkScheme s) { return name_of(kLinkSchemes, static_cast<int>(s)); }
const char* to_string(Scheme s) { return name_of(kSchemes, static_cast<int>(s)); }
Family parse_family(const std::string& s) { return static_cast<Family>(value_of(kFamilies, s, "family")); }
LinkScheme parse_link_scheme(const std::string& s) {
  return static_cast<LinkScheme>(value_of(kLinkSchemes, s, "inter_irs_scheme"));
}
Scheme parse_scheme(const std::string& s) { return static_cast<Scheme>(value_of(kSchemes, s, "scheme")); }

std::vector<double> default_sweep(Family f) {
  switch (f) {
    case Family::convergence: return {30};
    case Family::vs_bs_antennas: return {10, 15, 20, 25, 30};
    case Family::vs_irs_elements: return {10, 20, 30, 40};
    case Family::vs_users: return {2, 4, 6, 8};
    case Family::vs_power: return {0, 10, 20, 30, 40};
    case Family::vs_quantization: return {2, 4, 8, 0};
    case Family::irs_split: return {0, 5, 10, 15, 20, 25, 30};
    case Family::blocking_schemes: return {10, 20, 30};
  }
  return {};
}

HarnessConfig parse_config(std::istream& is) {
  HarnessConfig cfg;
  cfg.sys = SystemConfig::uniform(20, 20, 2, 4, dbm_to_watts(30.0), dbm_to_watts(-80.0));
  // Single defaults so they broadcast to whatever num_users ends up being.
  cfg.sys.noise_power.resize(1);
  cfg.sys.weights.resize(1);
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = setters();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
    if (it == table.end()) throw ConfigError("unknown key '" + key + "'", lineno);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", lineno);
    try {
      it->second(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), lineno);
    }
  }
  if (!seen.count("sweep")) cfg.spec.sweep_values = default_sweep(cfg.spec.family);
  if (cfg.sys.num_users < 1) throw PreconditionError("num_users must be >= 1");
  // Per-user vectors follow num_users whatever order the keys came in.
  cfg.sys.noise_power = broadcast(cfg.sys.noise_power, cfg.sys.num_users, "noise_dbm");
  cfg.sys.weights = broadcast(cfg.sys.weights, cfg.sys.num_users, "weights");
  validate_config(cfg);
  return cfg;
}

HarnessConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const HarnessConfig& c) {
  std::map<std::string, std::string> values;
  values["num_bs_antennas"] = std::to_string(c.sys.num_bs_antennas);
  values["num_irs"] = std::to_string(c.sys.num_irs());
  values["elements_per_irs"] = std::to_string(c.sys.irs_elements.front());
  values["num_users"] = std::to_string(c.sys.num_users);
  values["power_dbm"] = fmt_dbm(c.sys.power_budget);
  values["noise_dbm"] = fmt_dbm(c.sys.noise_power.front());
  values["weights"] = fmt_list(c.sys.weights);
  values["quantizer_levels"] = std::to_string(c.sys.quantizer_levels.value_or(0));
  values["bs_position"] = fmt_position(c.geo.bs_position);
  std::string irs;
  for (std::size_t i = 0; i < c.geo.irs_positions.size(); ++i) {
    irs += (i ? "; " : "") + fmt_position(c.geo.irs_positions[i]);
  }
  values["irs_positions"] = irs;
  values["user_center"] = fmt_position(c.geo.user_center);
  values["user_radius"] = fmt(c.geo.user_radius);
  values["carrier_freq"] = fmt(c.geo.carrier_freq);
  values["nlos_paths"] = std::to_string(c.params.num_nlos_paths);
  values["los_gain_var"] = fmt(c.params.los_gain_var);
  values["nlos_gain_var"] = fmt(c.params.nlos_gain_var);
  values["rows_per_panel"] = std::to_string(c.params.rows_per_panel);
  values["family"] = to_string(c.spec.family);
  values["sweep"] = fmt_list(c.spec.sweep_values);
  values["trials"] = std::to_string(c.spec.trials);
  values["base_seed"] = std::to_string(c.spec.base_seed);
  values["objective"] = to_string(c.spec.objective);
  std::string schemes;
  for (std::size_t i = 0; i < c.spec.schemes.size(); ++i) {
    schemes += std::string(i ? ", " : "") + to_string(c.spec.schemes[i]);
  }
  values["schemes"] = schemes;
  values["blocking"] =
      c.spec.blocking ? fmt(c.spec.blocking->p1) + ", " + fmt(c.spec.blocking->p2) : "none";
  values["inter_irs_scheme"] = to_string(c.spec.inter_irs_scheme.value_or(LinkScheme::none));
  values["irs_split_total"] = std::to_string(c.spec.irs_split_total);
  values["max_outer"] = std::to_string(c.spec.max_outer);
  values["outer_tol"] = fmt(c.spec.outer_tol);
  values["inner_max_iters"] = std::to_string(c.spec.inner_max_iters);
  values["inner_grad_tol"] = fmt(c.spec.inner_grad_tol);

  std::string out;
  for (const auto& [key, setter] : setters()) out += key + " = " + values.at(key) + "\n";
  return out;
}

void validate_config(const HarnessConfig& c) {
  if (!std::all_of(c.sys.irs_elements.begin(), c.sys.irs_elements.end(),
                   [&](int m) { return m == c.sys.irs_elements.front(); })) {
    throw PreconditionError("config files describe equal-sized panels only");
  }
  if (!all_equal(c.sys.noise_power)) throw PreconditionError("noise_dbm applies to every user");
  c.sys.validate();
  c.geo.validate(c.sys.num_irs());
  c.params.validate();
  require_multiple(c.sys.num_bs_antennas, c.params.rows_per_panel, "num_bs_antennas");
  require_multiple(c.sys.irs_elements.front(), c.params.rows_per_panel, "elements_per_irs");
  const ExperimentSpec& s = c.spec;
  if (s.trials < 1) throw PreconditionError("trials must be >= 1");
  if (s.sweep_values.empty()) throw PreconditionError("sweep must list at least one value");
  if (s.schemes.empty()) throw PreconditionError("schemes must list at least one scheme");
  if (s.max_outer < 0 || s.inner_max_iters < 0) throw PreconditionError("iteration budgets must be >= 0");
  if (!(s.outer_tol > 0.0) || !(s.inner_grad_tol >= 0.0)) {
    throw PreconditionError("outer_tol must be positive and inner_grad_tol non-negative");
  }
  if (s.blocking) {
    s.blocking->validate();
    if (c.sys.num_irs() != 2) throw UnsupportedConfiguration("blocking is defined for num_irs = 2 only");
  }
  if ((s.inter_irs_scheme || s.family == Family::blocking_schemes) && c.sys.num_irs() != 2) {
    throw UnsupportedConfiguration("inter-IRS link schemes need num_irs = 2");
  }
  if (s.family == Family::irs_split && c.sys.num_irs() != 2) {
    throw UnsupportedConfiguration("irs_split needs num_irs = 2");
  }
  if (s.family == Family::vs_users && !all_equal(c.sys.weights)) {
    throw PreconditionError("vs_users sweeps need equal weights for every user");
  }
  for (double v : s.sweep_values) {
    const SweepPoint p = apply_sweep(c, v);
    p.sys.validate();
    p.geo.validate(p.sys.num_irs());
    require_multiple(p.sys.num_bs_antennas, c.params.rows_per_panel, "num_bs_antennas");
    for (int m : p.sys.irs_elements) require_multiple(m, c.params.rows_per_panel, "IRS element count");
  }
}

SweepPoint apply_sweep(const HarnessConfig& c, double value) {
  SweepPoint p{c.sys, c.geo, c.spec.max_outer};
  const int iv = static_cast<int>(std::lround(value));
  const bool integral = static_cast<double>(iv) == value;
  auto need_integer = [&](const char* what) {
    if (!integral) throw PreconditionError(std::string(what) + " sweep values must be integers");
  };
  switch (c.spec.family) {
    case Family::convergence:
      need_integer("convergence");
      if (iv < 0) throw PreconditionError("convergence sweep values must be >= 0");
      p.max_outer = iv;
      break;
    case Family::vs_bs_antennas:
      need_integer("vs_bs_antennas");
      p.sys.num_bs_antennas = iv;
      break;
    case Family::vs_irs_elements:
    case Family::blocking_schemes:
      need_integer(to_string(c.spec.family));
      std::fill(p.sys.irs_elements.begin(), p.sys.irs_elements.end(), iv);
      break;
    case Family::vs_users:
      need_integer("vs_users");
      if (iv < 1) throw PreconditionError("vs_users sweep values must be >= 1");
      p.sys.num_users = iv;
      p.sys.noise_power.assign(iv, c.sys.noise_power.front());
      p.sys.weights.assign(iv, c.sys.weights.front());
      break;
    case Family::vs_power:
      p.sys.power_budget = dbm_to_watts(value);
      break;
    case Family::vs_quantization:
      need_integer("vs_quantization");
      if (iv < 0) throw PreconditionError("vs_quantization sweep values must be >= 0");
      p.sys.quantizer_levels = iv == 0 ? std::nullopt : std::optional<int>(iv);
      break;
    case Family::irs_split: {
      need_integer("irs_split");
      const int m1 = iv;
      const int m2 = c.spec.irs_split_total - m1;
      if (m1 < 0 || m2 < 0) throw PreconditionError("irs_split values must lie in [0, irs_split_total]");
      // An empty panel is dropped; the other keeps its own position.
      p.sys.irs_elements.clear();
      p.geo.irs_positions.clear();
      if (m1 > 0) {
        p.sys.irs_elements.push_back(m1);
        p.geo.irs_positions.push_back(c.geo.irs_positions[0]);
      }
      if (m2 > 0) {
        p.sys.irs_elements.push_back(m2);
        p.geo.irs_positions.push_back(c.geo.irs_positions[1]);
      }
      if (p.sys.irs_elements.empty()) throw PreconditionError("irs_split_total must be positive");
      break;
    }
  }
  return p;
}

}  // namespace irsopt
