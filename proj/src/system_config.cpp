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

#include "irsopt/system_config.hpp"

#include <cmath>
#include <string>

#include "irsopt/errors.hpp"

namespace irsopt {

int SystemConfig::total_elements() const {
  int total = 0;
  for (int m : irs_elements) total += m;
  return total;
}

int SystemConfig::panel_offset(int s) const {
  int offset = 0;
  for (int i = 0; i < s; ++i) offset += irs_elements[i];
  return offset;
}

void SystemConfig::validate() const {
  if (num_bs_antennas < 1) throw PreconditionError("num_bs_antennas must be >= 1");
  if (irs_elements.empty()) throw PreconditionError("at least one IRS is required");
  for (int m : irs_elements) {
    if (m < 1) throw PreconditionError("every IRS needs at least one element");
  }
  if (num_users < 1) throw PreconditionError("num_users must be >= 1");
  if (!(power_budget > 0.0) || !std::isfinite(power_budget)) {
    throw PreconditionError("power_budget must be positive");
  }
  if (static_cast<int>(noise_power.size()) != num_users) {
    throw PreconditionError("noise_power needs one entry per user");
  }
  if (static_cast<int>(weights.size()) != num_users) {
    throw PreconditionError("weights needs one entry per user");
  }
  for (double s2 : noise_power) {
    if (!(s2 > 0.0)) throw PreconditionError("noise powers must be positive");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw PreconditionError("weights must be non-negative");
  }
  if (quantizer_levels && *quantizer_levels < 1) {
    throw PreconditionError("quantizer_levels must be >= 1");
  }
}

SystemConfig SystemConfig::uniform(int n, int m, int s, int k, double power_watts,
                                   double noise_watts) {
  SystemConfig sys;
  sys.num_bs_antennas = n;
  sys.irs_elements.assign(static_cast<std::size_t>(std::max(s, 0)), m);
  sys.num_users = k;
  sys.power_budget = power_watts;
  sys.noise_power.assign(static_cast<std::size_t>(std::max(k, 0)), noise_watts);
  sys.weights.assign(static_cast<std::size_t>(std::max(k, 0)), 1.0);
  return sys;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

}  // namespace irsopt
