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

#include <optional>
#include <vector>

namespace irsopt {

/// Dimensions, power budget, noise and weights of one downlink instance.
///
/// Everything is linear scale (watts); dBm conversion happens only when a
/// config file is loaded. `irs_elements[s]` is the element count of panel s,
/// so heterogeneous panel sizes are allowed.
struct SystemConfig {
  int num_bs_antennas = 20;
  std::vector<int> irs_elements{20, 20};
  int num_users = 4;
  double power_budget = 1.0;
  std::vector<double> noise_power{1e-11, 1e-11, 1e-11, 1e-11};
  std::vector<double> weights{1.0, 1.0, 1.0, 1.0};
  /// Number of discrete phase levels; empty means continuous phases.
  std::optional<int> quantizer_levels;

  int num_irs() const { return static_cast<int>(irs_elements.size()); }
  int total_elements() const;
  /// Offset of panel s inside the stacked reflection vector.
  int panel_offset(int s) const;

  /// Throws PreconditionError on any violated invariant.
  void validate() const;

  /// Uniform panels, equal noise on every user, unit weights.
  static SystemConfig uniform(int n, int m, int s, int k, double power_watts, double noise_watts);
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

}  // namespace irsopt
