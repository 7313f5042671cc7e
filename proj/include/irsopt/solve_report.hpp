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

#include <limits>
#include <vector>

namespace irsopt {

enum class SolveTermination {
  converged,  ///< objective change fell below the outer tolerance
  max_iters,  ///< outer iteration budget exhausted
  mu_floor,   ///< smoothing parameter reached its floor (max-min solver)
};

const char* to_string(SolveTermination t);

/// One outer iteration. Fields that do not apply to a solver are NaN.
struct TraceEntry {
  int iteration = 0;
  double objective = 0.0;
  double tau = std::numeric_limits<double>::quiet_NaN();
  double tau_beam = std::numeric_limits<double>::quiet_NaN();
  double tau_phase = std::numeric_limits<double>::quiet_NaN();
  double mu_v = std::numeric_limits<double>::quiet_NaN();
  double mu_u = std::numeric_limits<double>::quiet_NaN();
  int inner_v_iters = 0;
  int inner_u_iters = 0;
};

struct SolveReport {
  double initial_objective = 0.0;
  std::vector<TraceEntry> trace;
  /// Objective of the returned point (bits).
  double final_objective = 0.0;
  int iterations = 0;
  SolveTermination termination = SolveTermination::max_iters;
};

}  // namespace irsopt
