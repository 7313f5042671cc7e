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

// Closed-form precoders and the comparison schemes built from them.

#include <cstdint>
#include <string>

#include "irsopt/domalo.hpp"
#include "irsopt/sdomalo.hpp"

namespace irsopt {

enum class BaselineKind { random_phi, mrt_alt, zf_alt, mmse_alt };
enum class Objective { sum_rate, min_rate };

const char* to_string(BaselineKind kind);
const char* to_string(Objective objective);

/// Condition number above which the ZF Gram matrix counts as singular.
inline constexpr double kZfConditionLimit = 1e12;

/// K x N matrix whose row k is h_k^H.
CMatrix effective_channel_matrix(const ReflectionVector& u, const ChannelSet& ch,
                                 LinkMode mode = LinkMode::direct);

/// Closed forms on an explicit composite channel.
BeamformerMatrix mrt_beamformer(const CMatrix& heff, const SystemConfig& sys);
BeamformerMatrix zf_beamformer(const CMatrix& heff, const SystemConfig& sys);
BeamformerMatrix mmse_beamformer(const CMatrix& heff, const SystemConfig& sys);

BeamformerMatrix mrt_beamformer(const ReflectionVector& u, const ChannelSet& ch,
                                const SystemConfig& sys, LinkMode mode = LinkMode::direct);
BeamformerMatrix zf_beamformer(const ReflectionVector& u, const ChannelSet& ch,
                               const SystemConfig& sys, LinkMode mode = LinkMode::direct);
BeamformerMatrix mmse_beamformer(const ReflectionVector& u, const ChannelSet& ch,
                                 const SystemConfig& sys, LinkMode mode = LinkMode::direct);

/// Uniform random phases drawn from `seed`.
ReflectionVector random_reflection(int length, std::uint64_t seed);

struct BaselineOptions {
  Objective objective = Objective::sum_rate;
  /// Outer budget, tolerances and inner solver settings for sum-rate mode.
  DomaloOptions sum_rate;
  /// Smoothing schedule and inner solver settings for max-min mode.
  SdomaloOptions min_rate;
};

/// random_phi keeps one random reflection and optimizes only the beamformer;
/// the *_alt schemes alternate the closed-form beamformer with a manifold
/// reflection update for max_outer iterations. Traces are not monotone in general.
SolveResult run_baseline(BaselineKind kind, const ChannelSet& ch, const SystemConfig& sys,
                         const BaselineOptions& opts, std::uint64_t seed,
                         LinkMode mode = LinkMode::direct);

}  // namespace irsopt
