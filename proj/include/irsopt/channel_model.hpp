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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "irsopt/linalg.hpp"
#include "irsopt/system_config.hpp"

namespace irsopt {

inline constexpr double kSpeedOfLight = 3e8;

using Position = std::array<double, 2>;

/// Deployment layout. Defaults reproduce the reference two-panel scenario.
struct GeometryConfig {
  Position bs_position{0.0, 0.0};
  std::vector<Position> irs_positions{{10.0, 24.0}, {24.0, 10.0}};
  Position user_center{20.0, 0.0};
  double user_radius = 2.0;
  double carrier_freq = 3e9;

  void validate(int num_irs) const;
};

/// Saleh-Valenzuela parameters shared by every link.
struct ChannelParams {
  int num_nlos_paths = 3;
  double los_gain_var = 2.0;
  double nlos_gain_var = 0.4;
  int rows_per_panel = 5;

  void validate() const;
};

/// Per-10-metre blocking probabilities of the double-IRS layout.
struct BlockingConfig {
  double p1 = 0.0;  ///< H_1 and the inter-IRS link
  double p2 = 0.0;  ///< H_2, g_{1,k} and g_{2,k}

  void validate() const;
};

/// BS->IRS, IRS->user and (optionally) IRS1->IRS2 channels of one realization.
///
/// `irs_to_user[k][s]` holds the row g_{s,k}^H (already conjugated). The
/// stacked views are rebuilt on construction and on every mutation through
/// `rebuild_stacked()`.
class ChannelSet {
 public:
  ChannelSet() = default;
  ChannelSet(std::vector<CMatrix> bs_to_irs, std::vector<std::vector<CRowVector>> irs_to_user,
             std::optional<CMatrix> inter_irs = std::nullopt);

  int num_bs_antennas() const { return static_cast<int>(bs_to_irs_.front().cols()); }
  int num_irs() const { return static_cast<int>(bs_to_irs_.size()); }
  int num_users() const { return static_cast<int>(irs_to_user_.size()); }
  int elements(int s) const { return static_cast<int>(bs_to_irs_[s].rows()); }
  int total_elements() const { return static_cast<int>(stacked_H_.rows()); }
  int panel_offset(int s) const;

  const std::vector<CMatrix>& bs_to_irs() const { return bs_to_irs_; }
  const std::vector<std::vector<CRowVector>>& irs_to_user() const { return irs_to_user_; }
  const std::optional<CMatrix>& inter_irs() const { return inter_irs_; }
  const CMatrix& stacked_H() const { return stacked_H_; }
  /// Row k is g_k^H = [g_{1,k}^H, ..., g_{S,k}^H].
  const CMatrix& stacked_g() const { return stacked_g_; }

  CMatrix& mutable_bs_to_irs(int s) { return bs_to_irs_[s]; }
  CRowVector& mutable_irs_to_user(int k, int s) { return irs_to_user_[k][s]; }
  std::optional<CMatrix>& mutable_inter_irs() { return inter_irs_; }
  void rebuild_stacked();

  /// Dimension checks against `sys`; throws DimensionError.
  void check_against(const SystemConfig& sys) const;

  bool operator==(const ChannelSet& other) const;

  std::uint64_t seed = 0;
  std::vector<Position> user_positions;

 private:
  void validate_shapes() const;

  std::vector<CMatrix> bs_to_irs_;
  std::vector<std::vector<CRowVector>> irs_to_user_;
  std::optional<CMatrix> inter_irs_;
  CMatrix stacked_H_;
  CMatrix stacked_g_;
};

/// Uniform-planar-array response: kron(row factor, column factor) / sqrt(R*C), d = lambda/2.
CVector steering_vector(double azimuth, double elevation, int rows, int cols);

/// Free-space path loss (4*pi*f*D/c)^2.
double path_loss(double distance, double freq);

/// Draws one channel realization. Pure function of its arguments.
///
/// Panel shapes use `params.rows_per_panel` rows and N/R (BS) or M_s/R (IRS)
/// columns; sizes not divisible by R are rejected. The inter-IRS matrix is
/// drawn when S == 2, after every other link, so enabling or ignoring it
/// never perturbs H_s or g_{s,k}.
ChannelSet synthesize_channels(const SystemConfig& sys, const GeometryConfig& geo,
                               const ChannelParams& params, std::uint64_t seed);

/// Zeroes each link independently with probability 1 - (1 - p_i)^(d/10).
/// Only defined for the double-IRS layout.
ChannelSet apply_blocking(const ChannelSet& ch, const GeometryConfig& geo,
                          const BlockingConfig& blk, std::uint64_t seed);

/// Probability that a link of length `distance` is blocked.
double blocking_probability(double p_per_10m, double distance);

/// Text serialization: header with dimensions and seed, then one complex entry per line.
void write_channel_set(std::ostream& os, const ChannelSet& ch);
ChannelSet read_channel_set(std::istream& is);

}  // namespace irsopt
