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

#include "irsopt/channel_model.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "irsopt/errors.hpp"

namespace irsopt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double distance(const Position& a, const Position& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

// Draw helpers share one engine so the sequence of draws defines the realization.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  cd circular_gaussian(double variance) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::sqrt(variance / 2.0);
    const double re = normal(engine_);
    const double im = normal(engine_);
    return {scale * re, scale * im};
  }

  // Azimuth on [0, 2pi), elevation on [0, pi).
  std::pair<double, double> angles() {
    const double az = uniform(0.0, kTwoPi);
    const double el = uniform(0.0, std::numbers::pi);
    return {az, el};
  }

 private:
  std::mt19937_64 engine_;
};

int panel_columns(int elements, int rows, const char* what) {
  if (elements % rows != 0) {
    throw PreconditionError(std::string(what) + ": element count " + std::to_string(elements) +
                            " is not a multiple of " + std::to_string(rows) + " rows");
  }
  return elements / rows;
}

double gain_variance(const ChannelParams& params, int path) {
  return path == 0 ? params.los_gain_var : params.nlos_gain_var;
}

}  // namespace

void GeometryConfig::validate(int num_irs) const {
  if (!(user_radius > 0.0)) throw PreconditionError("user_radius must be positive");
  if (!(carrier_freq > 0.0)) throw PreconditionError("carrier_freq must be positive");
  if (static_cast<int>(irs_positions.size()) != num_irs) {
    throw PreconditionError("irs_positions must list one position per IRS (" +
                            std::to_string(num_irs) + ")");
  }
}

void ChannelParams::validate() const {
  if (num_nlos_paths < 0 || rows_per_panel < 1) {
    throw PreconditionError("ChannelParams: path count must be >= 0 and rows_per_panel >= 1");
  }
  if (!(los_gain_var >= 0.0) || !(nlos_gain_var >= 0.0)) {
    throw PreconditionError("ChannelParams: gain variances must be non-negative");
  }
}

void BlockingConfig::validate() const {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
    throw PreconditionError("BlockingConfig: probabilities must lie in [0, 1]");
  }
}

ChannelSet::ChannelSet(std::vector<CMatrix> bs_to_irs,
                       std::vector<std::vector<CRowVector>> irs_to_user,
                       std::optional<CMatrix> inter_irs)
    : bs_to_irs_(std::move(bs_to_irs)),
      irs_to_user_(std::move(irs_to_user)),
      inter_irs_(std::move(inter_irs)) {
  validate_shapes();
  rebuild_stacked();
}

void ChannelSet::validate_shapes() const {
  if (bs_to_irs_.empty()) throw DimensionError("ChannelSet: no BS->IRS channels");
  if (irs_to_user_.empty()) throw DimensionError("ChannelSet: no users");
  const auto n = bs_to_irs_.front().cols();
  for (const auto& h : bs_to_irs_) {
    if (h.cols() != n || h.rows() < 1) throw DimensionError("ChannelSet: inconsistent H_s shapes");
  }
  for (const auto& rows : irs_to_user_) {
    if (rows.size() != bs_to_irs_.size()) {
      throw DimensionError("ChannelSet: each user needs one row per IRS");
    }
    for (std::size_t s = 0; s < rows.size(); ++s) {
      if (rows[s].size() != bs_to_irs_[s].rows()) {
        throw DimensionError("ChannelSet: g_{s,k} length differs from panel size");
      }
    }
  }
  if (inter_irs_) {
    if (bs_to_irs_.size() != 2) throw DimensionError("ChannelSet: inter-IRS link needs S = 2");
    if (inter_irs_->rows() != bs_to_irs_[1].rows() || inter_irs_->cols() != bs_to_irs_[0].rows()) {
      throw DimensionError("ChannelSet: inter-IRS matrix must be M2 x M1");
    }
  }
}

int ChannelSet::panel_offset(int s) const {
  int offset = 0;
  for (int i = 0; i < s; ++i) offset += elements(i);
  return offset;
}

void ChannelSet::rebuild_stacked() {
  validate_shapes();
  Eigen::Index total = 0;
  for (const auto& h : bs_to_irs_) total += h.rows();
  stacked_H_.resize(total, num_bs_antennas());
  stacked_g_.resize(num_users(), total);
  Eigen::Index offset = 0;
  for (int s = 0; s < num_irs(); ++s) {
    const auto m = bs_to_irs_[s].rows();
    stacked_H_.middleRows(offset, m) = bs_to_irs_[s];
    for (int k = 0; k < num_users(); ++k) {
      stacked_g_.row(k).segment(offset, m) = irs_to_user_[k][s];
    }
    offset += m;
  }
}

void ChannelSet::check_against(const SystemConfig& sys) const {
  if (num_bs_antennas() != sys.num_bs_antennas || num_users() != sys.num_users ||
      num_irs() != sys.num_irs()) {
    throw DimensionError("ChannelSet does not match SystemConfig dimensions");
  }
  for (int s = 0; s < num_irs(); ++s) {
    if (elements(s) != sys.irs_elements[s]) {
      throw DimensionError("ChannelSet panel " + std::to_string(s) + " size differs from config");
    }
  }
}

bool ChannelSet::operator==(const ChannelSet& other) const {
  if (seed != other.seed || bs_to_irs_.size() != other.bs_to_irs_.size() ||
      irs_to_user_.size() != other.irs_to_user_.size() ||
      inter_irs_.has_value() != other.inter_irs_.has_value() ||
      user_positions != other.user_positions) {
    return false;
  }
  for (std::size_t s = 0; s < bs_to_irs_.size(); ++s) {
    if (bs_to_irs_[s].rows() != other.bs_to_irs_[s].rows() ||
        bs_to_irs_[s].cols() != other.bs_to_irs_[s].cols() ||
        bs_to_irs_[s] != other.bs_to_irs_[s]) {
      return false;
    }
  }
  for (std::size_t k = 0; k < irs_to_user_.size(); ++k) {
    for (std::size_t s = 0; s < irs_to_user_[k].size(); ++s) {
      if (irs_to_user_[k][s] != other.irs_to_user_[k][s]) return false;
    }
  }
  return !inter_irs_ || *inter_irs_ == *other.inter_irs_;
}

CVector steering_vector(double azimuth, double elevation, int rows, int cols) {
  if (rows < 1 || cols < 1) throw PreconditionError("steering_vector: dimensions must be positive");
  // 2*pi/lambda * d with d = lambda/2.
  constexpr double kPhasePerIndex = std::numbers::pi;
  const double row_phase = kPhasePerIndex * std::sin(azimuth) * std::sin(elevation);
  const double col_phase = kPhasePerIndex * std::cos(elevation);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows) * cols);
  CVector a(static_cast<Eigen::Index>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      a[static_cast<Eigen::Index>(r) * cols + c] = std::polar(scale, r * row_phase + c * col_phase);
    }
  }
  return a;
}

double path_loss(double distance, double freq) {
  if (!(distance > 0.0)) throw PreconditionError("path_loss: distance must be positive");
  const double x = 4.0 * std::numbers::pi * freq * distance / kSpeedOfLight;
  return x * x;
}

ChannelSet synthesize_channels(const SystemConfig& sys, const GeometryConfig& geo,
                               const ChannelParams& params, std::uint64_t seed) {
  sys.validate();
  geo.validate(sys.num_irs());
  params.validate();

  const int rows = params.rows_per_panel;
  const int n = sys.num_bs_antennas;
  const int bs_cols = panel_columns(n, rows, "BS array");
  std::vector<int> irs_cols;
  for (int m : sys.irs_elements) irs_cols.push_back(panel_columns(m, rows, "IRS panel"));

  Sampler rng(seed);

  std::vector<Position> users;
  users.reserve(sys.num_users);
  for (int k = 0; k < sys.num_users; ++k) {
    const double r = geo.user_radius * std::sqrt(rng.uniform(0.0, 1.0));
    const double a = rng.uniform(0.0, kTwoPi);
    users.push_back({geo.user_center[0] + r * std::cos(a), geo.user_center[1] + r * std::sin(a)});
  }

  const int paths = params.num_nlos_paths + 1;
  std::vector<CMatrix> bs_to_irs;
  for (int s = 0; s < sys.num_irs(); ++s) {
    const int m = sys.irs_elements[s];
    const double loss = path_loss(distance(geo.bs_position, geo.irs_positions[s]), geo.carrier_freq);
    CMatrix h = CMatrix::Zero(m, n);
    for (int l = 0; l < paths; ++l) {
      const cd beta = rng.circular_gaussian(gain_variance(params, l));
      const auto [az_r, el_r] = rng.angles();
      const auto [az_t, el_t] = rng.angles();
      h += beta * steering_vector(az_r, el_r, rows, irs_cols[s]) *
           steering_vector(az_t, el_t, rows, bs_cols).adjoint();
    }
    bs_to_irs.push_back(std::sqrt(static_cast<double>(n) * m / loss) * h);
  }

  std::vector<std::vector<CRowVector>> irs_to_user(sys.num_users);
  for (int k = 0; k < sys.num_users; ++k) {
    for (int s = 0; s < sys.num_irs(); ++s) {
      const int m = sys.irs_elements[s];
      const double loss = path_loss(distance(geo.irs_positions[s], users[k]), geo.carrier_freq);
      CRowVector g = CRowVector::Zero(m);
      for (int l = 0; l < paths; ++l) {
        const cd beta = rng.circular_gaussian(gain_variance(params, l));
        const auto [az, el] = rng.angles();
        g += beta * steering_vector(az, el, rows, irs_cols[s]).adjoint();
      }
      irs_to_user[k].push_back(std::sqrt(static_cast<double>(m) / loss) * g);
    }
  }

  std::optional<CMatrix> inter;
  if (sys.num_irs() == 2) {
    const int m1 = sys.irs_elements[0];
    const int m2 = sys.irs_elements[1];
    const double loss =
        path_loss(distance(geo.irs_positions[0], geo.irs_positions[1]), geo.carrier_freq);
    CMatrix lam = CMatrix::Zero(m2, m1);
    for (int l = 0; l < paths; ++l) {
      const cd beta = rng.circular_gaussian(gain_variance(params, l));
      const auto [az_r, el_r] = rng.angles();
      const auto [az_t, el_t] = rng.angles();
      lam += beta * steering_vector(az_r, el_r, rows, irs_cols[1]) *
             steering_vector(az_t, el_t, rows, irs_cols[0]).adjoint();
    }
    inter = std::sqrt(static_cast<double>(m1) * m2 / loss) * lam;
  }

  ChannelSet ch(std::move(bs_to_irs), std::move(irs_to_user), std::move(inter));
  ch.seed = seed;
  ch.user_positions = std::move(users);
  return ch;
}

double blocking_probability(double p_per_10m, double distance) {
  return 1.0 - std::pow(1.0 - p_per_10m, distance / 10.0);
}

ChannelSet apply_blocking(const ChannelSet& ch, const GeometryConfig& geo,
                          const BlockingConfig& blk, std::uint64_t seed) {
  blk.validate();
  if (ch.num_irs() != 2) {
    throw UnsupportedConfiguration("apply_blocking: blocking is defined for exactly two IRSs");
  }
  geo.validate(2);

  Sampler rng(seed);
  ChannelSet out = ch;
  auto maybe_block = [&](double p, double d) { return rng.uniform(0.0, 1.0) < blocking_probability(p, d); };

  const double d_bs_1 = distance(geo.bs_position, geo.irs_positions[0]);
  const double d_bs_2 = distance(geo.bs_position, geo.irs_positions[1]);
  const double d_12 = distance(geo.irs_positions[0], geo.irs_positions[1]);
  const double d_1u = distance(geo.irs_positions[0], geo.user_center);
  const double d_2u = distance(geo.irs_positions[1], geo.user_center);

  if (maybe_block(blk.p1, d_bs_1)) out.mutable_bs_to_irs(0).setZero();
  if (maybe_block(blk.p2, d_bs_2)) out.mutable_bs_to_irs(1).setZero();
  // Always consume the draw so blocking of the remaining links does not depend on Lambda's presence.
  const bool block_inter = maybe_block(blk.p1, d_12);
  if (block_inter && out.mutable_inter_irs()) out.mutable_inter_irs()->setZero();
  for (int k = 0; k < out.num_users(); ++k) {
    if (maybe_block(blk.p2, d_1u)) out.mutable_irs_to_user(k, 0).setZero();
    if (maybe_block(blk.p2, d_2u)) out.mutable_irs_to_user(k, 1).setZero();
  }
  out.rebuild_stacked();
  return out;
}

namespace {

void write_entries(std::ostream& os, const CMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", m(r, c).real(), m(r, c).imag());
      os << buf;
    }
  }
}

std::string next_content_line(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '#') return line;
  }
  throw ConfigError("channel set: unexpected end of input");
}

template <typename T>
T expect_keyword(std::istream& is, const std::string& keyword) {
  std::istringstream ss(next_content_line(is));
  std::string key;
  T value{};
  if (!(ss >> key >> value) || key != keyword) {
    throw ConfigError("channel set: expected '" + keyword + "'");
  }
  return value;
}

CMatrix read_entries(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::istringstream ss(next_content_line(is));
      double re = 0.0;
      double im = 0.0;
      if (!(ss >> re >> im)) throw ConfigError("channel set: malformed complex entry");
      m(r, c) = {re, im};
    }
  }
  return m;
}

void expect_section(std::istream& is, const std::string& expected) {
  const std::string line = next_content_line(is);
  if (line != expected) throw ConfigError("channel set: expected section '" + expected + "'");
}

}  // namespace

void write_channel_set(std::ostream& os, const ChannelSet& ch) {
  os << "# irsopt channel set v1\n";
  os << "seed " << ch.seed << "\n";
  os << "bs_antennas " << ch.num_bs_antennas() << "\n";
  os << "users " << ch.num_users() << "\n";
  os << "irs " << ch.num_irs() << "\n";
  for (int s = 0; s < ch.num_irs(); ++s) os << "elements " << ch.elements(s) << "\n";
  os << "inter_irs " << (ch.inter_irs() ? 1 : 0) << "\n";
  os << "user_positions " << ch.user_positions.size() << "\n";
  for (const auto& p : ch.user_positions) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", p[0], p[1]);
    os << buf;
  }
  for (int s = 0; s < ch.num_irs(); ++s) {
    os << "H " << s << "\n";
    write_entries(os, ch.bs_to_irs()[s]);
  }
  for (int k = 0; k < ch.num_users(); ++k) {
    for (int s = 0; s < ch.num_irs(); ++s) {
      os << "g " << k << " " << s << "\n";
      write_entries(os, ch.irs_to_user()[k][s]);
    }
  }
  if (ch.inter_irs()) {
    os << "Lambda\n";
    write_entries(os, *ch.inter_irs());
  }
}

ChannelSet read_channel_set(std::istream& is) {
  const auto seed = expect_keyword<std::uint64_t>(is, "seed");
  const auto n = expect_keyword<int>(is, "bs_antennas");
  const auto k_users = expect_keyword<int>(is, "users");
  const auto s_irs = expect_keyword<int>(is, "irs");
  if (n < 1 || k_users < 1 || s_irs < 1) throw ConfigError("channel set: bad dimensions");
  std::vector<int> elements;
  for (int s = 0; s < s_irs; ++s) elements.push_back(expect_keyword<int>(is, "elements"));
  const auto has_inter = expect_keyword<int>(is, "inter_irs");
  const auto num_pos = expect_keyword<std::size_t>(is, "user_positions");
  std::vector<Position> positions;
  for (std::size_t i = 0; i < num_pos; ++i) {
    std::istringstream ss(next_content_line(is));
    Position p{};
    if (!(ss >> p[0] >> p[1])) throw ConfigError("channel set: malformed user position");
    positions.push_back(p);
  }
  std::vector<CMatrix> h;
  for (int s = 0; s < s_irs; ++s) {
    expect_section(is, "H " + std::to_string(s));
    h.push_back(read_entries(is, elements[s], n));
  }
  std::vector<std::vector<CRowVector>> g(k_users);
  for (int k = 0; k < k_users; ++k) {
    for (int s = 0; s < s_irs; ++s) {
      expect_section(is, "g " + std::to_string(k) + " " + std::to_string(s));
      g[k].push_back(read_entries(is, 1, elements[s]).row(0));
    }
  }
  std::optional<CMatrix> lam;
  if (has_inter) {
    expect_section(is, "Lambda");
    lam = read_entries(is, elements[1], elements[0]);
  }
  ChannelSet ch(std::move(h), std::move(g), std::move(lam));
  ch.seed = seed;
  ch.user_positions = std::move(positions);
  return ch;
}

}  // namespace irsopt
