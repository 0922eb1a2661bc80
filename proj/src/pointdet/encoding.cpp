// Copyright 2026 The pointdet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pointdet/encoding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pointdet/errors.hpp"

namespace pointdet
{

namespace
{

std::uint32_t read_le_u32(const unsigned char * p)
{
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_le_u32(std::uint32_t v, std::string & out)
{
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

}  // namespace

FeatureMatrix parse_feature_file(std::string_view bytes)
{
  if (bytes.size() < 8) {
    throw LengthError("feature file shorter than its 8-byte header");
  }
  const auto * p = reinterpret_cast<const unsigned char *>(bytes.data());
  FeatureMatrix f;
  f.rows = read_le_u32(p);
  f.cols = read_le_u32(p + 4);
  const std::size_t expected = 8 + 4ull * f.rows * f.cols;
  if (bytes.size() != expected) {
    throw LengthError(
      "feature file payload mismatch: expected " + std::to_string(expected) + " bytes, got " +
      std::to_string(bytes.size()));
  }
  f.values.resize(static_cast<std::size_t>(f.rows) * f.cols);
  p += 8;
  for (auto & v : f.values) {
    v = std::bit_cast<float>(read_le_u32(p));
    p += 4;
  }
  return f;
}

std::string serialize_feature_file(const FeatureMatrix & features)
{
  std::string out;
  out.reserve(8 + 4 * features.values.size());
  write_le_u32(features.rows, out);
  write_le_u32(features.cols, out);
  for (const float v : features.values) {
    write_le_u32(std::bit_cast<std::uint32_t>(v), out);
  }
  return out;
}

std::vector<std::uint32_t> sample_proposal_points(
  std::span<const std::uint32_t> interior, std::size_t m, Rng & rng)
{
  if (interior.empty()) {
    throw EmptyProposalError("cannot sample points from an empty interior");
  }
  std::vector<std::uint32_t> out;
  out.reserve(m);
  if (interior.size() >= m) {
    for (const std::size_t k : rng.sample_without_replacement(interior.size(), m)) {
      out.push_back(interior[k]);
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      out.push_back(interior[rng.uniform_below(interior.size())]);
    }
  }
  return out;
}

std::vector<Vec3> canonize(std::span<const Vec3> points, const Vec3 & t_ctr)
{
  Vec3 centroid{};
  for (const Vec3 & p : points) {
    centroid = centroid + p;
  }
  centroid = (1.0 / static_cast<double>(points.size())) * centroid;
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3 & p : points) {
    out.push_back(p - centroid - t_ctr);
  }
  return out;
}

ProposalFeature make_proposal_feature(
  const PointCloud & cloud, std::span<const std::uint32_t> interior,
  const FeatureMatrix * context, const Vec3 & t_ctr, std::size_t m, Rng & rng)
{
  if (context != nullptr && context->rows != cloud.size()) {
    throw ShapeError("feature rows must align with the selected cloud");
  }
  ProposalFeature feature;
  feature.point_indices = sample_proposal_points(interior, m, rng);
  std::vector<Vec3> coords;
  coords.reserve(m);
  for (const std::uint32_t idx : feature.point_indices) {
    coords.push_back(cloud.xyz[idx]);
  }
  feature.f2 = canonize(coords, t_ctr);
  if (context != nullptr) {
    feature.channels = context->cols;
    feature.f1.reserve(m * feature.channels);
    for (const std::uint32_t idx : feature.point_indices) {
      const auto row = context->row(idx);
      feature.f1.insert(feature.f1.end(), row.begin(), row.end());
    }
  }
  return feature;
}

double angle_bin_center(int bin, int n_bins)
{
  if (bin < 0 || bin >= n_bins) {
    throw RangeError(
      "angle bin " + std::to_string(bin) + " outside [0, " + std::to_string(n_bins) + ")");
  }
  const double width = 2.0 * kPi / n_bins;
  return -kPi + (bin + 0.5) * width;
}

int angle_bin_of(double angle, int n_bins)
{
  const double normalized = normalize_angle(angle);
  const double width = 2.0 * kPi / n_bins;
  const int bin = static_cast<int>(std::floor((normalized + kPi) / width));
  return std::clamp(bin, 0, n_bins - 1);
}

RegressionTarget encode_targets(
  const Box3D & proposal, const Vec3 & t_ctr_pred, const Box3D & ground_truth, int n_bins)
{
  RegressionTarget t;
  t.v_ctr = ground_truth.center - proposal.center;
  t.v_ctr_star = t.v_ctr - t_ctr_pred;
  t.v_size_star = {
    (ground_truth.l - proposal.l) / proposal.l,
    (ground_truth.h - proposal.h) / proposal.h,
    (ground_truth.w - proposal.w) / proposal.w,
  };
  t.angle_bin = angle_bin_of(ground_truth.yaw, n_bins);
  t.angle_residual = ground_truth.yaw - angle_bin_center(t.angle_bin, n_bins);
  return t;
}

DecodedBox decode_box(const Box3D & proposal, const PredictionVector & pred)
{
  const Vec3 center = proposal.center + pred.t_ctr + pred.t_ctr_star;
  double sizes[3] = {
    proposal.l * (1.0 + pred.t_size_star[0]),
    proposal.h * (1.0 + pred.t_size_star[1]),
    proposal.w * (1.0 + pred.t_size_star[2]),
  };
  DecodedBox out;
  for (double & s : sizes) {
    if (s < 0.01) {
      s = 0.01;
      out.degenerate = true;
    }
  }
  int best_bin = 0;
  for (std::size_t i = 1; i < pred.angle_logits.size(); ++i) {
    if (pred.angle_logits[i] > pred.angle_logits[best_bin]) {
      best_bin = static_cast<int>(i);
    }
  }
  const int n_bins = static_cast<int>(pred.angle_logits.size());
  const double yaw =
    angle_bin_center(best_bin, n_bins) + pred.angle_residuals[best_bin];
  out.box = Box3D(center, sizes[0], sizes[1], sizes[2], yaw);
  return out;
}

}  // namespace pointdet
