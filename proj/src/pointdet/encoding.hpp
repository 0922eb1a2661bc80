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

#ifndef POINTDET_ENCODING_HPP_
#define POINTDET_ENCODING_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pointdet/geometry.hpp"
#include "pointdet/point_cloud.hpp"
#include "pointdet/rng.hpp"

namespace pointdet
{

// Regression targets for one (proposal, ground truth) pair:
//   v_ctr       = gt center - proposal center        (center-shift target)
//   v_ctr_star  = gt center - proposal center - t    (head center target,
//                 t = externally predicted center shift)
//   v_size_star = (gt size - proposal size) / proposal size, per (l, h, w)
// plus the heading as a bin index over uniform sectors of [-pi, pi) and the
// residual to that bin's center.
struct RegressionTarget
{
  Vec3 v_ctr;
  Vec3 v_ctr_star;
  std::array<double, 3> v_size_star{0, 0, 0};
  int angle_bin = 0;
  double angle_residual = 0.0;
};

// Raw per-proposal network outputs consumed by decoding and the losses.
struct PredictionVector
{
  std::vector<double> class_logits;
  Vec3 t_ctr;                             // center-shift stage output
  Vec3 t_ctr_star;                        // box-head center residual
  std::array<double, 3> t_size_star{0, 0, 0};
  std::vector<double> angle_logits;       // one per bin
  std::vector<double> angle_residuals;    // one per bin
};

// Proposal feature: opaque context rows (pass-through) next to canonized
// coordinates of the same sampled points.
struct ProposalFeature
{
  std::size_t channels = 0;
  std::vector<float> f1;                  // m x channels, row-major
  std::vector<Vec3> f2;                   // canonized coordinates
  std::vector<std::uint32_t> point_indices;
};

// Index-aligned external feature rows (header: rows, cols as little-endian
// u32; payload: rows x cols little-endian float32).
struct FeatureMatrix
{
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> values;

  std::span<const float> row(std::size_t i) const
  {
    return std::span<const float>(values.data() + i * cols, cols);
  }
};

FeatureMatrix parse_feature_file(std::string_view bytes);
std::string serialize_feature_file(const FeatureMatrix & features);

// Exactly m indices out of `interior`: without replacement when the interior
// is large enough, otherwise m independent draws with replacement.
// Throws EmptyProposalError on an empty interior.
std::vector<std::uint32_t> sample_proposal_points(
  std::span<const std::uint32_t> interior, std::size_t m, Rng & rng);

// Canonized coordinates: points minus their centroid, minus the predicted
// center shift.
std::vector<Vec3> canonize(std::span<const Vec3> points, const Vec3 & t_ctr);

ProposalFeature make_proposal_feature(
  const PointCloud & cloud, std::span<const std::uint32_t> interior,
  const FeatureMatrix * context, const Vec3 & t_ctr, std::size_t m, Rng & rng);

// Center of bin `bin` among n_bins uniform sectors of [-pi, pi).
// Throws RangeError when bin is outside [0, n_bins).
double angle_bin_center(int bin, int n_bins);

// Bin containing the normalized angle.
int angle_bin_of(double angle, int n_bins);

RegressionTarget encode_targets(
  const Box3D & proposal, const Vec3 & t_ctr_pred, const Box3D & ground_truth, int n_bins);

struct DecodedBox
{
  Box3D box;
  bool degenerate = false;  // a size component hit the 0.01 m clamp
};

// Inverse of the target encoding: center = proposal + t_ctr + t_ctr_star,
// size = proposal size * (1 + t_size_star), yaw from the argmax angle bin
// plus that bin's residual.
DecodedBox decode_box(const Box3D & proposal, const PredictionVector & pred);

}  // namespace pointdet

#endif  // POINTDET_ENCODING_HPP_
