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

#ifndef POINTDET_PROPOSAL_HPP_
#define POINTDET_PROPOSAL_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pointdet/geometry.hpp"
#include "pointdet/point_cloud.hpp"
#include "pointdet/point_grid.hpp"
#include "pointdet/rng.hpp"

namespace pointdet
{

// Per-class anchor prior: every (size, yaw, shift) combination seeds one
// proposal per foreground point, so k = |sizes| * |yaws| * |shift_ratios|.
struct AnchorConfig
{
  std::vector<std::array<double, 3>> sizes;  // (l, h, w)
  std::vector<double> yaws;
  std::vector<double> shift_ratios;  // applied along the anchor's l axis

  std::size_t proposals_per_point() const
  {
    return sizes.size() * yaws.size() * shift_ratios.size();
  }
};

struct Proposal
{
  Box3D box;
  std::uint32_t seed_index = 0;            // index into the selected cloud
  double score = 0.0;                      // sum of interior foreground scores
  std::vector<std::uint32_t> interior;     // ascending indices into the cloud
  bool aligned = false;
};

// The fixed-size network input: exactly N points with positivity flags.
struct SelectedPoints
{
  PointCloud cloud;
  std::vector<std::uint8_t> is_foreground;
  std::size_t foreground_count = 0;
};

// Picks exactly `n` points: a uniform subset of foreground (score >=
// fg_threshold) when enough exist, otherwise all foreground plus a uniform
// background pad flagged negative. Padding falls back to drawing with
// replacement when the pool runs dry, so the output size is always `n`.
// Throws EmptyCloudError on an empty input.
SelectedPoints select_positive_points(
  const PointCloud & scored_cloud, std::size_t n, double fg_threshold, Rng & rng);

// One box per (foreground point, size, yaw, ratio), centered at the point and
// shifted by ratio * l along the anchor's rotated l axis. Interior sets are
// not populated here.
std::vector<Proposal> seed_proposals(const SelectedPoints & points, const AnchorConfig & config);

void populate_interiors(std::vector<Proposal> & proposals, const PointGrid & grid);

// Single alignment step: center moves to the interior centroid, size stays at
// the anchor size the proposal was seeded with, yaw is preserved, and the
// interior is recomputed against the moved box. Throws EmptyProposalError
// when the proposal has no interior points.
Proposal align_proposal(const Proposal & proposal, const PointCloud & cloud, const PointGrid & grid);

// Repeats alignment until the interior set stabilizes, at most `max_rounds`
// times. Returns false when the interior empties out; callers drop those.
bool align_until_stable(
  Proposal & proposal, const PointCloud & cloud, const PointGrid & grid, int max_rounds = 3);

double score_proposal(const Proposal & proposal, std::span<const double> scores);

// Bulk pipeline path over freshly seeded proposals: per proposal, run the
// align-until-stable loop on grid accumulator passes (no interior lists are
// materialized), attach the summed score, and drop proposals whose interior
// empties. Interior lists of the survivors stay empty; callers that need
// them (a few hundred post-NMS boxes, not tens of thousands) fill them via
// PointGrid::interior.
std::vector<Proposal> align_and_score(
  std::vector<Proposal> proposals, const PointGrid & grid, std::span<const double> scores,
  int max_rounds = 3);

// Greedy NMS over rotated BEV IoU of arbitrary scored boxes. Keeps the
// highest score first (ties: lower tiebreak key, then lower position) and
// suppresses boxes with IoU strictly above `iou_threshold` to any kept box.
// Returns positions of kept boxes in keep order, capped at `max_keep`.
std::vector<std::size_t> nms_bev_indices(
  std::span<const Box3D> boxes, std::span<const double> scores,
  std::span<const std::uint64_t> tiebreak, double iou_threshold, std::size_t max_keep);

// Proposal NMS; ties broken by lower seed index. Output is score-descending.
std::vector<Proposal> nms_bev(
  std::vector<Proposal> proposals, double iou_threshold, std::size_t max_keep);

}  // namespace pointdet

#endif  // POINTDET_PROPOSAL_HPP_
