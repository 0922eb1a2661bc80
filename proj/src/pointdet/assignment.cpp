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

#include "pointdet/assignment.hpp"

#include <algorithm>
#include <cmath>

#include "pointdet/errors.hpp"
#include "pointdet/point_grid.hpp"

namespace pointdet
{

namespace
{

std::size_t sorted_intersection_size(
  const std::vector<std::uint32_t> & a, const std::vector<std::uint32_t> & b)
{
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

}  // namespace

std::vector<TargetAssignment> assign_targets(
  std::span<const Proposal> proposals, std::span<const Box3D> ground_truths,
  const PointCloud & cloud, double pos_threshold, double neg_threshold)
{
  if (!(neg_threshold >= 0.0) || !(pos_threshold <= 1.0) || neg_threshold > pos_threshold) {
    throw ValueError("PointsIoU thresholds must satisfy 0 <= neg <= pos <= 1");
  }
  const PointGrid grid(cloud.xyz);
  std::vector<std::vector<std::uint32_t>> gt_interiors;
  gt_interiors.reserve(ground_truths.size());
  for (const Box3D & gt : ground_truths) {
    gt_interiors.push_back(grid.interior(gt));
  }

  std::vector<TargetAssignment> out;
  out.reserve(proposals.size());
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    // Interior sets double as PointsIoU membership; recompute when absent.
    const std::vector<std::uint32_t> & own =
      proposals[i].interior.empty() ? grid.interior(proposals[i].box) : proposals[i].interior;

    TargetAssignment a;
    a.proposal_index = static_cast<std::uint32_t>(i);
    double best = 0.0;
    std::int32_t best_gt = -1;
    for (std::size_t g = 0; g < ground_truths.size(); ++g) {
      const std::size_t inter = sorted_intersection_size(own, gt_interiors[g]);
      const std::size_t uni = own.size() + gt_interiors[g].size() - inter;
      const double iou =
        uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
      if (iou > best) {  // ties resolve to the lower ground-truth index
        best = iou;
        best_gt = static_cast<std::int32_t>(g);
      }
    }
    a.points_iou = best;
    if (best > pos_threshold) {
      a.label = ProposalLabel::kPositive;
      a.matched_gt = best_gt;
    } else if (best < neg_threshold || pos_threshold == neg_threshold) {
      a.label = ProposalLabel::kNegative;
    } else {
      a.label = ProposalLabel::kIgnored;
    }
    out.push_back(a);
  }
  return out;
}

std::vector<std::uint32_t> sample_minibatch(
  std::span<const TargetAssignment> assignments, std::size_t total, double pos_fraction, Rng & rng)
{
  if (total == 0 || !(pos_fraction > 0.0) || !(pos_fraction < 1.0)) {
    throw ValueError("minibatch needs total > 0 and pos_fraction in (0, 1)");
  }
  std::vector<std::uint32_t> positives;
  std::vector<std::uint32_t> negatives;
  for (const TargetAssignment & a : assignments) {
    if (a.label == ProposalLabel::kPositive) {
      positives.push_back(a.proposal_index);
    } else if (a.label == ProposalLabel::kNegative) {
      negatives.push_back(a.proposal_index);
    }
  }
  if (positives.size() + negatives.size() < total) {
    throw InsufficientProposalsError(
      "need " + std::to_string(total) + " proposals, have " +
      std::to_string(positives.size() + negatives.size()));
  }
  std::size_t want_pos = static_cast<std::size_t>(
    std::llround(static_cast<double>(total) * pos_fraction));
  std::size_t take_pos = std::min(want_pos, positives.size());
  std::size_t take_neg = std::min(total - take_pos, negatives.size());
  take_pos = total - take_neg;  // backfill from positives when negatives run short

  std::vector<std::uint32_t> out;
  out.reserve(total);
  for (const std::size_t k : rng.sample_without_replacement(positives.size(), take_pos)) {
    out.push_back(positives[k]);
  }
  for (const std::size_t k : rng.sample_without_replacement(negatives.size(), take_neg)) {
    out.push_back(negatives[k]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace pointdet
