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

#ifndef POINTDET_ASSIGNMENT_HPP_
#define POINTDET_ASSIGNMENT_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "pointdet/point_cloud.hpp"
#include "pointdet/proposal.hpp"
#include "pointdet/rng.hpp"

namespace pointdet
{

enum class ProposalLabel : std::uint8_t
{
  kNegative = 0,
  kPositive = 1,
  kIgnored = 2,
};

struct TargetAssignment
{
  std::uint32_t proposal_index = 0;
  ProposalLabel label = ProposalLabel::kNegative;
  std::int32_t matched_gt = -1;  // valid for positives only
  double points_iou = 0.0;       // best value over all ground truths
};

// Labels every proposal by its best PointsIoU over the ground truths,
// computed on the cloud the pipeline selected (not the raw frame):
//   best > pos_threshold            -> positive, matched to the argmax
//                                      (ties: lower ground-truth index)
//   best < neg_threshold            -> negative
//   otherwise                       -> negative when the thresholds are equal
//                                      (a value exactly at the shared
//                                      threshold is not "higher"), ignored
//                                      when a gap exists.
// Zero ground truths labels everything negative.
std::vector<TargetAssignment> assign_targets(
  std::span<const Proposal> proposals, std::span<const Box3D> ground_truths,
  const PointCloud & cloud, double pos_threshold, double neg_threshold);

// Stratified minibatch: round(total * pos_fraction) positives, the rest
// negatives, each drawn uniformly without replacement; a shortfall on either
// side is filled from the other. Ignored proposals never enter the pool.
// Returns ascending proposal indices; throws InsufficientProposalsError when
// positives + negatives < total.
std::vector<std::uint32_t> sample_minibatch(
  std::span<const TargetAssignment> assignments, std::size_t total, double pos_fraction, Rng & rng);

}  // namespace pointdet

#endif  // POINTDET_ASSIGNMENT_HPP_
