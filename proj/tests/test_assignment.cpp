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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>

#include "doctest.h"
#include "pointdet/assignment.hpp"
#include "pointdet/errors.hpp"
#include "pointdet/oracles.hpp"
#include "test_util.hpp"

using namespace pointdet;

namespace
{

Proposal make_proposal(const Box3D & box)
{
  Proposal p;
  p.box = box;
  return p;
}

// Straight double-loop reimplementation of the labeling rule.
std::vector<TargetAssignment> brute_force_assign(
  std::span<const Proposal> proposals, std::span<const Box3D> gts, const PointCloud & cloud,
  double pos, double neg)
{
  std::vector<TargetAssignment> out;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    TargetAssignment a;
    a.proposal_index = static_cast<std::uint32_t>(i);
    double best = 0.0;
    std::int32_t best_gt = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double iou = oracle::points_iou(cloud.xyz, proposals[i].box, gts[g]);
      if (iou > best) {
        best = iou;
        best_gt = static_cast<std::int32_t>(g);
      }
    }
    a.points_iou = best;
    if (best > pos) {
      a.label = ProposalLabel::kPositive;
      a.matched_gt = best_gt;
    } else if (best < neg || pos == neg) {
      a.label = ProposalLabel::kNegative;
    } else {
      a.label = ProposalLabel::kIgnored;
    }
    out.push_back(a);
  }
  return out;
}

}  // namespace

TEST_CASE("assign_targets labels by best PointsIoU against the thresholds")
{
  // 20 points inside the ground truth; the proposal covers 11 of them plus
  // one of its own, tuned so the quotients land where we want them.
  PointCloud cloud;
  cloud.frame = Frame::kCamera;
  for (int i = 0; i < 20; ++i) {
    cloud.xyz.push_back(Vec3{-0.9 + 0.09 * i, 0.0, 0.0});
  }
  cloud.reflectance.assign(cloud.size(), 0.0);
  const Box3D gt(Vec3{0, 0, 0}, 2.0, 1.0, 1.0, 0.0);

  // Proposal covering points with x >= -0.9 + 0.09*8 = -0.18 (12 of 20):
  // PointsIoU = 12/20 = 0.6 > 0.55 -> positive.
  const Proposal covering = make_proposal(Box3D(Vec3{0.4, 0, 0}, 1.2, 1.0, 1.0, 0.0));
  // Far proposal with zero interior points -> negative.
  const Proposal hollow = make_proposal(Box3D(Vec3{30, 0, 0}, 2.0, 1.0, 1.0, 0.0));

  const std::vector<Proposal> proposals = {covering, hollow};
  const std::vector<Box3D> gts = {gt};
  const auto result = assign_targets(proposals, gts, cloud, 0.55, 0.55);
  REQUIRE(result.size() == 2);
  CHECK(result[0].label == ProposalLabel::kPositive);
  CHECK(result[0].matched_gt == 0);
  CHECK(result[0].points_iou == doctest::Approx(0.6));
  CHECK(result[1].label == ProposalLabel::kNegative);
  CHECK(result[1].points_iou == doctest::Approx(0.0));
}

TEST_CASE("a PointsIoU exactly at the shared threshold stays negative")
{
  // 11 shared points, 9 in the ground truth only: 11/20 = 0.55 exactly.
  PointCloud cloud;
  cloud.frame = Frame::kCamera;
  for (int i = 0; i < 11; ++i) {
    cloud.xyz.push_back(Vec3{0.05 * i, 0.0, 0.0});  // inside both
  }
  for (int i = 0; i < 9; ++i) {
    cloud.xyz.push_back(Vec3{3.0 + 0.05 * i, 0.0, 0.0});  // gt only
  }
  cloud.reflectance.assign(cloud.size(), 0.0);
  const Box3D gt(Vec3{1.75, 0, 0}, 7.0, 1.0, 1.0, 0.0);
  const Box3D prop(Vec3{0.25, 0, 0}, 1.0, 1.0, 1.0, 0.0);
  REQUIRE(points_iou(cloud.xyz, prop, gt) == doctest::Approx(0.55));

  const std::vector<Proposal> proposals = {make_proposal(prop)};
  const std::vector<Box3D> gts = {gt};
  const auto equal_band = assign_targets(proposals, gts, cloud, 0.55, 0.55);
  CHECK(equal_band[0].label == ProposalLabel::kNegative);

  // With a gap the same value falls into the ignored band.
  const auto gap = assign_targets(proposals, gts, cloud, 0.6, 0.5);
  CHECK(gap[0].label == ProposalLabel::kIgnored);
}

TEST_CASE("interior-point criterion recovers boxes the box-IoU criterion drops")
{
  // A ground-truth car whose visible points cluster at one end, and an
  // anchor-sized proposal aligned on that cluster: nearly all points are
  // shared while the boxes overlap poorly.
  Rng rng(79);
  PointCloud cloud;
  cloud.frame = Frame::kCamera;
  const Box3D gt(Vec3{0, 0, 0}, 3.9, 1.6, 1.6, 0.0);
  for (int i = 0; i < 300; ++i) {
    cloud.xyz.push_back(Vec3{
      rng.uniform(0.65, 1.95), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)});
  }
  cloud.reflectance.assign(cloud.size(), 0.0);
  const Box3D proposal_box(Vec3{1.3, 0, 0}, 3.9, 1.6, 1.6, 0.0);

  const double piou = points_iou(cloud.xyz, proposal_box, gt);
  const double box_iou = iou_3d(proposal_box, gt);
  CHECK(piou > 0.55);
  CHECK(box_iou < 0.55);

  const std::vector<Proposal> proposals = {make_proposal(proposal_box)};
  const std::vector<Box3D> gts = {gt};
  const auto by_points = assign_targets(proposals, gts, cloud, 0.55, 0.55);
  CHECK(by_points[0].label == ProposalLabel::kPositive);
}

TEST_CASE("assign_targets agrees with the brute-force oracle on random scenes")
{
  Rng rng(83);
  for (int scene = 0; scene < 25; ++scene) {
    const PointCloud cloud = testutil::random_cloud(rng, 100 + rng.uniform_below(400));
    std::vector<Proposal> proposals;
    const std::size_t n_props = 5 + rng.uniform_below(45);
    for (std::size_t i = 0; i < n_props; ++i) {
      proposals.push_back(make_proposal(testutil::random_rect(rng)));
    }
    std::vector<Box3D> gts;
    const std::size_t n_gts = rng.uniform_below(6);
    for (std::size_t g = 0; g < n_gts; ++g) {
      gts.push_back(testutil::random_rect(rng));
    }
    const double pos = 0.55;
    const double neg = scene % 2 == 0 ? 0.55 : 0.4;  // exercise both band shapes

    const auto fast = assign_targets(proposals, gts, cloud, pos, neg);
    const auto slow = brute_force_assign(proposals, gts, cloud, pos, neg);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].label == slow[i].label);
      CHECK(fast[i].points_iou == slow[i].points_iou);
      if (fast[i].label == ProposalLabel::kPositive) {
        CHECK(fast[i].matched_gt == slow[i].matched_gt);
        // The matched ground truth achieves the maximum.
        for (const Box3D & g : gts) {
          CHECK(fast[i].points_iou >= oracle::points_iou(cloud.xyz, proposals[i].box, g));
        }
      }
    }
  }
}

TEST_CASE("assign_targets with zero ground truths labels everything negative")
{
  Rng rng(89);
  const PointCloud cloud = testutil::random_cloud(rng, 50);
  const std::vector<Proposal> proposals = {make_proposal(testutil::random_rect(rng))};
  const auto result = assign_targets(proposals, {}, cloud, 0.55, 0.55);
  CHECK(result[0].label == ProposalLabel::kNegative);
  CHECK(result[0].matched_gt == -1);
}

namespace
{

std::vector<TargetAssignment> synthetic_assignments(std::size_t n_pos, std::size_t n_neg)
{
  std::vector<TargetAssignment> out;
  for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
    TargetAssignment a;
    a.proposal_index = static_cast<std::uint32_t>(i);
    a.label = i < n_pos ? ProposalLabel::kPositive : ProposalLabel::kNegative;
    out.push_back(a);
  }
  return out;
}

}  // namespace

TEST_CASE("sample_minibatch composition: 64 at 1:3")
{
  Rng rng(97);
  const auto plenty = synthetic_assignments(100, 400);
  const auto picks = sample_minibatch(plenty, 64, 0.25, rng);
  REQUIRE(picks.size() == 64);
  std::size_t pos = 0;
  std::set<std::uint32_t> unique;
  for (const std::uint32_t idx : picks) {
    unique.insert(idx);
    if (idx < 100) {
      ++pos;
    }
  }
  CHECK(unique.size() == 64);  // without replacement
  CHECK(pos == 16);

  // Short on positives: fill with extra negatives.
  const auto few_pos = synthetic_assignments(5, 200);
  const auto fill = sample_minibatch(few_pos, 64, 0.25, rng);
  std::size_t pos2 = 0;
  for (const std::uint32_t idx : fill) {
    if (idx < 5) {
      ++pos2;
    }
  }
  CHECK(fill.size() == 64);
  CHECK(pos2 == 5);

  // Degenerate: no positives at all.
  const auto none = synthetic_assignments(0, 100);
  CHECK(sample_minibatch(none, 64, 0.25, rng).size() == 64);

  // Not enough proposals in total.
  const auto scarce = synthetic_assignments(3, 10);
  CHECK_THROWS_AS(sample_minibatch(scarce, 64, 0.25, rng), InsufficientProposalsError);
}

TEST_CASE("sample_minibatch ignores the ignored band and is deterministic")
{
  auto assignments = synthetic_assignments(30, 60);
  for (std::size_t i = 0; i < 10; ++i) {
    TargetAssignment a;
    a.proposal_index = static_cast<std::uint32_t>(90 + i);
    a.label = ProposalLabel::kIgnored;
    assignments.push_back(a);
  }
  Rng a(555), b(555);
  const auto first = sample_minibatch(assignments, 64, 0.25, a);
  const auto second = sample_minibatch(assignments, 64, 0.25, b);
  CHECK(first == second);
  for (const std::uint32_t idx : first) {
    CHECK(idx < 90);  // never an ignored proposal
  }
}
