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
#include <cmath>

#include "doctest.h"
#include "pointdet/errors.hpp"
#include "pointdet/eval.hpp"
#include "test_util.hpp"

using namespace pointdet;

namespace
{

Detection det(const Box3D & box, double score)
{
  Detection d;
  d.box = box;
  d.score = score;
  d.class_name = "Car";
  return d;
}

// Independent reference: explicit ranked matching and 11-point sampling,
// written without reusing any library matching code.
double reference_ap_11pt(
  std::vector<Detection> dets, const std::vector<Box3D> & gts, double threshold)
{
  if (gts.empty()) {
    return dets.empty() ? 1.0 : 0.0;  // same documented conventions
  }
  std::sort(dets.begin(), dets.end(), [](const Detection & a, const Detection & b) {
    return a.score > b.score;
  });
  std::vector<bool> taken(gts.size(), false);
  std::vector<double> precisions;
  std::vector<double> recalls;
  int tp = 0;
  int fp = 0;
  for (const Detection & d : dets) {
    double best = -1.0;
    std::size_t best_g = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double iou = iou_3d(d.box, gts[g]);
      if (iou > best) {
        best = iou;
        best_g = g;
      }
    }
    if (best >= threshold && !gts.empty() && !taken[best_g]) {
      taken[best_g] = true;
      ++tp;
    } else {
      ++fp;
    }
    precisions.push_back(static_cast<double>(tp) / (tp + fp));
    recalls.push_back(gts.empty() ? 0.0 : static_cast<double>(tp) / gts.size());
  }
  double total = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double r = k / 10.0;
    double best_p = 0.0;
    for (std::size_t i = 0; i < recalls.size(); ++i) {
      if (recalls[i] >= r - 1e-12) {
        best_p = std::max(best_p, precisions[i]);
      }
    }
    total += best_p;
  }
  return total / 11.0;
}

}  // namespace

TEST_CASE("compute_recall basics and monotonicity")
{
  Rng rng(157);
  const PointCloud cloud = testutil::random_cloud(rng, 300);
  std::vector<Box3D> gts;
  for (int i = 0; i < 4; ++i) {
    gts.push_back(testutil::random_rect(rng));
  }

  CHECK(compute_recall(gts, gts, cloud, MatchCriterion::kBox3dIou, 0.7) == doctest::Approx(1.0));
  CHECK(compute_recall({}, gts, cloud, MatchCriterion::kBox3dIou, 0.5) == doctest::Approx(0.0));
  CHECK(compute_recall({}, {}, cloud, MatchCriterion::kPointsIou, 0.5) == doctest::Approx(1.0));

  // Adding proposals can only help.
  std::vector<Box3D> some = {gts[0], gts[1]};
  std::vector<Box3D> more = some;
  more.push_back(gts[2]);
  const double before = compute_recall(some, gts, cloud, MatchCriterion::kPointsIou, 0.5);
  const double after = compute_recall(more, gts, cloud, MatchCriterion::kPointsIou, 0.5);
  CHECK(after >= before);
}

TEST_CASE("compute_ap trivial endpoints")
{
  std::vector<Box3D> gts = {
    Box3D(Vec3{0, 0, 0}, 2, 1, 1, 0.2),
    Box3D(Vec3{10, 0, 0}, 2, 1, 1, -0.4),
  };
  std::vector<Detection> perfect;
  for (const Box3D & g : gts) {
    perfect.push_back(det(g, 1.0));
  }
  CHECK(compute_ap(perfect, gts, 0.7, IouKind::k3d) == doctest::Approx(1.0));
  CHECK(compute_ap(perfect, gts, 0.7, IouKind::kBev) == doctest::Approx(1.0));

  std::vector<Detection> misses = {det(Box3D(Vec3{50, 0, 0}, 2, 1, 1, 0), 0.9)};
  CHECK(compute_ap(misses, gts, 0.7, IouKind::k3d) == doctest::Approx(0.0));
  CHECK(compute_ap({}, gts, 0.7, IouKind::k3d) == doctest::Approx(0.0));
  CHECK(compute_ap({}, {}, 0.7, IouKind::k3d) == doctest::Approx(1.0));
}

TEST_CASE("compute_ap matches the reference on a 5-detection 3-gt scene")
{
  const std::vector<Box3D> gts = {
    Box3D(Vec3{0, 0, 0}, 2, 1, 1, 0),
    Box3D(Vec3{10, 0, 0}, 2, 1, 1, 0),
    Box3D(Vec3{20, 0, 0}, 2, 1, 1, 0),
  };
  const std::vector<Detection> dets = {
    det(gts[0], 0.9),                                // TP
    det(Box3D(Vec3{50, 0, 0}, 2, 1, 1, 0), 0.8),     // FP
    det(gts[1], 0.7),                                // TP
    det(gts[1], 0.6),                                // duplicate -> FP
    det(gts[2], 0.5),                                // TP
  };
  const double ap = compute_ap(dets, gts, 0.7, IouKind::k3d);
  // Scripted expectation: precisions 1, 1/2, 2/3, 2/4, 3/5 at recalls
  // 1/3, 1/3, 2/3, 2/3, 1; 11-point interpolation gives (4 + 2 + 2.4) / 11.
  CHECK(ap == doctest::Approx(8.4 / 11.0).epsilon(1e-12));
  CHECK(ap == doctest::Approx(reference_ap_11pt(dets, gts, 0.7)).epsilon(1e-12));

  // AP is non-increasing in the IoU threshold.
  double previous = 1.0;
  for (const double threshold : {0.3, 0.5, 0.7, 0.9}) {
    const double value = compute_ap(dets, gts, threshold, IouKind::k3d);
    CHECK(value <= previous + 1e-12);
    previous = value;
  }

  // The 40-point variant stays within [0, 1] and close to the 11-point value.
  const double ap40 = compute_ap(dets, gts, 0.7, IouKind::k3d, true);
  CHECK(ap40 >= 0.0);
  CHECK(ap40 <= 1.0);
}

TEST_CASE("compute_ap against the reference on random scenes")
{
  Rng rng(163);
  for (int scene = 0; scene < 40; ++scene) {
    std::vector<Box3D> gts;
    const std::size_t n_gts = rng.uniform_below(5);
    for (std::size_t g = 0; g < n_gts; ++g) {
      gts.push_back(
        Box3D(Vec3{g * 8.0, 0, 0}, rng.uniform(1.5, 4.0), 1.6, 1.6, rng.uniform(-kPi, kPi)));
    }
    std::vector<Detection> dets;
    const std::size_t n_dets = rng.uniform_below(10);
    for (std::size_t d = 0; d < n_dets; ++d) {
      // Half the detections target a ground truth with jitter, half are noise.
      Box3D box = testutil::random_rect(rng);
      if (!gts.empty() && d % 2 == 0) {
        const Box3D & target = gts[rng.uniform_below(gts.size())];
        box = Box3D(
          target.center + Vec3{rng.uniform(-0.5, 0.5), 0.0, rng.uniform(-0.5, 0.5)}, target.l,
          target.h, target.w, target.yaw);
      }
      dets.push_back(det(box, rng.uniform01()));
    }
    const double fast = compute_ap(dets, gts, 0.5, IouKind::k3d);
    const double slow = reference_ap_11pt(dets, gts, 0.5);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("greedy matching never assigns a ground truth twice")
{
  const std::vector<Box3D> gts = {Box3D(Vec3{0, 0, 0}, 2, 1, 1, 0)};
  const std::vector<Detection> dets = {det(gts[0], 0.9), det(gts[0], 0.8), det(gts[0], 0.7)};
  // One TP and two FPs: precision at full recall is 1/1, then falls.
  const double ap = compute_ap(dets, gts, 0.7, IouKind::k3d);
  CHECK(ap == doctest::Approx(1.0));  // recall 1.0 reached at precision 1.0
}

TEST_CASE("ignored ground truths neither count nor penalize")
{
  EvalFrame frame;
  frame.gts = {
    Box3D(Vec3{0, 0, 0}, 2, 1, 1, 0),
    Box3D(Vec3{10, 0, 0}, 2, 1, 1, 0),
  };
  frame.gt_ignored = {0, 1};  // second is out of tier
  frame.detections = {det(frame.gts[0], 0.9), det(frame.gts[1], 0.8)};
  // The detection on the ignored gt is dropped, not a false positive.
  CHECK(compute_ap_pooled(std::span(&frame, 1), 0.7, IouKind::k3d) == doctest::Approx(1.0));

  // All ground truths ignored and every detection explained: AP 1.
  frame.gt_ignored = {1, 1};
  CHECK(compute_ap_pooled(std::span(&frame, 1), 0.7, IouKind::k3d) == doctest::Approx(1.0));

  // An unexplained detection with zero active ground truths scores 0.
  frame.detections.push_back(det(Box3D(Vec3{40, 0, 0}, 2, 1, 1, 0), 0.95));
  CHECK(compute_ap_pooled(std::span(&frame, 1), 0.7, IouKind::k3d) == doctest::Approx(0.0));
}

TEST_CASE("generate_scene honors its spec")
{
  SceneSpec spec;
  spec.min_objects = 0;
  spec.max_objects = 0;
  spec.background_points = 500;
  spec.seed = 5;
  const SyntheticScene empty = generate_scene(spec);
  CHECK(empty.gts.empty());
  CHECK(empty.cloud.size() == 500);
  for (const double s : empty.cloud.scores) {
    CHECK(s == 0.0);
  }

  SceneSpec full;
  full.min_objects = 10;
  full.max_objects = 10;
  full.seed = 6;
  const SyntheticScene scene = generate_scene(full);
  CHECK(scene.gts.size() == 10);

  // Non-overlap in BEV and the promised minimum interior points.
  for (std::size_t i = 0; i < scene.gts.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.gts.size(); ++j) {
      CHECK(bev_iou(scene.gts[i], scene.gts[j]) == doctest::Approx(0.0));
    }
    std::size_t inside = 0;
    for (const Vec3 & p : scene.cloud.xyz) {
      if (point_in_box(p, scene.gts[i])) {
        ++inside;
      }
    }
    CHECK(inside >= full.min_points_per_object);
  }

  // Scores are exactly the perfect-mask labels.
  std::size_t object_points = 0;
  for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
    if (scene.cloud.scores[i] == 1.0) {
      ++object_points;
    }
  }
  CHECK(object_points >= 10 * full.min_points_per_object);

  // Determinism: same seed, same bytes.
  const SyntheticScene again = generate_scene(full);
  REQUIRE(again.cloud.size() == scene.cloud.size());
  for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
    CHECK(again.cloud.xyz[i].x == scene.cloud.xyz[i].x);
    CHECK(again.cloud.reflectance[i] == scene.cloud.reflectance[i]);
  }

  // Impossible placement densities raise PlacementError.
  SceneSpec cramped;
  cramped.min_objects = 60;
  cramped.max_objects = 60;
  cramped.x_min = -4.0;
  cramped.x_max = 4.0;
  cramped.z_min = 10.0;
  cramped.z_max = 18.0;
  cramped.seed = 7;
  CHECK_THROWS_AS(generate_scene(cramped), PlacementError);
}
