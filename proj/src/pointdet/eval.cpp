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

#include "pointdet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pointdet/errors.hpp"
#include "pointdet/point_grid.hpp"
#include "pointdet/rng.hpp"

namespace pointdet
{

namespace
{

double sorted_points_iou(
  const std::vector<std::uint32_t> & a, const std::vector<std::uint32_t> & b)
{
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

double compute_recall(
  std::span<const Box3D> proposal_boxes, std::span<const Box3D> ground_truths,
  const PointCloud & cloud, MatchCriterion criterion, double threshold)
{
  if (ground_truths.empty()) {
    return 1.0;
  }
  std::vector<std::vector<std::uint32_t>> interiors;
  std::vector<std::vector<std::uint32_t>> gt_interiors;
  PointGrid grid;
  if (criterion == MatchCriterion::kPointsIou) {
    grid = PointGrid(cloud.xyz);
    interiors.reserve(proposal_boxes.size());
    for (const Box3D & box : proposal_boxes) {
      interiors.push_back(grid.interior(box));
    }
    gt_interiors.reserve(ground_truths.size());
    for (const Box3D & gt : ground_truths) {
      gt_interiors.push_back(grid.interior(gt));
    }
  }

  std::size_t matched = 0;
  for (std::size_t g = 0; g < ground_truths.size(); ++g) {
    for (std::size_t p = 0; p < proposal_boxes.size(); ++p) {
      const double value = criterion == MatchCriterion::kBox3dIou
                             ? iou_3d(proposal_boxes[p], ground_truths[g])
                             : sorted_points_iou(interiors[p], gt_interiors[g]);
      if (value >= threshold) {
        ++matched;
        break;
      }
    }
  }
  return static_cast<double>(matched) / static_cast<double>(ground_truths.size());
}

namespace
{

struct RankedDetection
{
  double score;
  std::uint32_t frame;
  std::uint32_t index;
};

double interpolated_ap(
  const std::vector<double> & recalls, const std::vector<double> & precisions, bool forty_point)
{
  double total = 0.0;
  int samples = 0;
  const int n = forty_point ? 40 : 11;
  for (int k = 0; k < n; ++k) {
    // 11-point protocol samples {0.0, 0.1, ..., 1.0}; the 40-point variant
    // samples {1/40, ..., 40/40}.
    const double r = forty_point ? static_cast<double>(k + 1) / 40.0
                                 : static_cast<double>(k) / 10.0;
    double best = 0.0;
    for (std::size_t i = 0; i < recalls.size(); ++i) {
      if (recalls[i] >= r - 1e-12) {
        best = std::max(best, precisions[i]);
      }
    }
    total += best;
    ++samples;
  }
  return total / samples;
}

}  // namespace

double compute_ap_pooled(
  std::span<const EvalFrame> frames, double iou_threshold, IouKind kind, bool forty_point)
{
  std::size_t total_gt = 0;
  for (const EvalFrame & f : frames) {
    for (std::size_t g = 0; g < f.gts.size(); ++g) {
      if (f.gt_ignored.empty() || !f.gt_ignored[g]) {
        ++total_gt;
      }
    }
  }

  std::vector<RankedDetection> ranked;
  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    for (std::size_t di = 0; di < frames[fi].detections.size(); ++di) {
      ranked.push_back(
        {frames[fi].detections[di].score, static_cast<std::uint32_t>(fi),
         static_cast<std::uint32_t>(di)});
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedDetection & a, const RankedDetection & b) {
    if (a.score != b.score) {
      return a.score > b.score;
    }
    if (a.frame != b.frame) {
      return a.frame < b.frame;
    }
    return a.index < b.index;
  });

  std::vector<std::vector<std::uint8_t>> taken(frames.size());
  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    taken[fi].assign(frames[fi].gts.size(), 0);
  }

  const auto overlap = [&](const Box3D & a, const Box3D & b) {
    return kind == IouKind::k3d ? iou_3d(a, b) : bev_iou(a, b);
  };

  std::vector<double> recalls;
  std::vector<double> precisions;
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (const RankedDetection & rd : ranked) {
    const EvalFrame & frame = frames[rd.frame];
    const Box3D & det_box = frame.detections[rd.index].box;

    // Best active ground truth by IoU (ties: lower index), taken or not.
    double best_active = 0.0;
    std::int64_t best_gt = -1;
    double best_ignored = 0.0;
    for (std::size_t g = 0; g < frame.gts.size(); ++g) {
      const bool ignored = !frame.gt_ignored.empty() && frame.gt_ignored[g];
      const double iou = overlap(det_box, frame.gts[g]);
      if (ignored) {
        best_ignored = std::max(best_ignored, iou);
      } else if (iou > best_active) {
        best_active = iou;
        best_gt = static_cast<std::int64_t>(g);
      }
    }

    if (best_gt >= 0 && best_active >= iou_threshold) {
      if (!taken[rd.frame][best_gt]) {
        taken[rd.frame][best_gt] = 1;
        ++tp;
      } else {
        ++fp;  // the matched ground truth was already taken
      }
    } else if (best_ignored >= iou_threshold) {
      continue;  // matches only ignored ground truth: drop from the curve
    } else {
      ++fp;
    }
    recalls.push_back(
      total_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(total_gt));
    precisions.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
  }

  if (total_gt == 0) {
    // No definable recall axis: perfect when nothing was claimed either.
    return recalls.empty() ? 1.0 : 0.0;
  }
  if (recalls.empty()) {
    return 0.0;
  }
  return interpolated_ap(recalls, precisions, forty_point);
}

double compute_ap(
  std::vector<Detection> detections, std::span<const Box3D> ground_truths, double iou_threshold,
  IouKind kind, bool forty_point)
{
  EvalFrame frame;
  frame.detections = std::move(detections);
  frame.gts.assign(ground_truths.begin(), ground_truths.end());
  return compute_ap_pooled(std::span(&frame, 1), iou_threshold, kind, forty_point);
}

SyntheticScene generate_scene(const SceneSpec & spec)
{
  Rng rng(spec.seed);
  SyntheticScene scene;
  scene.cloud.frame = Frame::kCamera;

  const std::size_t n_objects =
    spec.min_objects +
    static_cast<std::size_t>(rng.uniform_below(spec.max_objects - spec.min_objects + 1));

  for (std::size_t obj = 0; obj < n_objects; ++obj) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const Vec3 center{
        rng.uniform(spec.x_min, spec.x_max),
        rng.uniform(spec.y_min, spec.y_max),
        rng.uniform(spec.z_min, spec.z_max),
      };
      const double yaw = rng.uniform(-kPi, kPi);
      const double l = spec.anchor[0] * (1.0 + rng.uniform(-spec.size_jitter, spec.size_jitter));
      const double h = spec.anchor[1] * (1.0 + rng.uniform(-spec.size_jitter, spec.size_jitter));
      const double w = spec.anchor[2] * (1.0 + rng.uniform(-spec.size_jitter, spec.size_jitter));
      const Box3D box(center, l, h, w, yaw);
      bool overlaps = false;
      for (const Box3D & existing : scene.gts) {
        if (bev_iou(box, existing) > 0.0) {
          overlaps = true;
          break;
        }
      }
      if (!overlaps) {
        scene.gts.push_back(box);
        placed = true;
      }
    }
    if (!placed) {
      throw PlacementError(
        "could not place object " + std::to_string(obj) + " without BEV overlap");
    }
  }

  for (const Box3D & gt : scene.gts) {
    const std::size_t n_points =
      spec.min_points_per_object + static_cast<std::size_t>(rng.uniform_below(
                                     spec.max_points_per_object - spec.min_points_per_object + 1));
    const double c = std::cos(gt.yaw);
    const double s = std::sin(gt.yaw);
    const double half[3] = {0.5 * gt.l, 0.5 * gt.h, 0.5 * gt.w};
    for (std::size_t i = 0; i < n_points; ++i) {
      double local[3];
      for (int k = 0; k < 3; ++k) {
        local[k] = rng.uniform(-half[k], half[k]);
        // Surface-ish jitter, clamped so generated points stay interior.
        local[k] = std::clamp(local[k] + rng.normal(0.0, spec.noise_std), -half[k], half[k]);
      }
      scene.cloud.xyz.push_back(Vec3{
        gt.center.x + c * local[0] + s * local[2],
        gt.center.y + local[1],
        gt.center.z - s * local[0] + c * local[2],
      });
      scene.cloud.reflectance.push_back(rng.uniform01());
      scene.cloud.scores.push_back(1.0);
    }
  }

  for (std::size_t i = 0; i < spec.background_points; ++i) {
    scene.cloud.xyz.push_back(Vec3{
      rng.uniform(spec.x_min, spec.x_max),
      rng.uniform(spec.y_min, spec.y_max),
      rng.uniform(spec.z_min, spec.z_max),
    });
    scene.cloud.reflectance.push_back(rng.uniform01());
    scene.cloud.scores.push_back(0.0);
  }
  return scene;
}

}  // namespace pointdet
