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

#ifndef POINTDET_EVAL_HPP_
#define POINTDET_EVAL_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pointdet/geometry.hpp"
#include "pointdet/point_cloud.hpp"

namespace pointdet
{

enum class MatchCriterion
{
  kBox3dIou,
  kPointsIou,
};

// Fraction of ground truths covered by at least one proposal under the
// criterion at `threshold` (inclusive). Each ground truth matches
// independently; zero ground truths count as recall 1.
double compute_recall(
  std::span<const Box3D> proposal_boxes, std::span<const Box3D> ground_truths,
  const PointCloud & cloud, MatchCriterion criterion, double threshold);

struct Detection
{
  Box3D box;
  double score = 0.0;  // confidence in [0, 1]
  std::string class_name;
};

enum class IouKind
{
  k3d,
  kBev,
};

// One frame's detections and ground truths; matching never crosses frames.
struct EvalFrame
{
  std::vector<Detection> detections;
  std::vector<Box3D> gts;
  std::vector<std::uint8_t> gt_ignored;  // empty means none ignored
};

// Interpolated average precision over the pooled frames. Detections are
// ranked globally by score; each is greedily matched to its best-IoU ground
// truth (ties: lower index) within its own frame. A detection whose best
// match is an ignored ground truth is dropped from the curve; one matching an
// already-taken ground truth is a false positive. With no active ground
// truths and no counted detections the AP is 1 by convention.
double compute_ap_pooled(
  std::span<const EvalFrame> frames, double iou_threshold, IouKind kind,
  bool forty_point = false);

// Single-scene convenience wrapper around compute_ap_pooled.
double compute_ap(
  std::vector<Detection> detections, std::span<const Box3D> ground_truths, double iou_threshold,
  IouKind kind, bool forty_point = false);

// Desk-scale synthetic scene: jittered-anchor boxes at non-overlapping BEV
// placements, uniformly filled with interior points (score 1.0) plus uniform
// background (score 0.0).
struct SceneSpec
{
  std::size_t min_objects = 8;
  std::size_t max_objects = 12;
  std::array<double, 3> anchor = {3.9, 1.6, 1.6};  // (l, h, w)
  double size_jitter = 0.05;  // relative, per component
  double x_min = -10.0, x_max = 10.0;
  double y_min = 0.8, y_max = 1.2;
  double z_min = 15.0, z_max = 45.0;
  std::size_t min_points_per_object = 150;
  std::size_t max_points_per_object = 300;
  std::size_t background_points = 8000;
  double noise_std = 0.02;  // meters, clamped back into the box
  std::uint64_t seed = 1;
};

struct SyntheticScene
{
  PointCloud cloud;  // camera frame, scores attached
  std::vector<Box3D> gts;
};

// Throws PlacementError when a non-overlapping placement cannot be found in
// 1000 attempts.
SyntheticScene generate_scene(const SceneSpec & spec);

}  // namespace pointdet

#endif  // POINTDET_EVAL_HPP_
