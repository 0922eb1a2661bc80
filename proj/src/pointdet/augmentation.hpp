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

#ifndef POINTDET_AUGMENTATION_HPP_
#define POINTDET_AUGMENTATION_HPP_

#include <vector>

#include "pointdet/geometry.hpp"
#include "pointdet/point_cloud.hpp"
#include "pointdet/rng.hpp"

namespace pointdet
{

struct AugmentationConfig
{
  double per_box_rot_min = -kPi / 3.0;
  double per_box_rot_max = kPi / 3.0;
  double per_box_translation_std = 0.25;  // meters, per axis
  double flip_prob = 0.5;
  double global_rot_min = -kPi / 4.0;
  double global_rot_max = kPi / 4.0;
  double scale_min = 0.9;
  double scale_max = 1.1;
};

// Per-object jitter: each box and its interior points rotate about the box
// center's vertical axis and translate together. A draw whose moved box
// overlaps (BEV IoU > 0) another box is redrawn a few times, then dropped.
// Overlapping interiors are claimed first-box-wins.
void perturb_objects(
  PointCloud & cloud, std::vector<Box3D> & gts, const AugmentationConfig & config, Rng & rng);

// Mirror across the x = 0 plane with the given probability: x -> -x and
// yaw -> pi - yaw.
void flip_x(PointCloud & cloud, std::vector<Box3D> & gts, Rng & rng, double prob);

// Whole-scene rotation about the origin's vertical axis by a uniform draw.
void global_rotate(
  PointCloud & cloud, std::vector<Box3D> & gts, Rng & rng, double rot_min, double rot_max);

// Uniform scaling of coordinates, centers and sizes; yaw is untouched.
void global_scale(
  PointCloud & cloud, std::vector<Box3D> & gts, Rng & rng, double scale_min, double scale_max);

// Applies exactly one of the four augmentations, chosen uniformly.
void augment_one(
  PointCloud & cloud, std::vector<Box3D> & gts, const AugmentationConfig & config, Rng & rng);

}  // namespace pointdet

#endif  // POINTDET_AUGMENTATION_HPP_
