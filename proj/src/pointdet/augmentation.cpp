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

#include "pointdet/augmentation.hpp"

#include <cmath>

namespace pointdet
{

namespace
{

Vec3 rotate_y(const Vec3 & v, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x + s * v.z, v.y, -s * v.x + c * v.z};
}

constexpr int kPerBoxAttempts = 10;

}  // namespace

void perturb_objects(
  PointCloud & cloud, std::vector<Box3D> & gts, const AugmentationConfig & config, Rng & rng)
{
  // Claim interiors up front so a moved box cannot capture another's points.
  std::vector<std::vector<std::size_t>> interiors(gts.size());
  std::vector<bool> claimed(cloud.size(), false);
  for (std::size_t g = 0; g < gts.size(); ++g) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (!claimed[i] && point_in_box(cloud.xyz[i], gts[g])) {
        interiors[g].push_back(i);
        claimed[i] = true;
      }
    }
  }

  for (std::size_t g = 0; g < gts.size(); ++g) {
    for (int attempt = 0; attempt < kPerBoxAttempts; ++attempt) {
      const double angle = rng.uniform(config.per_box_rot_min, config.per_box_rot_max);
      const Vec3 shift{
        rng.normal(0.0, config.per_box_translation_std),
        rng.normal(0.0, config.per_box_translation_std),
        rng.normal(0.0, config.per_box_translation_std),
      };
      const Box3D moved(
        gts[g].center + shift, gts[g].l, gts[g].h, gts[g].w, gts[g].yaw + angle);

      bool collides = false;
      for (std::size_t other = 0; other < gts.size(); ++other) {
        if (other != g && bev_iou(moved, gts[other]) > 0.0) {
          collides = true;
          break;
        }
      }
      if (collides) {
        continue;  // redraw; after the attempt budget the box stays put
      }
      const Vec3 pivot = gts[g].center;
      for (const std::size_t i : interiors[g]) {
        cloud.xyz[i] = rotate_y(cloud.xyz[i] - pivot, angle) + pivot + shift;
      }
      gts[g] = moved;
      break;
    }
  }
}

void flip_x(PointCloud & cloud, std::vector<Box3D> & gts, Rng & rng, double prob)
{
  if (!rng.bernoulli(prob)) {
    return;
  }
  for (Vec3 & p : cloud.xyz) {
    p.x = -p.x;
  }
  for (Box3D & gt : gts) {
    gt = Box3D(Vec3{-gt.center.x, gt.center.y, gt.center.z}, gt.l, gt.h, gt.w, kPi - gt.yaw);
  }
}

void global_rotate(
  PointCloud & cloud, std::vector<Box3D> & gts, Rng & rng, double rot_min, double rot_max)
{
  const double angle = rng.uniform(rot_min, rot_max);
  for (Vec3 & p : cloud.xyz) {
    p = rotate_y(p, angle);
  }
  for (Box3D & gt : gts) {
    gt = Box3D(rotate_y(gt.center, angle), gt.l, gt.h, gt.w, gt.yaw + angle);
  }
}

void global_scale(
  PointCloud & cloud, std::vector<Box3D> & gts, Rng & rng, double scale_min, double scale_max)
{
  const double s = rng.uniform(scale_min, scale_max);
  for (Vec3 & p : cloud.xyz) {
    p = s * p;
  }
  for (Box3D & gt : gts) {
    gt = Box3D(s * gt.center, s * gt.l, s * gt.h, s * gt.w, gt.yaw);
  }
}

void augment_one(
  PointCloud & cloud, std::vector<Box3D> & gts, const AugmentationConfig & config, Rng & rng)
{
  switch (rng.uniform_below(4)) {
    case 0:
      perturb_objects(cloud, gts, config, rng);
      break;
    case 1:
      flip_x(cloud, gts, rng, config.flip_prob);
      break;
    case 2:
      global_rotate(cloud, gts, rng, config.global_rot_min, config.global_rot_max);
      break;
    default:
      global_scale(cloud, gts, rng, config.scale_min, config.scale_max);
      break;
  }
}

}  // namespace pointdet
