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

#ifndef POINTDET_POINT_CLOUD_HPP_
#define POINTDET_POINT_CLOUD_HPP_

#include <cstddef>
#include <vector>

#include "pointdet/geometry.hpp"

namespace pointdet
{

enum class Frame
{
  kVelodyne,
  kCamera,
};

// Flat cloud of (x, y, z, reflectance) points with an optional per-point
// foreground score in [0, 1]; `scores` is either empty or one entry per point.
struct PointCloud
{
  std::vector<Vec3> xyz;
  std::vector<double> reflectance;
  std::vector<double> scores;
  Frame frame = Frame::kVelodyne;

  std::size_t size() const { return xyz.size(); }
  bool empty() const { return xyz.empty(); }
  bool has_scores() const { return !scores.empty(); }
};

}  // namespace pointdet

#endif  // POINTDET_POINT_CLOUD_HPP_
