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

#ifndef POINTDET_POINT_GRID_HPP_
#define POINTDET_POINT_GRID_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "pointdet/geometry.hpp"

namespace pointdet
{

// Interior accumulator for one box: enough to align and score a proposal
// without materializing its index list.
struct BoxStats
{
  std::size_t count = 0;
  Vec3 sum;
  double score_sum = 0.0;
};

// Uniform BEV (x-z) bucket grid over a fixed point set. Point coordinates
// are copied into bucket-major arrays so queries stream contiguous memory.
class PointGrid
{
public:
  PointGrid() = default;
  explicit PointGrid(std::span<const Vec3> xyz, double cell_size = 2.0);

  // Exact interior set of `box`, ascending indices.
  std::vector<std::uint32_t> interior(const Box3D & box) const;

  // Count, coordinate sum and score sum over the interior of `box`, without
  // allocating. `scores` may be empty. Sums accumulate in bucket-scan order.
  BoxStats stats(const Box3D & box, std::span<const double> scores) const;

private:
  template <typename Visit>
  void visit_window(const Box3D & box, const Visit & visit) const;

  std::span<const Vec3> xyz_;
  double cell_size_ = 2.0;
  double x0_ = 0.0;
  double z0_ = 0.0;
  int nx_ = 0;
  int nz_ = 0;
  std::vector<std::uint32_t> bucket_start_;
  std::vector<std::uint32_t> bucket_points_;
  // Coordinates in bucket_points_ order.
  std::vector<double> px_, py_, pz_;
};

}  // namespace pointdet

#endif  // POINTDET_POINT_GRID_HPP_
