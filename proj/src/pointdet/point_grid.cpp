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

#include "pointdet/point_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pointdet
{

PointGrid::PointGrid(std::span<const Vec3> xyz, double cell_size)
: xyz_(xyz), cell_size_(cell_size)
{
  if (xyz.empty()) {
    return;
  }
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double zmin = xmin;
  double zmax = -xmin;
  for (const Vec3 & p : xyz) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    zmin = std::min(zmin, p.z);
    zmax = std::max(zmax, p.z);
  }
  x0_ = xmin;
  z0_ = zmin;
  nx_ = static_cast<int>(std::floor((xmax - x0_) / cell_size_)) + 1;
  nz_ = static_cast<int>(std::floor((zmax - z0_) / cell_size_)) + 1;

  const std::size_t buckets = static_cast<std::size_t>(nx_) * nz_;
  std::vector<std::uint32_t> counts(buckets, 0);
  auto cell_of = [&](const Vec3 & p) {
    const int cx = static_cast<int>(std::floor((p.x - x0_) / cell_size_));
    const int cz = static_cast<int>(std::floor((p.z - z0_) / cell_size_));
    return static_cast<std::size_t>(cz) * nx_ + cx;
  };
  for (const Vec3 & p : xyz) {
    ++counts[cell_of(p)];
  }
  bucket_start_.assign(buckets + 1, 0);
  for (std::size_t i = 0; i < buckets; ++i) {
    bucket_start_[i + 1] = bucket_start_[i] + counts[i];
  }
  bucket_points_.resize(xyz.size());
  px_.resize(xyz.size());
  py_.resize(xyz.size());
  pz_.resize(xyz.size());
  std::vector<std::uint32_t> cursor(bucket_start_.begin(), bucket_start_.end() - 1);
  for (std::size_t i = 0; i < xyz.size(); ++i) {
    const std::uint32_t slot = cursor[cell_of(xyz[i])]++;
    bucket_points_[slot] = static_cast<std::uint32_t>(i);
    px_[slot] = xyz[i].x;
    py_[slot] = xyz[i].y;
    pz_[slot] = xyz[i].z;
  }
}

// Calls visit(slot, lx_ok && ly_ok && lz_ok precomputed lambda args) for every
// stored point whose cell intersects the box's BEV bounding rectangle.
template <typename Visit>
void PointGrid::visit_window(const Box3D & box, const Visit & visit) const
{
  // Exact BEV bounding rectangle of the rotated footprint, plus the slack.
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.l;
  const double hh = 0.5 * box.h;
  const double hw = 0.5 * box.w;
  const double ex = std::abs(c) * hl + std::abs(s) * hw + kBoundaryEps;
  const double ez = std::abs(s) * hl + std::abs(c) * hw + kBoundaryEps;
  const int cx_lo =
    std::max(0, static_cast<int>(std::floor((box.center.x - ex - x0_) / cell_size_)));
  const int cx_hi =
    std::min(nx_ - 1, static_cast<int>(std::floor((box.center.x + ex - x0_) / cell_size_)));
  const int cz_lo =
    std::max(0, static_cast<int>(std::floor((box.center.z - ez - z0_) / cell_size_)));
  const int cz_hi =
    std::min(nz_ - 1, static_cast<int>(std::floor((box.center.z + ez - z0_) / cell_size_)));
  if (cx_hi < cx_lo || cz_hi < cz_lo) {
    return;
  }
  // Same expressions as point_in_box with the trig hoisted out of the loop,
  // so membership decisions agree bit for bit.
  const double lim_l = hl + kBoundaryEps;
  const double lim_h = hh + kBoundaryEps;
  const double lim_w = hw + kBoundaryEps;
  for (int cz = cz_lo; cz <= cz_hi; ++cz) {
    const std::size_t row = static_cast<std::size_t>(cz) * nx_;
    const std::uint32_t begin = bucket_start_[row + cx_lo];
    const std::uint32_t end = bucket_start_[row + cx_hi + 1];
    for (std::uint32_t k = begin; k < end; ++k) {
      const double dx = px_[k] - box.center.x;
      const double dy = py_[k] - box.center.y;
      const double dz = pz_[k] - box.center.z;
      const double lx = c * dx - s * dz;
      const double lz = s * dx + c * dz;
      const bool inside =
        std::abs(lx) <= lim_l && std::abs(dy) <= lim_h && std::abs(lz) <= lim_w;
      visit(k, inside);
    }
  }
}

std::vector<std::uint32_t> PointGrid::interior(const Box3D & box) const
{
  std::vector<std::uint32_t> out;
  if (xyz_.empty()) {
    return out;
  }
  visit_window(box, [&](std::uint32_t slot, bool inside) {
    if (inside) {
      out.push_back(bucket_points_[slot]);
    }
  });
  // Buckets are scanned row-major, so indices arrive unsorted across rows.
  std::sort(out.begin(), out.end());
  return out;
}

BoxStats PointGrid::stats(const Box3D & box, std::span<const double> scores) const
{
  BoxStats stats;
  if (xyz_.empty()) {
    return stats;
  }
  if (scores.empty()) {
    visit_window(box, [&](std::uint32_t slot, bool inside) {
      if (inside) {
        ++stats.count;
        stats.sum.x += px_[slot];
        stats.sum.y += py_[slot];
        stats.sum.z += pz_[slot];
      }
    });
  } else {
    visit_window(box, [&](std::uint32_t slot, bool inside) {
      if (inside) {
        ++stats.count;
        stats.sum.x += px_[slot];
        stats.sum.y += py_[slot];
        stats.sum.z += pz_[slot];
        stats.score_sum += scores[bucket_points_[slot]];
      }
    });
  }
  return stats;
}

}  // namespace pointdet
