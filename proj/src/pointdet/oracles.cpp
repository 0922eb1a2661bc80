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

#include "pointdet/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pointdet::oracle
{

namespace
{

struct Footprint
{
  double cx, cz;     // center
  double hl, hw;     // half extents
  double c, s;       // cos/sin yaw
  double xmin, xmax, zmin, zmax;
};

Footprint make_footprint(const Box3D & box)
{
  Footprint f;
  f.cx = box.center.x;
  f.cz = box.center.z;
  f.hl = 0.5 * box.l;
  f.hw = 0.5 * box.w;
  f.c = std::cos(box.yaw);
  f.s = std::sin(box.yaw);
  f.xmin = std::numeric_limits<double>::infinity();
  f.xmax = -f.xmin;
  f.zmin = f.xmin;
  f.zmax = -f.xmin;
  const double sx[4] = {+1, -1, -1, +1};
  const double sz[4] = {+1, +1, -1, -1};
  for (int i = 0; i < 4; ++i) {
    const double x = f.cx + f.c * sx[i] * f.hl + f.s * sz[i] * f.hw;
    const double z = f.cz - f.s * sx[i] * f.hl + f.c * sz[i] * f.hw;
    f.xmin = std::min(f.xmin, x);
    f.xmax = std::max(f.xmax, x);
    f.zmin = std::min(f.zmin, z);
    f.zmax = std::max(f.zmax, z);
  }
  return f;
}

// x-interval of the footprint along the scan row z = zc. The interior is the
// conjunction of |c dx - s dz| <= hl and |s dx + c dz| <= hw, each linear in x.
bool row_interval(const Footprint & f, double zc, double & lo, double & hi)
{
  lo = -std::numeric_limits<double>::infinity();
  hi = std::numeric_limits<double>::infinity();
  const double dz = zc - f.cz;
  const struct
  {
    double a, b, limit;
  } constraints[2] = {
    {f.c, -f.s * dz, f.hl},
    {f.s, f.c * dz, f.hw},
  };
  for (const auto & con : constraints) {
    // |a * dx + b| <= limit
    if (std::abs(con.a) < 1e-300) {
      if (std::abs(con.b) > con.limit) {
        return false;
      }
      continue;
    }
    double left = (-con.limit - con.b) / con.a;
    double right = (con.limit - con.b) / con.a;
    if (left > right) {
      std::swap(left, right);
    }
    lo = std::max(lo, f.cx + left);
    hi = std::min(hi, f.cx + right);
  }
  return lo <= hi;
}

}  // namespace

double raster_bev_iou(const Box3D & a, const Box3D & b, int resolution)
{
  const Footprint fa = make_footprint(a);
  const Footprint fb = make_footprint(b);
  const double x0 = std::max(fa.xmin, fb.xmin);
  const double x1 = std::min(fa.xmax, fb.xmax);
  const double z0 = std::max(fa.zmin, fb.zmin);
  const double z1 = std::min(fa.zmax, fb.zmax);
  const double area_a = a.l * a.w;
  const double area_b = b.l * b.w;

  double inter = 0.0;
  if (x1 > x0 && z1 > z0) {
    const double dx = (x1 - x0) / resolution;
    const double dz = (z1 - z0) / resolution;
    std::int64_t cells = 0;
    for (int row = 0; row < resolution; ++row) {
      const double zc = z0 + (row + 0.5) * dz;
      double lo_a, hi_a, lo_b, hi_b;
      if (!row_interval(fa, zc, lo_a, hi_a) || !row_interval(fb, zc, lo_b, hi_b)) {
        continue;
      }
      const double lo = std::max({lo_a, lo_b, x0});
      const double hi = std::min({hi_a, hi_b, x1});
      if (hi <= lo) {
        continue;
      }
      // Count cell centers x0 + (j + 0.5) dx inside [lo, hi].
      const auto j_lo = static_cast<std::int64_t>(std::ceil((lo - x0) / dx - 0.5));
      const auto j_hi = static_cast<std::int64_t>(std::floor((hi - x0) / dx - 0.5));
      const std::int64_t first = std::max<std::int64_t>(j_lo, 0);
      const std::int64_t last = std::min<std::int64_t>(j_hi, resolution - 1);
      if (last >= first) {
        cells += last - first + 1;
      }
    }
    inter = static_cast<double>(cells) * dx * dz;
  }
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

bool point_in_box(const Vec3 & point, const Box3D & box)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double dx = point.x - box.center.x;
  const double dy = point.y - box.center.y;
  const double dz = point.z - box.center.z;
  // Projections onto the box axes u = (c, 0, -s), v = (0, 1, 0), w = (s, 0, c).
  const double along_l = c * dx - s * dz;
  const double along_w = s * dx + c * dz;
  return std::abs(along_l) <= 0.5 * box.l + kBoundaryEps &&
         std::abs(dy) <= 0.5 * box.h + kBoundaryEps &&
         std::abs(along_w) <= 0.5 * box.w + kBoundaryEps;
}

double points_iou(std::span<const Vec3> xyz, const Box3D & a, const Box3D & b)
{
  std::size_t na = 0;
  std::size_t nb = 0;
  std::size_t nab = 0;
  for (const Vec3 & p : xyz) {
    const bool ia = oracle::point_in_box(p, a);
    const bool ib = oracle::point_in_box(p, b);
    if (ia) {
      ++na;
    }
    if (ib) {
      ++nb;
    }
    if (ia && ib) {
      ++nab;
    }
  }
  const std::size_t uni = na + nb - nab;
  return uni == 0 ? 0.0 : static_cast<double>(nab) / static_cast<double>(uni);
}

double central_difference(const std::function<double(double)> & f, double x, double h)
{
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

namespace
{

double ref_smooth_l1(double x)
{
  const double ax = std::abs(x);
  return ax < 1.0 ? 0.5 * x * x : ax - 0.5;
}

double ref_cross_entropy(std::span<const double> logits, std::size_t label)
{
  double max_logit = logits[0];
  for (const double v : logits) {
    max_logit = std::max(max_logit, v);
  }
  double sum = 0.0;
  for (const double v : logits) {
    sum += std::exp(v - max_logit);
  }
  return std::log(sum) - (logits[label] - max_logit);
}

}  // namespace

double reference_total_loss(std::span<const LossSample> samples, double lambda)
{
  double cls = 0.0;
  double reg = 0.0;
  std::size_t n_pos = 0;
  for (const LossSample & s : samples) {
    cls += ref_cross_entropy(s.pred.class_logits, static_cast<std::size_t>(s.label));
    if (s.label < 1) {
      continue;
    }
    ++n_pos;
    double loc = 0.0;
    loc += ref_smooth_l1(s.pred.t_ctr.x - s.target.v_ctr.x);
    loc += ref_smooth_l1(s.pred.t_ctr.y - s.target.v_ctr.y);
    loc += ref_smooth_l1(s.pred.t_ctr.z - s.target.v_ctr.z);
    loc += ref_smooth_l1(s.pred.t_ctr_star.x - s.target.v_ctr_star.x);
    loc += ref_smooth_l1(s.pred.t_ctr_star.y - s.target.v_ctr_star.y);
    loc += ref_smooth_l1(s.pred.t_ctr_star.z - s.target.v_ctr_star.z);
    for (int k = 0; k < 3; ++k) {
      loc += ref_smooth_l1(s.pred.t_size_star[k] - s.target.v_size_star[k]);
    }

    double ang = ref_cross_entropy(s.pred.angle_logits, static_cast<std::size_t>(s.target.angle_bin));
    ang += ref_smooth_l1(s.pred.angle_residuals[s.target.angle_bin] - s.target.angle_residual);

    // Decode the predicted box and accumulate corner distances from scratch.
    const double px = s.proposal_box.center.x + s.pred.t_ctr.x + s.pred.t_ctr_star.x;
    const double py = s.proposal_box.center.y + s.pred.t_ctr.y + s.pred.t_ctr_star.y;
    const double pz = s.proposal_box.center.z + s.pred.t_ctr.z + s.pred.t_ctr_star.z;
    double pl = s.proposal_box.l * (1.0 + s.pred.t_size_star[0]);
    double ph = s.proposal_box.h * (1.0 + s.pred.t_size_star[1]);
    double pw = s.proposal_box.w * (1.0 + s.pred.t_size_star[2]);
    pl = std::max(pl, 0.01);
    ph = std::max(ph, 0.01);
    pw = std::max(pw, 0.01);
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.pred.angle_logits.size(); ++i) {
      if (s.pred.angle_logits[i] > s.pred.angle_logits[best]) {
        best = i;
      }
    }
    const double width = 2.0 * kPi / static_cast<double>(s.pred.angle_logits.size());
    const double pyaw = -kPi + (static_cast<double>(best) + 0.5) * width +
                        s.pred.angle_residuals[best];

    double cor = 0.0;
    const double sx[4] = {+1, -1, -1, +1};
    const double sz[4] = {+1, +1, -1, -1};
    for (int face = 0; face < 2; ++face) {
      for (int i = 0; i < 4; ++i) {
        const double plx = sx[i] * 0.5 * pl;
        const double plz = sz[i] * 0.5 * pw;
        const double ply = (face == 0 ? +0.5 : -0.5) * ph;
        const double vx = px + std::cos(pyaw) * plx + std::sin(pyaw) * plz;
        const double vy = py + ply;
        const double vz = pz - std::sin(pyaw) * plx + std::cos(pyaw) * plz;

        const double glx = sx[i] * 0.5 * s.gt_box.l;
        const double glz = sz[i] * 0.5 * s.gt_box.w;
        const double gly = (face == 0 ? +0.5 : -0.5) * s.gt_box.h;
        const double gx =
          s.gt_box.center.x + std::cos(s.gt_box.yaw) * glx + std::sin(s.gt_box.yaw) * glz;
        const double gy = s.gt_box.center.y + gly;
        const double gz =
          s.gt_box.center.z - std::sin(s.gt_box.yaw) * glx + std::cos(s.gt_box.yaw) * glz;
        cor += std::sqrt(
          (vx - gx) * (vx - gx) + (vy - gy) * (vy - gy) + (vz - gz) * (vz - gz));
      }
    }
    reg += loc + ang + cor;
  }
  const double cls_term = samples.empty() ? 0.0 : cls / static_cast<double>(samples.size());
  const double denom = static_cast<double>(std::max<std::size_t>(n_pos, 1));
  return cls_term + lambda * reg / denom;
}

}  // namespace pointdet::oracle
