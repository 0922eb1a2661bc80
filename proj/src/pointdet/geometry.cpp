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

#include "pointdet/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "pointdet/errors.hpp"

namespace pointdet
{

namespace
{

// Half-plane slack for clipping; shared-edge slivers below this are merged.
constexpr double kClipEps = 1e-9;

std::atomic<bool> g_bev_iou_sign_flip{false};

bool finite(double v) { return std::isfinite(v); }

}  // namespace

double norm(const Vec3 & v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

double distance(const Vec3 & a, const Vec3 & b) { return norm(a - b); }

double normalize_angle(double angle)
{
  double r = std::atan2(std::sin(angle), std::cos(angle));
  if (r >= kPi) {
    r -= 2.0 * kPi;
  }
  return r;
}

Box3D::Box3D(const Vec3 & center_in, double l_in, double h_in, double w_in, double yaw_in)
: center(center_in), l(l_in), h(h_in), w(w_in), yaw(normalize_angle(yaw_in))
{
  if (!(l > 0.0) || !(h > 0.0) || !(w > 0.0) || !finite(l) || !finite(h) || !finite(w)) {
    throw ValueError("Box3D sizes must be strictly positive and finite");
  }
  if (!finite(center.x) || !finite(center.y) || !finite(center.z) || !finite(yaw)) {
    throw ValueError("Box3D center and yaw must be finite");
  }
}

double BevPolygon::area() const
{
  const std::size_t n = vertices.size();
  if (n < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const BevPoint & p = vertices[i];
    const BevPoint & q = vertices[(i + 1) % n];
    twice += p.x * q.z - q.x * p.z;
  }
  return 0.5 * twice;
}

std::array<Vec3, 8> box_corners(const Box3D & box)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.l;
  const double hh = 0.5 * box.h;
  const double hw = 0.5 * box.w;

  // Bottom face (y down, so ground side is +h/2), CCW in x-z from (+l/2,+w/2).
  constexpr double kSx[4] = {+1.0, -1.0, -1.0, +1.0};
  constexpr double kSz[4] = {+1.0, +1.0, -1.0, -1.0};

  std::array<Vec3, 8> corners;
  for (int face = 0; face < 2; ++face) {
    const double ly = face == 0 ? +hh : -hh;
    for (int i = 0; i < 4; ++i) {
      const double lx = kSx[i] * hl;
      const double lz = kSz[i] * hw;
      corners[4 * face + i] = Vec3{
        box.center.x + c * lx + s * lz,
        box.center.y + ly,
        box.center.z - s * lx + c * lz,
      };
    }
  }
  return corners;
}

Box3D box_from_corners(const std::array<Vec3, 8> & corners)
{
  Vec3 center{};
  for (const Vec3 & p : corners) {
    center = center + p;
  }
  center = (1.0 / 8.0) * center;

  const Vec3 l_edge = corners[0] - corners[1];  // local +x
  const Vec3 w_edge = corners[1] - corners[2];  // local +z
  const Vec3 h_edge = corners[0] - corners[4];  // local +y
  const double l = norm(l_edge);
  const double w = norm(w_edge);
  const double h = norm(h_edge);
  const double yaw = std::atan2(-l_edge.z, l_edge.x);
  return Box3D(center, l, h, w, yaw);
}

bool point_in_box(const Vec3 & point, const Box3D & box)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double dx = point.x - box.center.x;
  const double dy = point.y - box.center.y;
  const double dz = point.z - box.center.z;
  const double lx = c * dx - s * dz;
  const double lz = s * dx + c * dz;
  return std::abs(lx) <= 0.5 * box.l + kBoundaryEps &&
         std::abs(dy) <= 0.5 * box.h + kBoundaryEps && std::abs(lz) <= 0.5 * box.w + kBoundaryEps;
}

BevPolygon bev_polygon(const Box3D & box)
{
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.l;
  const double hw = 0.5 * box.w;
  constexpr double kSx[4] = {+1.0, -1.0, -1.0, +1.0};
  constexpr double kSz[4] = {+1.0, +1.0, -1.0, -1.0};

  BevPolygon poly;
  poly.vertices.reserve(4);
  for (int i = 0; i < 4; ++i) {
    const double lx = kSx[i] * hl;
    const double lz = kSz[i] * hw;
    poly.vertices.push_back(BevPoint{
      box.center.x + c * lx + s * lz,
      box.center.z - s * lx + c * lz,
    });
  }
  return poly;
}

namespace
{

// Signed distance of p to the left of directed edge a->b (CCW keeps inside).
double edge_side(const BevPoint & a, const BevPoint & b, const BevPoint & p)
{
  return (b.x - a.x) * (p.z - a.z) - (b.z - a.z) * (p.x - a.x);
}

BevPoint edge_intersection(
  const BevPoint & a, const BevPoint & b, const BevPoint & p, const BevPoint & q)
{
  const double da = edge_side(a, b, p);
  const double db = edge_side(a, b, q);
  const double t = da / (da - db);
  return BevPoint{p.x + t * (q.x - p.x), p.z + t * (q.z - p.z)};
}

}  // namespace

double polygon_intersection_area(const BevPolygon & a, const BevPolygon & b)
{
  std::vector<BevPoint> output = a.vertices;
  std::vector<BevPoint> input;
  const std::size_t nb = b.vertices.size();
  for (std::size_t e = 0; e < nb && !output.empty(); ++e) {
    const BevPoint & ca = b.vertices[e];
    const BevPoint & cb = b.vertices[(e + 1) % nb];
    input.swap(output);
    output.clear();
    const std::size_t ni = input.size();
    for (std::size_t i = 0; i < ni; ++i) {
      const BevPoint & p = input[i];
      const BevPoint & q = input[(i + 1) % ni];
      const bool p_in = edge_side(ca, cb, p) >= -kClipEps;
      const bool q_in = edge_side(ca, cb, q) >= -kClipEps;
      if (p_in) {
        output.push_back(p);
        if (!q_in) {
          output.push_back(edge_intersection(ca, cb, p, q));
        }
      } else if (q_in) {
        output.push_back(edge_intersection(ca, cb, p, q));
      }
    }
  }
  if (output.size() < 3) {
    return 0.0;
  }
  double twice = 0.0;
  const std::size_t n = output.size();
  for (std::size_t i = 0; i < n; ++i) {
    const BevPoint & p = output[i];
    const BevPoint & q = output[(i + 1) % n];
    twice += p.x * q.z - q.x * p.z;
  }
  // The true intersection never exceeds either operand; clamp fp overshoot.
  const double raw = 0.5 * twice;
  return std::clamp(raw, 0.0, std::min(a.area(), b.area()));
}

namespace
{

double bev_iou_axis_aligned(const Box3D & a, const Box3D & b)
{
  const auto bounds = [](const Box3D & box) {
    const BevPolygon poly = bev_polygon(box);
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double zmin = xmin;
    double zmax = -xmin;
    for (const BevPoint & p : poly.vertices) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      zmin = std::min(zmin, p.z);
      zmax = std::max(zmax, p.z);
    }
    return std::array<double, 4>{xmin, xmax, zmin, zmax};
  };
  const auto ba = bounds(a);
  const auto bb = bounds(b);
  const double ix = std::max(0.0, std::min(ba[1], bb[1]) - std::max(ba[0], bb[0]));
  const double iz = std::max(0.0, std::min(ba[3], bb[3]) - std::max(ba[2], bb[2]));
  const double inter = ix * iz;
  const double area_a = (ba[1] - ba[0]) * (ba[3] - ba[2]);
  const double area_b = (bb[1] - bb[0]) * (bb[3] - bb[2]);
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace

double bev_iou(const Box3D & a, const Box3D & b, BevIouMode mode)
{
  double iou = 0.0;
  if (mode == BevIouMode::kAxisAligned) {
    iou = bev_iou_axis_aligned(a, b);
  } else {
    const BevPolygon pa = bev_polygon(a);
    const BevPolygon pb = bev_polygon(b);
    const double inter = polygon_intersection_area(pa, pb);
    const double uni = pa.area() + pb.area() - inter;
    iou = uni > 0.0 ? inter / uni : 0.0;
  }
  if (g_bev_iou_sign_flip.load(std::memory_order_relaxed)) {
    iou = -iou;
  }
  return iou;
}

double iou_3d(const Box3D & a, const Box3D & b)
{
  const BevPolygon pa = bev_polygon(a);
  const BevPolygon pb = bev_polygon(b);
  const double bev_inter = polygon_intersection_area(pa, pb);
  const double y_lo = std::max(a.center.y - 0.5 * a.h, b.center.y - 0.5 * b.h);
  const double y_hi = std::min(a.center.y + 0.5 * a.h, b.center.y + 0.5 * b.h);
  const double overlap = std::max(0.0, y_hi - y_lo);
  const double inter = bev_inter * overlap;
  const double uni = a.volume() + b.volume() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

std::vector<std::uint32_t> interior_points(std::span<const Vec3> xyz, const Box3D & box)
{
  std::vector<std::uint32_t> indices;
  for (std::size_t i = 0; i < xyz.size(); ++i) {
    if (point_in_box(xyz[i], box)) {
      indices.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return indices;
}

double points_iou(std::span<const Vec3> xyz, const Box3D & a, const Box3D & b)
{
  std::size_t in_a = 0;
  std::size_t in_b = 0;
  std::size_t in_both = 0;
  for (const Vec3 & p : xyz) {
    const bool pa = point_in_box(p, a);
    const bool pb = point_in_box(p, b);
    in_a += pa ? 1 : 0;
    in_b += pb ? 1 : 0;
    in_both += (pa && pb) ? 1 : 0;
  }
  const std::size_t uni = in_a + in_b - in_both;
  if (uni == 0) {
    return 0.0;
  }
  return static_cast<double>(in_both) / static_cast<double>(uni);
}

void set_bev_iou_sign_flip_for_test(bool enabled)
{
  g_bev_iou_sign_flip.store(enabled, std::memory_order_relaxed);
}

}  // namespace pointdet
