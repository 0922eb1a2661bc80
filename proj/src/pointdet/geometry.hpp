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

#ifndef POINTDET_GEOMETRY_HPP_
#define POINTDET_GEOMETRY_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pointdet
{

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Closed-box containment slack: boundary points count as inside, and points
// reconstructed from corners land within this distance of the exact face.
inline constexpr double kBoundaryEps = 1e-9;

struct Vec3
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(const Vec3 & a, const Vec3 & b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3 & a, const Vec3 & b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3 & v) { return {s * v.x, s * v.y, s * v.z}; }
double norm(const Vec3 & v);
double distance(const Vec3 & a, const Vec3 & b);

// Point in the ground (x-z) plane of the camera frame.
struct BevPoint
{
  double x = 0.0;
  double z = 0.0;
};

// Maps angle to the canonical representative in [-pi, pi).
double normalize_angle(double angle);

// Oriented 3D box in KITTI camera coordinates (x right, y down, z forward).
// Center is the geometric cuboid center; yaw rotates about the vertical (y)
// axis and is normalized to [-pi, pi) on construction. The local l axis maps
// to world direction (cos yaw, 0, -sin yaw).
struct Box3D
{
  Vec3 center;
  double l = 1.0;
  double h = 1.0;
  double w = 1.0;
  double yaw = 0.0;

  Box3D() = default;
  // Throws ValueError unless sizes are strictly positive and all fields finite.
  Box3D(const Vec3 & center, double l, double h, double w, double yaw);

  double volume() const { return l * h * w; }
  double bev_area() const { return l * w; }
};

// Convex CCW polygon in the BEV plane; signed area is positive.
struct BevPolygon
{
  std::vector<BevPoint> vertices;

  double area() const;
};

// The 8 box corners in canonical order: bottom face (y = center.y + h/2,
// ground side with y pointing down) counter-clockwise in the x-z plane
// starting from local (+l/2, +w/2), then the top face in the same x-z order.
std::array<Vec3, 8> box_corners(const Box3D & box);

// Recovers center/size/yaw from corners laid out in canonical order.
Box3D box_from_corners(const std::array<Vec3, 8> & corners);

// Closed-box membership: the boundary (within kBoundaryEps) counts as inside.
bool point_in_box(const Vec3 & point, const Box3D & box);

// 4-vertex CCW rectangle footprint of the box in the x-z plane.
BevPolygon bev_polygon(const Box3D & box);

// Area of the intersection of two convex polygons (Sutherland-Hodgman
// clipping then shoelace). Clamped into [0, min(area(a), area(b))].
double polygon_intersection_area(const BevPolygon & a, const BevPolygon & b);

enum class BevIouMode
{
  // Exact IoU of the rotated footprints.
  kRotated,
  // Fast path: IoU of the axis-aligned bounding rectangles of the footprints.
  kAxisAligned,
};

double bev_iou(const Box3D & a, const Box3D & b, BevIouMode mode = BevIouMode::kRotated);

// BEV intersection times vertical overlap, over the union volume.
double iou_3d(const Box3D & a, const Box3D & b);

// Positions of the points a box contains; the order of `xyz` defines indices.
std::vector<std::uint32_t> interior_points(std::span<const Vec3> xyz, const Box3D & box);

// |S_a intersect S_b| / |S_a union S_b| over interior-point index sets.
// Returns 0 when the union is empty.
double points_iou(std::span<const Vec3> xyz, const Box3D & a, const Box3D & b);

// Test hook: negates bev_iou results so embedded oracle suites can prove they
// catch an injected defect. Never enable outside selftest plumbing.
void set_bev_iou_sign_flip_for_test(bool enabled);

}  // namespace pointdet

#endif  // POINTDET_GEOMETRY_HPP_
