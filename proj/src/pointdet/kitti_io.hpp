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

#ifndef POINTDET_KITTI_IO_HPP_
#define POINTDET_KITTI_IO_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pointdet/geometry.hpp"
#include "pointdet/point_cloud.hpp"

namespace pointdet
{

struct Mat3
{
  // Row-major.
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  Vec3 apply(const Vec3 & v) const
  {
    return {
      m[0] * v.x + m[1] * v.y + m[2] * v.z,
      m[3] * v.x + m[4] * v.y + m[5] * v.z,
      m[6] * v.x + m[7] * v.y + m[8] * v.z,
    };
  }
};

struct Mat34
{
  // Row-major 3x4; applies to homogeneous [x y z 1].
  std::array<double, 12> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};

  Vec3 apply(const Vec3 & v) const
  {
    return {
      m[0] * v.x + m[1] * v.y + m[2] * v.z + m[3],
      m[4] * v.x + m[5] * v.y + m[6] * v.z + m[7],
      m[8] * v.x + m[9] * v.y + m[10] * v.z + m[11],
    };
  }
};

struct Calibration
{
  Mat34 P2;
  Mat3 R0_rect;
  Mat34 Tr_velo_to_cam;
};

struct GroundTruthLabel
{
  std::string class_name;
  Box3D box;  // geometric-center convention
  double truncation = 0.0;
  int occlusion = 0;
  std::array<double, 4> bbox2d{0, 0, 0, 0};  // left, top, right, bottom (px)
  double alpha = 0.0;
  // False for classes outside the configured set (DontCare semantics):
  // excluded from assignment and from evaluation matching.
  bool matchable = true;
};

struct MaskImage
{
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, score = pixel / 255

  double score_at(int px, int py) const
  {
    return static_cast<double>(pixels[static_cast<std::size_t>(py) * width + px]) / 255.0;
  }
};

struct ProjectedPoints
{
  std::vector<double> u;
  std::vector<double> v;
  std::vector<std::uint8_t> valid;
};

// KITTI velodyne payload: four little-endian float32 per point (x, y, z, r).
// Throws LengthError when the byte count is not a multiple of 16 and
// ValueError on non-finite floats.
PointCloud parse_point_cloud(std::string_view bytes);
std::string serialize_point_cloud(const PointCloud & cloud);

// KITTI calibration text, `KEY: v0 v1 ...` lines. Requires P2, R0_rect and
// Tr_velo_to_cam; throws MissingKeyError / ShapeError, and ValueError when
// R0_rect is not orthonormal to 1e-3.
Calibration parse_calibration(std::string_view text);

// KITTI label_2 lines (15+ whitespace-separated fields). The bottom-center y
// is shifted by -h/2 to the geometric center; classes outside `class_set`
// are retained but flagged non-matchable.
std::vector<GroundTruthLabel> parse_labels(
  std::string_view text, const std::vector<std::string> & class_set);
std::string serialize_labels(const std::vector<GroundTruthLabel> & labels);

// Binary PGM (P5), maxval 255.
MaskImage parse_mask_pgm(std::string_view bytes);
std::string serialize_mask_pgm(const MaskImage & mask);

// x_cam = R0_rect * Tr_velo_to_cam * [x; y; z; 1]. Reflectance and scores
// carry over. Throws FrameError when the cloud is already in camera frame.
PointCloud velo_to_camera(const PointCloud & cloud, const Calibration & calib);

// Pinhole projection through P2; a point is valid when its depth is positive
// and, if width/height are nonzero, its pixel falls inside [0,w) x [0,h).
ProjectedPoints project_to_image(
  const PointCloud & cloud, const Calibration & calib, int width = 0, int height = 0);

// Keeps points whose projected pixel is valid and whose mask score passes
// `threshold`, attaching that score per point. Nearest-pixel (floor) lookup.
PointCloud mask_filter(
  const PointCloud & cloud, const MaskImage & mask, const Calibration & calib, double threshold);

}  // namespace pointdet

#endif  // POINTDET_KITTI_IO_HPP_
