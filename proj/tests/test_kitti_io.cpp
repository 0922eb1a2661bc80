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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <limits>

#include "doctest.h"
#include "pointdet/errors.hpp"
#include "pointdet/kitti_io.hpp"
#include "test_util.hpp"

using namespace pointdet;

namespace
{

std::string float_bytes(std::initializer_list<float> values)
{
  std::string out;
  for (const float v : values) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.append(buf, 4);
  }
  return out;
}

const std::vector<std::string> kCarOnly = {"Car"};

constexpr const char * kCalibText =
  "P2: 700 0 600 0 0 700 180 0 0 0 1 0\n"
  "R0_rect: 1 0 0 0 1 0 0 0 1\n"
  "Tr_velo_to_cam: 0 -1 0 0 0 0 -1 0 1 0 0 0.27\n";

}  // namespace

TEST_CASE("parse_point_cloud reads packed little-endian floats")
{
  const std::string bytes =
    float_bytes({1.0f, 2.0f, 3.0f, 0.5f}) + float_bytes({-4.0f, 5.5f, 6.25f, 1.0f});
  const PointCloud cloud = parse_point_cloud(bytes);
  REQUIRE(cloud.size() == 2);
  CHECK(cloud.frame == Frame::kVelodyne);
  CHECK(cloud.xyz[0].x == doctest::Approx(1.0));
  CHECK(cloud.xyz[1].y == doctest::Approx(5.5));
  CHECK(cloud.reflectance[1] == doctest::Approx(1.0));

  CHECK(parse_point_cloud("").empty());
  CHECK_THROWS_AS(parse_point_cloud(std::string(33, 'x')), LengthError);

  const float inf = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(parse_point_cloud(float_bytes({inf, 0, 0, 0})), ValueError);
}

TEST_CASE("point cloud serialization round-trips bit-exactly")
{
  Rng rng(31);
  std::string bytes;
  for (int i = 0; i < 256; ++i) {
    bytes += float_bytes(
      {static_cast<float>(rng.uniform(-80, 80)), static_cast<float>(rng.uniform(-80, 80)),
       static_cast<float>(rng.uniform(-3, 3)), static_cast<float>(rng.uniform01())});
  }
  const PointCloud cloud = parse_point_cloud(bytes);
  CHECK(serialize_point_cloud(cloud) == bytes);
  const PointCloud again = parse_point_cloud(serialize_point_cloud(cloud));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(again.xyz[i].x == cloud.xyz[i].x);
    CHECK(again.reflectance[i] == cloud.reflectance[i]);
  }
}

TEST_CASE("parse_calibration reads keyed matrices")
{
  const Calibration calib = parse_calibration(kCalibText);
  CHECK(calib.P2.m[0] == doctest::Approx(700.0));
  CHECK(calib.P2.m[2] == doctest::Approx(600.0));
  CHECK(calib.Tr_velo_to_cam.m[1] == doctest::Approx(-1.0));
  CHECK(calib.Tr_velo_to_cam.m[11] == doctest::Approx(0.27));

  CHECK_THROWS_AS(
    parse_calibration(
      "P2: 1 2 3\nR0_rect: 1 0 0 0 1 0 0 0 1\nTr_velo_to_cam: 1 0 0 0 0 1 0 0 0 0 1 0\n"),
    ShapeError);
  CHECK_THROWS_AS(
    parse_calibration("P2: 700 0 600 0 0 700 180 0 0 0 1 0\nR0_rect: 1 0 0 0 1 0 0 0 1\n"),
    MissingKeyError);
  // A rectification matrix far from orthonormal is rejected.
  CHECK_THROWS_AS(
    parse_calibration(
      "P2: 700 0 600 0 0 700 180 0 0 0 1 0\n"
      "R0_rect: 2 0 0 0 1 0 0 0 1\n"
      "Tr_velo_to_cam: 1 0 0 0 0 1 0 0 0 0 1 0\n"),
    ValueError);
}

TEST_CASE("parse_labels shifts the bottom-center to the geometric center")
{
  const std::string text =
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n";
  const auto labels = parse_labels(text, kCarOnly);
  REQUIRE(labels.size() == 1);
  CHECK(labels[0].matchable);
  CHECK(labels[0].box.h == doctest::Approx(1.65));
  CHECK(labels[0].box.w == doctest::Approx(1.67));
  CHECK(labels[0].box.l == doctest::Approx(3.64));
  CHECK(labels[0].box.center.y == doctest::Approx(1.71 - 1.65 / 2.0));
  CHECK(labels[0].box.yaw == doctest::Approx(-1.59));
  CHECK(labels[0].bbox2d[0] == doctest::Approx(587.01));

  CHECK(parse_labels("", kCarOnly).empty());
  CHECK(parse_labels("\n   \n", kCarOnly).empty());

  const auto dontcare =
    parse_labels("DontCare -1 -1 -10 500 160 520 170 -1 -1 -1 -1000 -1000 -1000 -10\n", kCarOnly);
  REQUIRE(dontcare.size() == 1);
  CHECK_FALSE(dontcare[0].matchable);

  // Unknown classes are retained but non-matchable.
  const auto van = parse_labels(
    "Van 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n",
    kCarOnly);
  REQUIRE(van.size() == 1);
  CHECK_FALSE(van[0].matchable);

  CHECK_THROWS_AS(parse_labels("Car 1 2 3\n", kCarOnly), FieldCountError);
}

TEST_CASE("labels serialize-parse round trip")
{
  const std::string text =
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59\n"
    "Car 0.30 2 1.50 100 150 220 260 1.5 1.6 4.1 4.00 1.60 22.00 0.40\n";
  const auto labels = parse_labels(text, kCarOnly);
  const auto again = parse_labels(serialize_labels(labels), kCarOnly);
  REQUIRE(again.size() == labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(again[i].box.center.y == labels[i].box.center.y);
    CHECK(again[i].box.yaw == labels[i].box.yaw);
    CHECK(again[i].truncation == labels[i].truncation);
  }
}

TEST_CASE("velo_to_camera applies the rigid chain and preserves structure")
{
  PointCloud cloud;
  cloud.frame = Frame::kVelodyne;
  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    cloud.xyz.push_back(Vec3{rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-2, 2)});
    cloud.reflectance.push_back(rng.uniform01());
    cloud.scores.push_back(rng.uniform01());
  }

  Calibration identity;
  const PointCloud same = velo_to_camera(cloud, identity);
  CHECK(same.frame == Frame::kCamera);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(same.xyz[i].x == cloud.xyz[i].x);
    CHECK(same.scores[i] == cloud.scores[i]);
  }
  CHECK_THROWS_AS(velo_to_camera(same, identity), FrameError);

  Calibration translation;
  translation.Tr_velo_to_cam.m = {1, 0, 0, 1.5, 0, 1, 0, -2.0, 0, 0, 1, 0.25};
  const PointCloud moved = velo_to_camera(cloud, translation);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK(moved.xyz[i].x == doctest::Approx(cloud.xyz[i].x + 1.5));
    CHECK(moved.xyz[i].y == doctest::Approx(cloud.xyz[i].y - 2.0));
    CHECK(moved.xyz[i].z == doctest::Approx(cloud.xyz[i].z + 0.25));
  }

  const Calibration kitti = parse_calibration(kCalibText);
  const PointCloud cam = velo_to_camera(cloud, kitti);
  for (int k = 0; k < 50; ++k) {
    const std::size_t i = rng.uniform_below(cloud.size());
    const std::size_t j = rng.uniform_below(cloud.size());
    CHECK(
      distance(cam.xyz[i], cam.xyz[j]) ==
      doctest::Approx(distance(cloud.xyz[i], cloud.xyz[j])).epsilon(1e-6));
  }
  // Numeric inverse of the rigid transform recovers the input to 1e-6.
  const auto & m = kitti.Tr_velo_to_cam.m;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3 & p = cam.xyz[i];  // R0 is identity here
    const Vec3 d{p.x - m[3], p.y - m[7], p.z - m[11]};
    const Vec3 back{
      m[0] * d.x + m[4] * d.y + m[8] * d.z,
      m[1] * d.x + m[5] * d.y + m[9] * d.z,
      m[2] * d.x + m[6] * d.y + m[10] * d.z,
    };
    CHECK(distance(back, cloud.xyz[i]) < 1e-6);
  }
}

TEST_CASE("project_to_image pinhole behaviour")
{
  const Calibration calib = parse_calibration(kCalibText);
  PointCloud cloud;
  cloud.frame = Frame::kCamera;
  cloud.xyz = {
    Vec3{0.0, 0.0, 10.0},
    Vec3{1.0, 0.5, 10.0},
    Vec3{2.0, 1.0, 20.0},  // same ray at double depth
    Vec3{0.0, 0.0, -5.0},  // behind the camera
  };
  cloud.reflectance.assign(4, 0.0);

  const ProjectedPoints proj = project_to_image(cloud, calib);
  CHECK(proj.valid[0] == 1);
  CHECK(proj.u[0] == doctest::Approx(600.0));
  CHECK(proj.v[0] == doctest::Approx(180.0));
  CHECK(proj.valid[3] == 0);
  CHECK(proj.u[2] == doctest::Approx(proj.u[1]));

  // Doubling the depth of a fixed world offset halves the pixel offset.
  PointCloud offset;
  offset.frame = Frame::kCamera;
  offset.xyz = {Vec3{1.0, 0.5, 10.0}, Vec3{1.0, 0.5, 20.0}};
  offset.reflectance.assign(2, 0.0);
  const ProjectedPoints po = project_to_image(offset, calib);
  CHECK(po.u[1] - 600.0 == doctest::Approx((po.u[0] - 600.0) / 2.0));
  CHECK(po.v[1] - 180.0 == doctest::Approx((po.v[0] - 180.0) / 2.0));

  PointCloud wide;
  wide.frame = Frame::kCamera;
  wide.xyz = {Vec3{100.0, 0.0, 10.0}};
  wide.reflectance.assign(1, 0.0);
  CHECK(project_to_image(wide, calib, 1242, 375).valid[0] == 0);
}

TEST_CASE("PGM masks parse, serialize and reject malformed input")
{
  MaskImage mask;
  mask.width = 4;
  mask.height = 2;
  mask.pixels = {0, 64, 128, 255, 255, 0, 32, 16};
  const std::string bytes = serialize_mask_pgm(mask);
  const MaskImage back = parse_mask_pgm(bytes);
  CHECK(back.width == 4);
  CHECK(back.height == 2);
  CHECK(back.pixels == mask.pixels);
  CHECK(back.score_at(3, 0) == doctest::Approx(1.0));
  CHECK(back.score_at(1, 0) == doctest::Approx(64.0 / 255.0));

  const MaskImage commented = parse_mask_pgm("P5\n# foo\n2 1\n255\n\x10\x20");
  CHECK(commented.width == 2);
  CHECK(commented.pixels[1] == 0x20);

  CHECK_THROWS_AS(parse_mask_pgm("P6\n2 1\n255\nab"), ValueError);
  CHECK_THROWS_AS(parse_mask_pgm("P5\n2 1\n65535\nab"), ValueError);
  CHECK_THROWS_AS(parse_mask_pgm("P5\n4 4\n255\nab"), LengthError);
}

TEST_CASE("mask_filter keeps scored in-mask points only")
{
  const Calibration calib = parse_calibration(kCalibText);
  MaskImage zero;
  zero.width = 1242;
  zero.height = 375;
  zero.pixels.assign(static_cast<std::size_t>(zero.width) * zero.height, 0);

  Rng rng(41);
  PointCloud cloud;
  cloud.frame = Frame::kCamera;
  for (int i = 0; i < 500; ++i) {
    // Fill the frustum: pick a pixel and a depth, then unproject.
    const double u = rng.uniform(1.0, 1241.0);
    const double v = rng.uniform(1.0, 374.0);
    const double z = rng.uniform(4.0, 40.0);
    cloud.xyz.push_back(Vec3{(u - 600.0) * z / 700.0, (v - 180.0) * z / 700.0, z});
    cloud.reflectance.push_back(rng.uniform01());
  }

  CHECK(mask_filter(cloud, zero, calib, 0.5).empty());

  MaskImage ones = zero;
  std::fill(ones.pixels.begin(), ones.pixels.end(), 255);
  const PointCloud all = mask_filter(cloud, ones, calib, 0.5);
  CHECK(all.size() == cloud.size());
  for (const double s : all.scores) {
    CHECK(s == doctest::Approx(1.0));
  }

  // Left-half foreground; verify membership per point with the projection
  // formula evaluated directly.
  MaskImage half = zero;
  for (int y = 0; y < half.height; ++y) {
    for (int x = 0; x < half.width / 2; ++x) {
      half.pixels[static_cast<std::size_t>(y) * half.width + x] = 255;
    }
  }
  const PointCloud left = mask_filter(cloud, half, calib, 0.5);
  std::size_t expected = 0;
  for (const Vec3 & p : cloud.xyz) {
    const double u = 700.0 * p.x / p.z + 600.0;
    if (static_cast<int>(std::floor(u)) < half.width / 2) {
      ++expected;
    }
  }
  CHECK(left.size() == expected);
  for (const Vec3 & p : left.xyz) {
    const double u = 700.0 * p.x / p.z + 600.0;
    CHECK(static_cast<int>(std::floor(u)) < half.width / 2);
  }
}
