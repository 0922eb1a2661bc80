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

#include "pointdet/kitti_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "pointdet/errors.hpp"

namespace pointdet
{

namespace
{

float read_le_float32(const unsigned char * p)
{
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

void write_le_float32(float value, std::string & out)
{
  const auto bits = std::bit_cast<std::uint32_t>(value);
  out.push_back(static_cast<char>(bits & 0xff));
  out.push_back(static_cast<char>((bits >> 8) & 0xff));
  out.push_back(static_cast<char>((bits >> 16) & 0xff));
  out.push_back(static_cast<char>((bits >> 24) & 0xff));
}

std::vector<std::string> split_ws(std::string_view line)
{
  std::vector<std::string> out;
  std::istringstream stream{std::string(line)};
  std::string token;
  while (stream >> token) {
    out.push_back(token);
  }
  return out;
}

double parse_double(const std::string & token, const char * what)
{
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) {
      throw ValueError(std::string("trailing characters in ") + what + ": " + token);
    }
    return v;
  } catch (const std::invalid_argument &) {
    throw ValueError(std::string("bad number in ") + what + ": " + token);
  } catch (const std::out_of_range &) {
    throw ValueError(std::string("number out of range in ") + what + ": " + token);
  }
}

// %.17g keeps doubles bit-exact through a text round trip.
std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

PointCloud parse_point_cloud(std::string_view bytes)
{
  if (bytes.size() % 16 != 0) {
    throw LengthError(
      "velodyne payload must be a multiple of 16 bytes, got " + std::to_string(bytes.size()));
  }
  const std::size_t n = bytes.size() / 16;
  PointCloud cloud;
  cloud.frame = Frame::kVelodyne;
  cloud.xyz.reserve(n);
  cloud.reflectance.reserve(n);
  const auto * p = reinterpret_cast<const unsigned char *>(bytes.data());
  for (std::size_t i = 0; i < n; ++i, p += 16) {
    const float x = read_le_float32(p);
    const float y = read_le_float32(p + 4);
    const float z = read_le_float32(p + 8);
    const float r = read_le_float32(p + 12);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(r)) {
      throw ValueError("non-finite value in velodyne point " + std::to_string(i));
    }
    cloud.xyz.push_back(Vec3{x, y, z});
    cloud.reflectance.push_back(r);
  }
  return cloud;
}

std::string serialize_point_cloud(const PointCloud & cloud)
{
  std::string out;
  out.reserve(cloud.size() * 16);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    write_le_float32(static_cast<float>(cloud.xyz[i].x), out);
    write_le_float32(static_cast<float>(cloud.xyz[i].y), out);
    write_le_float32(static_cast<float>(cloud.xyz[i].z), out);
    write_le_float32(static_cast<float>(cloud.reflectance[i]), out);
  }
  return out;
}

namespace
{

std::vector<double> lookup_values(
  std::string_view text, const std::string & key, std::size_t expected)
{
  std::istringstream stream{std::string(text)};
  std::string line;
  while (std::getline(stream, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      continue;
    }
    std::string name = line.substr(0, colon);
    // Some calib dumps write `R0_rect` as `R_rect`; accept the exact key only.
    while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) {
      name.pop_back();
    }
    if (name != key) {
      continue;
    }
    const auto tokens = split_ws(line.substr(colon + 1));
    if (tokens.size() != expected) {
      throw ShapeError(
        key + " expects " + std::to_string(expected) + " values, got " +
        std::to_string(tokens.size()));
    }
    std::vector<double> values;
    values.reserve(expected);
    for (const auto & token : tokens) {
      values.push_back(parse_double(token, key.c_str()));
    }
    return values;
  }
  throw MissingKeyError("calibration key not found: " + key);
}

}  // namespace

Calibration parse_calibration(std::string_view text)
{
  Calibration calib;
  const auto p2 = lookup_values(text, "P2", 12);
  const auto r0 = lookup_values(text, "R0_rect", 9);
  const auto tr = lookup_values(text, "Tr_velo_to_cam", 12);
  std::copy(p2.begin(), p2.end(), calib.P2.m.begin());
  std::copy(r0.begin(), r0.end(), calib.R0_rect.m.begin());
  std::copy(tr.begin(), tr.end(), calib.Tr_velo_to_cam.m.begin());

  for (const double v : calib.P2.m) {
    if (!std::isfinite(v)) {
      throw ValueError("non-finite value in P2");
    }
  }
  // R0_rect must be orthonormal to 1e-3: R * R^T = I.
  const auto & r = calib.R0_rect.m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) {
        dot += r[3 * i + k] * r[3 * j + k];
      }
      const double expect = i == j ? 1.0 : 0.0;
      if (!std::isfinite(dot) || std::abs(dot - expect) > 1e-3) {
        throw ValueError("R0_rect is not orthonormal to 1e-3");
      }
    }
  }
  return calib;
}

std::vector<GroundTruthLabel> parse_labels(
  std::string_view text, const std::vector<std::string> & class_set)
{
  std::vector<GroundTruthLabel> labels;
  std::istringstream stream{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
      continue;
    }
    const auto f = split_ws(line);
    if (f.size() < 15) {
      throw FieldCountError(
        "label line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
        " fields, expected >= 15");
    }
    GroundTruthLabel label;
    label.class_name = f[0];
    label.truncation = parse_double(f[1], "truncation");
    label.occlusion = static_cast<int>(parse_double(f[2], "occlusion"));
    label.alpha = parse_double(f[3], "alpha");
    for (int i = 0; i < 4; ++i) {
      label.bbox2d[i] = parse_double(f[4 + i], "bbox");
    }
    const double h = parse_double(f[8], "h");
    const double w = parse_double(f[9], "w");
    const double l = parse_double(f[10], "l");
    const double x = parse_double(f[11], "x");
    const double y = parse_double(f[12], "y");
    const double z = parse_double(f[13], "z");
    const double yaw = parse_double(f[14], "rotation_y");
    label.matchable =
      std::find(class_set.begin(), class_set.end(), label.class_name) != class_set.end();
    if (label.matchable && (l <= 0.0 || h <= 0.0 || w <= 0.0)) {
      throw ValueError("non-positive box size for class " + label.class_name);
    }
    // DontCare entries carry -1 sizes; keep them representable but inert.
    const double ls = label.matchable ? l : std::max(l, 0.01);
    const double hs = label.matchable ? h : std::max(h, 0.01);
    const double ws = label.matchable ? w : std::max(w, 0.01);
    // KITTI stores the bottom-face center; y points down, so the geometric
    // center sits at y - h/2.
    label.box = Box3D(Vec3{x, y - hs / 2.0, z}, ls, hs, ws, yaw);
    labels.push_back(std::move(label));
  }
  return labels;
}

std::string serialize_labels(const std::vector<GroundTruthLabel> & labels)
{
  std::string out;
  for (const auto & label : labels) {
    const double bottom_y = label.box.center.y + label.box.h / 2.0;
    out += label.class_name;
    out += ' ' + format_double(label.truncation);
    out += ' ' + std::to_string(label.occlusion);
    out += ' ' + format_double(label.alpha);
    for (const double v : label.bbox2d) {
      out += ' ' + format_double(v);
    }
    out += ' ' + format_double(label.box.h);
    out += ' ' + format_double(label.box.w);
    out += ' ' + format_double(label.box.l);
    out += ' ' + format_double(label.box.center.x);
    out += ' ' + format_double(bottom_y);
    out += ' ' + format_double(label.box.center.z);
    out += ' ' + format_double(label.box.yaw);
    out += '\n';
  }
  return out;
}

namespace
{

// PGM token reader skipping whitespace and `#` comments.
struct PgmCursor
{
  std::string_view bytes;
  std::size_t pos = 0;

  std::string next_token()
  {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') {
          ++pos;
        }
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    if (start == pos) {
      throw ValueError("truncated PGM header");
    }
    return std::string(bytes.substr(start, pos - start));
  }
};

}  // namespace

MaskImage parse_mask_pgm(std::string_view bytes)
{
  PgmCursor cursor{bytes};
  if (cursor.next_token() != "P5") {
    throw ValueError("mask must be binary PGM (P5)");
  }
  MaskImage mask;
  mask.width = static_cast<int>(parse_double(cursor.next_token(), "width"));
  mask.height = static_cast<int>(parse_double(cursor.next_token(), "height"));
  const int maxval = static_cast<int>(parse_double(cursor.next_token(), "maxval"));
  if (mask.width <= 0 || mask.height <= 0) {
    throw ValueError("PGM dimensions must be positive");
  }
  if (maxval != 255) {
    throw ValueError("PGM maxval must be 255, got " + std::to_string(maxval));
  }
  // Exactly one whitespace byte separates the header from the raster.
  cursor.pos += 1;
  const std::size_t expected = static_cast<std::size_t>(mask.width) * mask.height;
  if (bytes.size() - cursor.pos < expected) {
    throw LengthError("PGM raster truncated");
  }
  mask.pixels.assign(
    reinterpret_cast<const std::uint8_t *>(bytes.data()) + cursor.pos,
    reinterpret_cast<const std::uint8_t *>(bytes.data()) + cursor.pos + expected);
  return mask;
}

std::string serialize_mask_pgm(const MaskImage & mask)
{
  std::string out =
    "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n255\n";
  out.append(reinterpret_cast<const char *>(mask.pixels.data()), mask.pixels.size());
  return out;
}

PointCloud velo_to_camera(const PointCloud & cloud, const Calibration & calib)
{
  if (cloud.frame == Frame::kCamera) {
    throw FrameError("cloud is already in camera frame");
  }
  PointCloud out = cloud;
  out.frame = Frame::kCamera;
  for (auto & p : out.xyz) {
    p = calib.R0_rect.apply(calib.Tr_velo_to_cam.apply(p));
  }
  return out;
}

ProjectedPoints project_to_image(
  const PointCloud & cloud, const Calibration & calib, int width, int height)
{
  if (cloud.frame != Frame::kCamera) {
    throw FrameError("projection expects a camera-frame cloud");
  }
  ProjectedPoints out;
  out.u.resize(cloud.size());
  out.v.resize(cloud.size());
  out.valid.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3 h = calib.P2.apply(cloud.xyz[i]);
    const double depth = h.z;
    if (depth <= 0.0) {
      out.u[i] = 0.0;
      out.v[i] = 0.0;
      out.valid[i] = 0;
      continue;
    }
    const double u = h.x / depth;
    const double v = h.y / depth;
    out.u[i] = u;
    out.v[i] = v;
    bool ok = true;
    if (width > 0 && height > 0) {
      ok = u >= 0.0 && u < static_cast<double>(width) && v >= 0.0 && v < static_cast<double>(height);
    }
    out.valid[i] = ok ? 1 : 0;
  }
  return out;
}

PointCloud mask_filter(
  const PointCloud & cloud, const MaskImage & mask, const Calibration & calib, double threshold)
{
  const ProjectedPoints proj = project_to_image(cloud, calib, mask.width, mask.height);
  PointCloud out;
  out.frame = cloud.frame;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!proj.valid[i]) {
      continue;
    }
    const int px = static_cast<int>(std::floor(proj.u[i]));
    const int py = static_cast<int>(std::floor(proj.v[i]));
    const double score = mask.score_at(px, py);
    if (score >= threshold) {
      out.xyz.push_back(cloud.xyz[i]);
      out.reflectance.push_back(cloud.reflectance[i]);
      out.scores.push_back(score);
    }
  }
  return out;
}

}  // namespace pointdet
