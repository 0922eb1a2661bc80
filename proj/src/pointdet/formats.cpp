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

#include "pointdet/formats.hpp"

#include <cstdio>
#include <sstream>

#include "pointdet/errors.hpp"

namespace pointdet
{

namespace
{

constexpr const char * kProposalsMagic = "pointdet.proposals.v1";
constexpr const char * kTargetsMagic = "pointdet.targets.v1";

void append_double(std::string & out, double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), " %.17g", v);
  out += buf;
}

class LineReader
{
public:
  explicit LineReader(std::string_view text) : stream_(std::string(text)) {}

  bool next(std::string & line) { return static_cast<bool>(std::getline(stream_, line)); }

  std::string expect(const char * what)
  {
    std::string line;
    if (!next(line)) {
      throw ValueError(std::string("truncated file: expected ") + what);
    }
    return line;
  }

private:
  std::istringstream stream_;
};

std::vector<std::string> tokens_of(const std::string & line)
{
  std::vector<std::string> out;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) {
    out.push_back(token);
  }
  return out;
}

double token_double(const std::string & token, const char * what)
{
  try {
    return std::stod(token);
  } catch (const std::exception &) {
    throw ValueError(std::string("bad number in ") + what + ": " + token);
  }
}

std::size_t header_count(LineReader & reader, const char * key)
{
  const auto parts = tokens_of(reader.expect(key));
  if (parts.size() != 2 || parts[0] != key) {
    throw ValueError(std::string("expected '") + key + " <count>' header line");
  }
  return static_cast<std::size_t>(token_double(parts[1], key));
}

}  // namespace

std::string serialize_proposals(const FrameProposals & frame)
{
  std::string out = kProposalsMagic;
  out += "\nframe " + frame.frame_id;
  out += "\npoints " + std::to_string(frame.cloud.size());
  out += "\nproposals " + std::to_string(frame.proposals.size());
  out += '\n';
  for (std::size_t i = 0; i < frame.cloud.size(); ++i) {
    out += 'p';
    append_double(out, frame.cloud.xyz[i].x);
    append_double(out, frame.cloud.xyz[i].y);
    append_double(out, frame.cloud.xyz[i].z);
    append_double(out, frame.cloud.reflectance[i]);
    append_double(out, frame.cloud.has_scores() ? frame.cloud.scores[i] : 0.0);
    out += frame.is_foreground[i] ? " 1" : " 0";
    out += '\n';
  }
  for (const Proposal & p : frame.proposals) {
    out += 'r';
    out += ' ' + std::to_string(p.seed_index);
    append_double(out, p.score);
    append_double(out, p.box.center.x);
    append_double(out, p.box.center.y);
    append_double(out, p.box.center.z);
    append_double(out, p.box.l);
    append_double(out, p.box.h);
    append_double(out, p.box.w);
    append_double(out, p.box.yaw);
    out += '\n';
  }
  return out;
}

FrameProposals parse_proposals(std::string_view text)
{
  LineReader reader(text);
  if (reader.expect("magic") != kProposalsMagic) {
    throw ValueError(std::string("not a ") + kProposalsMagic + " file");
  }
  FrameProposals frame;
  const auto frame_line = tokens_of(reader.expect("frame"));
  if (frame_line.size() != 2 || frame_line[0] != "frame") {
    throw ValueError("expected 'frame <id>' header line");
  }
  frame.frame_id = frame_line[1];
  const std::size_t n_points = header_count(reader, "points");
  const std::size_t n_proposals = header_count(reader, "proposals");

  frame.cloud.frame = Frame::kCamera;
  frame.cloud.xyz.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const auto f = tokens_of(reader.expect("point line"));
    if (f.size() != 7 || f[0] != "p") {
      throw ValueError("malformed point line " + std::to_string(i));
    }
    frame.cloud.xyz.push_back(Vec3{
      token_double(f[1], "point"), token_double(f[2], "point"), token_double(f[3], "point")});
    frame.cloud.reflectance.push_back(token_double(f[4], "point"));
    frame.cloud.scores.push_back(token_double(f[5], "point"));
    frame.is_foreground.push_back(f[6] == "1" ? 1 : 0);
  }
  frame.proposals.reserve(n_proposals);
  for (std::size_t i = 0; i < n_proposals; ++i) {
    const auto f = tokens_of(reader.expect("proposal line"));
    if (f.size() != 10 || f[0] != "r") {
      throw ValueError("malformed proposal line " + std::to_string(i));
    }
    Proposal p;
    p.seed_index = static_cast<std::uint32_t>(token_double(f[1], "proposal"));
    p.score = token_double(f[2], "proposal");
    p.box = Box3D(
      Vec3{
        token_double(f[3], "proposal"), token_double(f[4], "proposal"),
        token_double(f[5], "proposal")},
      token_double(f[6], "proposal"), token_double(f[7], "proposal"),
      token_double(f[8], "proposal"), token_double(f[9], "proposal"));
    p.aligned = true;
    frame.proposals.push_back(std::move(p));
  }
  return frame;
}

std::string serialize_targets(const FrameTargets & frame)
{
  std::string out = kTargetsMagic;
  out += "\nframe " + frame.frame_id;
  out += "\nproposals " + std::to_string(frame.assignments.size());
  out += '\n';
  for (const TargetAssignment & a : frame.assignments) {
    out += "a " + std::to_string(a.proposal_index);
    out += a.label == ProposalLabel::kPositive ? " pos"
           : a.label == ProposalLabel::kNegative ? " neg"
                                                 : " ign";
    out += ' ' + std::to_string(a.matched_gt);
    append_double(out, a.points_iou);
    out += '\n';
  }
  out += 'm';
  for (const std::uint32_t idx : frame.minibatch) {
    out += ' ' + std::to_string(idx);
  }
  out += '\n';
  for (const PositiveTarget & t : frame.targets) {
    out += "t " + std::to_string(t.proposal_index) + ' ' + std::to_string(t.gt_index);
    append_double(out, t.target.v_ctr.x);
    append_double(out, t.target.v_ctr.y);
    append_double(out, t.target.v_ctr.z);
    append_double(out, t.target.v_ctr_star.x);
    append_double(out, t.target.v_ctr_star.y);
    append_double(out, t.target.v_ctr_star.z);
    append_double(out, t.target.v_size_star[0]);
    append_double(out, t.target.v_size_star[1]);
    append_double(out, t.target.v_size_star[2]);
    out += ' ' + std::to_string(t.target.angle_bin);
    append_double(out, t.target.angle_residual);
    out += '\n';
  }
  return out;
}

FrameTargets parse_targets(std::string_view text)
{
  LineReader reader(text);
  if (reader.expect("magic") != kTargetsMagic) {
    throw ValueError(std::string("not a ") + kTargetsMagic + " file");
  }
  FrameTargets frame;
  const auto frame_line = tokens_of(reader.expect("frame"));
  if (frame_line.size() != 2 || frame_line[0] != "frame") {
    throw ValueError("expected 'frame <id>' header line");
  }
  frame.frame_id = frame_line[1];
  const std::size_t n = header_count(reader, "proposals");
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = tokens_of(reader.expect("assignment line"));
    if (f.size() != 5 || f[0] != "a") {
      throw ValueError("malformed assignment line " + std::to_string(i));
    }
    TargetAssignment a;
    a.proposal_index = static_cast<std::uint32_t>(token_double(f[1], "assignment"));
    if (f[2] == "pos") {
      a.label = ProposalLabel::kPositive;
    } else if (f[2] == "neg") {
      a.label = ProposalLabel::kNegative;
    } else if (f[2] == "ign") {
      a.label = ProposalLabel::kIgnored;
    } else {
      throw ValueError("unknown assignment label " + f[2]);
    }
    a.matched_gt = static_cast<std::int32_t>(token_double(f[3], "assignment"));
    a.points_iou = token_double(f[4], "assignment");
    frame.assignments.push_back(a);
  }
  const auto mb = tokens_of(reader.expect("minibatch line"));
  if (mb.empty() || mb[0] != "m") {
    throw ValueError("expected minibatch line");
  }
  for (std::size_t i = 1; i < mb.size(); ++i) {
    frame.minibatch.push_back(static_cast<std::uint32_t>(token_double(mb[i], "minibatch")));
  }
  std::string line;
  while (reader.next(line)) {
    if (line.empty()) {
      continue;
    }
    const auto f = tokens_of(line);
    if (f.size() != 14 || f[0] != "t") {
      throw ValueError("malformed target line");
    }
    PositiveTarget t;
    t.proposal_index = static_cast<std::uint32_t>(token_double(f[1], "target"));
    t.gt_index = static_cast<std::uint32_t>(token_double(f[2], "target"));
    t.target.v_ctr =
      Vec3{token_double(f[3], "target"), token_double(f[4], "target"), token_double(f[5], "target")};
    t.target.v_ctr_star =
      Vec3{token_double(f[6], "target"), token_double(f[7], "target"), token_double(f[8], "target")};
    t.target.v_size_star = {
      token_double(f[9], "target"), token_double(f[10], "target"), token_double(f[11], "target")};
    t.target.angle_bin = static_cast<int>(token_double(f[12], "target"));
    t.target.angle_residual = token_double(f[13], "target");
    frame.targets.push_back(t);
  }
  return frame;
}

std::vector<Detection> parse_detections(std::string_view text)
{
  std::vector<Detection> out;
  std::istringstream stream{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
      continue;
    }
    const auto f = tokens_of(line);
    if (f.size() < 16) {
      throw FieldCountError(
        "detection line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
        " fields, expected >= 16");
    }
    Detection det;
    det.class_name = f[0];
    const double h = token_double(f[8], "detection");
    const double w = token_double(f[9], "detection");
    const double l = token_double(f[10], "detection");
    const double x = token_double(f[11], "detection");
    const double y = token_double(f[12], "detection");
    const double z = token_double(f[13], "detection");
    const double yaw = token_double(f[14], "detection");
    det.box = Box3D(Vec3{x, y - h / 2.0, z}, l, h, w, yaw);
    det.score = token_double(f[15], "detection");
    out.push_back(std::move(det));
  }
  return out;
}

std::string serialize_detections(std::span<const Detection> detections)
{
  std::string out;
  for (const Detection & det : detections) {
    out += det.class_name;
    out += " 0 0 0 0 0 0 0";  // truncation, occlusion, alpha, 2D bbox
    append_double(out, det.box.h);
    append_double(out, det.box.w);
    append_double(out, det.box.l);
    append_double(out, det.box.center.x);
    append_double(out, det.box.center.y + det.box.h / 2.0);
    append_double(out, det.box.center.z);
    append_double(out, det.box.yaw);
    append_double(out, det.score);
    out += '\n';
  }
  return out;
}

}  // namespace pointdet
