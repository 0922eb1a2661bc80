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

#ifndef POINTDET_FORMATS_HPP_
#define POINTDET_FORMATS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pointdet/assignment.hpp"
#include "pointdet/encoding.hpp"
#include "pointdet/eval.hpp"
#include "pointdet/point_cloud.hpp"
#include "pointdet/proposal.hpp"

namespace pointdet
{

// Per-frame proposal file, line-delimited text with a versioned header:
//
//   pointdet.proposals.v1
//   frame <id>
//   points <N>
//   proposals <K>
//   p <x> <y> <z> <r> <score> <fg>          one line per selected point
//   r <seed> <score> <cx> <cy> <cz> <l> <h> <w> <yaw>    one line per proposal
//
// Floats are %.17g so parse(serialize(x)) is bit-exact. Interior sets are
// derived data and deliberately not stored.
struct FrameProposals
{
  std::string frame_id;
  PointCloud cloud;  // the selected points, camera frame, scores attached
  std::vector<std::uint8_t> is_foreground;
  std::vector<Proposal> proposals;  // interiors left empty
};

std::string serialize_proposals(const FrameProposals & frame);
FrameProposals parse_proposals(std::string_view text);

// Per-frame assignment/target file:
//
//   pointdet.targets.v1
//   frame <id>
//   proposals <K>
//   a <index> <pos|neg|ign> <gt|-1> <points_iou>         one line per proposal
//   m <i0> <i1> ...                                      sampled minibatch
//   t <index> <gt> <v_ctr xyz> <v_ctr* xyz> <v_size* lhw> <bin> <res>
struct PositiveTarget
{
  std::uint32_t proposal_index = 0;
  std::uint32_t gt_index = 0;
  RegressionTarget target;
};

struct FrameTargets
{
  std::string frame_id;
  std::vector<TargetAssignment> assignments;
  std::vector<std::uint32_t> minibatch;
  std::vector<PositiveTarget> targets;
};

std::string serialize_targets(const FrameTargets & frame);
FrameTargets parse_targets(std::string_view text);

// KITTI-style detection lines: the 15 label fields plus a trailing score.
std::vector<Detection> parse_detections(std::string_view text);
std::string serialize_detections(std::span<const Detection> detections);

}  // namespace pointdet

#endif  // POINTDET_FORMATS_HPP_
