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

#include "pointdet/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pointdet/errors.hpp"

namespace pointdet
{

namespace
{

void append_cloud_point(PointCloud & dst, const PointCloud & src, std::size_t i)
{
  dst.xyz.push_back(src.xyz[i]);
  dst.reflectance.push_back(src.reflectance[i]);
  dst.scores.push_back(src.has_scores() ? src.scores[i] : 0.0);
}

}  // namespace

SelectedPoints select_positive_points(
  const PointCloud & scored_cloud, std::size_t n, double fg_threshold, Rng & rng)
{
  if (scored_cloud.empty()) {
    throw EmptyCloudError("cannot select points from an empty cloud");
  }
  std::vector<std::size_t> foreground;
  std::vector<std::size_t> background;
  for (std::size_t i = 0; i < scored_cloud.size(); ++i) {
    const double score = scored_cloud.has_scores() ? scored_cloud.scores[i] : 0.0;
    (score >= fg_threshold ? foreground : background).push_back(i);
  }

  std::vector<std::size_t> chosen;
  std::vector<std::uint8_t> flags;
  chosen.reserve(n);
  flags.reserve(n);
  if (foreground.size() >= n) {
    const auto pick = rng.sample_without_replacement(foreground.size(), n);
    for (const std::size_t k : pick) {
      chosen.push_back(foreground[k]);
      flags.push_back(1);
    }
  } else {
    for (const std::size_t i : foreground) {
      chosen.push_back(i);
      flags.push_back(1);
    }
    std::size_t need = n - foreground.size();
    const auto & pool = background.empty() ? foreground : background;
    const std::size_t without = std::min(need, pool.size());
    const auto pick = rng.sample_without_replacement(pool.size(), without);
    for (const std::size_t k : pick) {
      chosen.push_back(pool[k]);
      flags.push_back(0);
    }
    // Pool exhausted: keep the output at exactly n by drawing with replacement.
    for (std::size_t i = without; i < need; ++i) {
      chosen.push_back(pool[rng.uniform_below(pool.size())]);
      flags.push_back(0);
    }
  }

  SelectedPoints out;
  out.cloud.frame = scored_cloud.frame;
  for (const std::size_t i : chosen) {
    append_cloud_point(out.cloud, scored_cloud, i);
  }
  out.is_foreground = std::move(flags);
  out.foreground_count =
    static_cast<std::size_t>(std::count(out.is_foreground.begin(), out.is_foreground.end(), 1));
  return out;
}

std::vector<Proposal> seed_proposals(const SelectedPoints & points, const AnchorConfig & config)
{
  std::vector<Proposal> proposals;
  proposals.reserve(points.foreground_count * config.proposals_per_point());
  for (std::size_t i = 0; i < points.cloud.size(); ++i) {
    if (!points.is_foreground[i]) {
      continue;
    }
    const Vec3 seed = points.cloud.xyz[i];
    for (const auto & size : config.sizes) {
      for (const double yaw : config.yaws) {
        // The anchor's l axis in world coordinates.
        const Vec3 l_axis{std::cos(yaw), 0.0, -std::sin(yaw)};
        for (const double ratio : config.shift_ratios) {
          Proposal p;
          p.box = Box3D(seed + (ratio * size[0]) * l_axis, size[0], size[1], size[2], yaw);
          p.seed_index = static_cast<std::uint32_t>(i);
          proposals.push_back(std::move(p));
        }
      }
    }
  }
  return proposals;
}

void populate_interiors(std::vector<Proposal> & proposals, const PointGrid & grid)
{
  for (Proposal & p : proposals) {
    p.interior = grid.interior(p.box);
  }
}

Proposal align_proposal(const Proposal & proposal, const PointCloud & cloud, const PointGrid & grid)
{
  if (proposal.interior.empty()) {
    throw EmptyProposalError("cannot align a proposal with no interior points");
  }
  Vec3 centroid{};
  for (const std::uint32_t idx : proposal.interior) {
    centroid = centroid + cloud.xyz[idx];
  }
  centroid = (1.0 / static_cast<double>(proposal.interior.size())) * centroid;

  Proposal aligned = proposal;
  // Size already equals the anchor size the proposal was seeded with.
  aligned.box = Box3D(centroid, proposal.box.l, proposal.box.h, proposal.box.w, proposal.box.yaw);
  aligned.interior = grid.interior(aligned.box);
  aligned.aligned = true;
  return aligned;
}

bool align_until_stable(
  Proposal & proposal, const PointCloud & cloud, const PointGrid & grid, int max_rounds)
{
  if (proposal.interior.empty()) {
    return false;
  }
  for (int round = 0; round < max_rounds; ++round) {
    Vec3 centroid{};
    for (const std::uint32_t idx : proposal.interior) {
      centroid = centroid + cloud.xyz[idx];
    }
    centroid = (1.0 / static_cast<double>(proposal.interior.size())) * centroid;
    // Fixed point: an aligned box whose interior centroid is its center
    // cannot change anymore; its interior is already current.
    if (
      proposal.aligned && centroid.x == proposal.box.center.x &&
      centroid.y == proposal.box.center.y && centroid.z == proposal.box.center.z) {
      break;
    }
    proposal.box =
      Box3D(centroid, proposal.box.l, proposal.box.h, proposal.box.w, proposal.box.yaw);
    proposal.interior = grid.interior(proposal.box);
    proposal.aligned = true;
    if (proposal.interior.empty()) {
      return false;
    }
  }
  return true;
}

double score_proposal(const Proposal & proposal, std::span<const double> scores)
{
  double total = 0.0;
  for (const std::uint32_t idx : proposal.interior) {
    total += scores[idx];
  }
  return total;
}

std::vector<Proposal> align_and_score(
  std::vector<Proposal> proposals, const PointGrid & grid, std::span<const double> scores,
  int max_rounds)
{
  std::vector<Proposal> alive;
  alive.reserve(proposals.size());
  for (Proposal & p : proposals) {
    BoxStats stats = grid.stats(p.box, scores);
    if (stats.count == 0) {
      continue;
    }
    bool dead = false;
    for (int round = 0; round < max_rounds; ++round) {
      const Vec3 centroid = (1.0 / static_cast<double>(stats.count)) * stats.sum;
      if (
        p.aligned && centroid.x == p.box.center.x && centroid.y == p.box.center.y &&
        centroid.z == p.box.center.z) {
        break;  // fixed point: the box cannot move anymore
      }
      p.box = Box3D(centroid, p.box.l, p.box.h, p.box.w, p.box.yaw);
      p.aligned = true;
      stats = grid.stats(p.box, scores);
      if (stats.count == 0) {
        dead = true;
        break;
      }
    }
    if (dead) {
      continue;
    }
    p.score = stats.score_sum;
    alive.push_back(std::move(p));
  }
  return alive;
}

namespace
{

struct BevEntry
{
  BevPolygon poly;
  double area = 0.0;
  double xmin = 0.0, xmax = 0.0, zmin = 0.0, zmax = 0.0;
};

BevEntry make_entry(const Box3D & box)
{
  BevEntry e;
  e.poly = bev_polygon(box);
  e.area = e.poly.area();
  e.xmin = std::numeric_limits<double>::infinity();
  e.xmax = -e.xmin;
  e.zmin = e.xmin;
  e.zmax = -e.xmin;
  for (const BevPoint & p : e.poly.vertices) {
    e.xmin = std::min(e.xmin, p.x);
    e.xmax = std::max(e.xmax, p.x);
    e.zmin = std::min(e.zmin, p.z);
    e.zmax = std::max(e.zmax, p.z);
  }
  return e;
}

bool aabb_overlap(const BevEntry & a, const BevEntry & b)
{
  return a.xmin <= b.xmax && b.xmin <= a.xmax && a.zmin <= b.zmax && b.zmin <= a.zmax;
}

}  // namespace

std::vector<std::size_t> nms_bev_indices(
  std::span<const Box3D> boxes, std::span<const double> scores,
  std::span<const std::uint64_t> tiebreak, double iou_threshold, std::size_t max_keep)
{
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) {
      return scores[a] > scores[b];
    }
    if (tiebreak[a] != tiebreak[b]) {
      return tiebreak[a] < tiebreak[b];
    }
    return a < b;
  });

  std::vector<BevEntry> entries(boxes.size());
  std::vector<std::uint8_t> has_entry(boxes.size(), 0);
  auto entry = [&](std::size_t i) -> const BevEntry & {
    if (!has_entry[i]) {
      entries[i] = make_entry(boxes[i]);
      has_entry[i] = 1;
    }
    return entries[i];
  };

  std::vector<std::size_t> kept;
  for (const std::size_t candidate : order) {
    if (kept.size() >= max_keep) {
      break;
    }
    const BevEntry & ce = entry(candidate);
    bool suppressed = false;
    for (const std::size_t k : kept) {
      const BevEntry & ke = entry(k);
      if (!aabb_overlap(ce, ke)) {
        continue;
      }
      const double inter = polygon_intersection_area(ce.poly, ke.poly);
      const double uni = ce.area + ke.area - inter;
      const double iou = uni > 0.0 ? inter / uni : 0.0;
      if (iou > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      kept.push_back(candidate);
    }
  }
  return kept;
}

std::vector<Proposal> nms_bev(
  std::vector<Proposal> proposals, double iou_threshold, std::size_t max_keep)
{
  std::vector<Box3D> boxes;
  std::vector<double> scores;
  std::vector<std::uint64_t> tiebreak;
  boxes.reserve(proposals.size());
  scores.reserve(proposals.size());
  tiebreak.reserve(proposals.size());
  for (const Proposal & p : proposals) {
    boxes.push_back(p.box);
    scores.push_back(p.score);
    tiebreak.push_back(p.seed_index);
  }
  const auto kept = nms_bev_indices(boxes, scores, tiebreak, iou_threshold, max_keep);
  std::vector<Proposal> out;
  out.reserve(kept.size());
  for (const std::size_t i : kept) {
    out.push_back(std::move(proposals[i]));
  }
  return out;
}

}  // namespace pointdet
