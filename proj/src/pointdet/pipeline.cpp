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

#include "pointdet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pointdet/assignment.hpp"
#include "pointdet/encoding.hpp"
#include "pointdet/errors.hpp"
#include "pointdet/formats.hpp"
#include "pointdet/kitti_io.hpp"
#include "pointdet/point_grid.hpp"
#include "pointdet/selftest.hpp"

namespace fs = std::filesystem;

namespace pointdet
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> list_stems(const std::string & dir, const std::string & extension)
{
  std::vector<std::string> stems;
  if (!fs::is_directory(dir)) {
    return stems;
  }
  for (const auto & entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

// Runs fn(i) over [0, n), either inline or on a small worker pool. Frames are
// independent and fn captures its own error handling.
void parallel_frames(std::size_t n, int workers, const std::function<void(std::size_t)> & fn)
{
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) {
        return;
      }
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(workers, static_cast<int>(n));
  pool.reserve(count);
  for (int t = 0; t < count; ++t) {
    pool.emplace_back(drain);
  }
  for (auto & thread : pool) {
    thread.join();
  }
}

struct FrameOutcome
{
  std::string line;
  bool failed = false;
};

RunReport assemble_report(std::vector<FrameOutcome> outcomes, std::string summary_prefix)
{
  RunReport report;
  for (const FrameOutcome & outcome : outcomes) {
    report.text += outcome.line;
    report.text += '\n';
    ++report.frames_processed;
    if (outcome.failed) {
      ++report.frames_failed;
    }
  }
  report.text += summary_prefix + ": " + std::to_string(report.frames_processed) + " frames, " +
                 std::to_string(report.frames_failed) + " failed\n";
  report.status = report.frames_failed > 0 ? RunStatus::kPartialFailure : RunStatus::kOk;
  return report;
}

std::string format_fixed(double v, int digits)
{
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void validate_pipeline_config(const PipelineConfig & config)
{
  if (config.n_points == 0 || config.m_points == 0 || config.n_angle_bins <= 0) {
    throw ConfigError("n_points, m_points and n_angle_bins must be positive");
  }
  if (config.anchors.proposals_per_point() == 0) {
    throw ConfigError("anchor config must define at least one (size, yaw, shift)");
  }
  if (
    config.pointsiou_neg > config.pointsiou_pos || config.pointsiou_neg < 0.0 ||
    config.pointsiou_pos > 1.0) {
    throw ConfigError("PointsIoU thresholds must satisfy 0 <= neg <= pos <= 1");
  }
  if (config.classes.empty()) {
    throw ConfigError("class set must not be empty");
  }
}

}  // namespace

std::string read_file(const std::string & path)
{
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    throw IoError("cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

void write_file(const std::string & path, std::string_view contents)
{
  std::ofstream stream(path, std::ios::binary | std::ios::trunc);
  if (!stream) {
    throw IoError("cannot write " + path);
  }
  stream.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!stream) {
    throw IoError("short write to " + path);
  }
}

std::vector<std::string> list_frame_ids(const std::string & data_dir)
{
  return list_stems(data_dir + "/velodyne", ".bin");
}

namespace
{

std::vector<Box3D> matchable_boxes(const std::vector<GroundTruthLabel> & labels)
{
  std::vector<Box3D> boxes;
  for (const GroundTruthLabel & label : labels) {
    if (label.matchable) {
      boxes.push_back(label.box);
    }
  }
  return boxes;
}

FrameOutcome seed_one_frame(
  const PipelineConfig & config, const std::string & data_dir, const std::string & out_dir,
  const std::string & id)
{
  const PointCloud velo = parse_point_cloud(read_file(data_dir + "/velodyne/" + id + ".bin"));
  const Calibration calib = parse_calibration(read_file(data_dir + "/calib/" + id + ".txt"));
  const MaskImage mask = parse_mask_pgm(read_file(data_dir + "/masks/" + id + ".pgm"));
  std::vector<Box3D> gts;
  bool have_labels = false;
  const std::string label_path = data_dir + "/label_2/" + id + ".txt";
  if (fs::exists(label_path)) {
    gts = matchable_boxes(parse_labels(read_file(label_path), config.classes));
    have_labels = true;
  }

  const PointCloud camera = velo_to_camera(velo, calib);
  // Threshold 0 keeps every in-frustum point with its mask score attached;
  // positivity is decided against config.mask_threshold during selection.
  const PointCloud scored = mask_filter(camera, mask, calib, 0.0);

  FrameProposals out;
  out.frame_id = id;
  std::size_t seeded = 0;
  std::string note;
  if (!scored.empty()) {
    Rng rng(derive_seed(config.seed, "seed/" + id));
    SelectedPoints selected =
      select_positive_points(scored, config.n_points, config.mask_threshold, rng);
    const PointGrid grid(selected.cloud.xyz);
    std::vector<Proposal> proposals = seed_proposals(selected, config.anchors);
    seeded = proposals.size();
    std::vector<Proposal> alive =
      align_and_score(std::move(proposals), grid, selected.cloud.scores);
    out.proposals = nms_bev(std::move(alive), config.proposal_nms_iou, config.proposal_max_keep);
    for (Proposal & p : out.proposals) {
      p.interior = grid.interior(p.box);
    }
    out.cloud = std::move(selected.cloud);
    out.is_foreground = std::move(selected.is_foreground);
    if (selected.foreground_count == 0) {
      note = " WARNING: no foreground points";
    }
  } else {
    note = " WARNING: no points project into the mask image";
  }
  write_file(out_dir + "/" + id + ".txt", serialize_proposals(out));

  const std::size_t fg =
    static_cast<std::size_t>(std::count(out.is_foreground.begin(), out.is_foreground.end(), 1));
  std::string line = "frame " + id + ": foreground=" + std::to_string(fg) +
                     " seeded=" + std::to_string(seeded) +
                     " kept=" + std::to_string(out.proposals.size());
  if (have_labels) {
    std::vector<Box3D> kept_boxes;
    kept_boxes.reserve(out.proposals.size());
    for (const Proposal & p : out.proposals) {
      kept_boxes.push_back(p.box);
    }
    const double points_recall =
      compute_recall(kept_boxes, gts, out.cloud, MatchCriterion::kPointsIou, 0.5);
    const double box_recall =
      compute_recall(kept_boxes, gts, out.cloud, MatchCriterion::kBox3dIou, 0.5);
    line += " gts=" + std::to_string(gts.size()) +
            " recall@piou0.5=" + format_fixed(points_recall, 3) +
            " recall@biou0.5=" + format_fixed(box_recall, 3);
  }
  line += note;
  return {line, false};
}

}  // namespace

RunReport run_seed(
  const PipelineConfig & config, const std::string & data_dir, const std::string & out_dir)
{
  RunReport report;
  try {
    validate_pipeline_config(config);
    const auto ids = list_frame_ids(data_dir);
    if (ids.empty()) {
      throw ConfigError("no velodyne frames under " + data_dir);
    }
    fs::create_directories(out_dir);
    std::vector<FrameOutcome> outcomes(ids.size());
    parallel_frames(ids.size(), config.workers, [&](std::size_t i) {
      try {
        outcomes[i] = seed_one_frame(config, data_dir, out_dir, ids[i]);
      } catch (const std::exception & e) {
        outcomes[i] = {"frame " + ids[i] + ": ERROR " + e.what(), true};
      }
    });
    return assemble_report(std::move(outcomes), "seed");
  } catch (const std::exception & e) {
    report.status = RunStatus::kConfigError;
    report.text = std::string("error: ") + e.what() + "\n";
    return report;
  }
}

namespace
{

FrameOutcome assign_one_frame(
  const PipelineConfig & config, const std::string & data_dir,
  const std::string & proposals_dir, const std::string & out_dir, const std::string & id)
{
  FrameProposals frame = parse_proposals(read_file(proposals_dir + "/" + id + ".txt"));
  const auto labels = parse_labels(read_file(data_dir + "/label_2/" + id + ".txt"), config.classes);
  const std::vector<Box3D> gts = matchable_boxes(labels);

  const PointGrid grid(frame.cloud.xyz);
  for (Proposal & p : frame.proposals) {
    p.interior = grid.interior(p.box);
  }

  FrameTargets out;
  out.frame_id = id;
  out.assignments = assign_targets(
    frame.proposals, gts, frame.cloud, config.pointsiou_pos, config.pointsiou_neg);

  Rng rng(derive_seed(config.seed, "assign/" + id));
  out.minibatch =
    sample_minibatch(out.assignments, config.minibatch_size, config.minibatch_pos_fraction, rng);

  std::size_t n_pos = 0;
  std::size_t n_ign = 0;
  for (const TargetAssignment & a : out.assignments) {
    if (a.label == ProposalLabel::kPositive) {
      ++n_pos;
      PositiveTarget t;
      t.proposal_index = a.proposal_index;
      t.gt_index = static_cast<std::uint32_t>(a.matched_gt);
      // The center-shift stage is stubbed to zero in the offline pipeline.
      t.target = encode_targets(
        frame.proposals[a.proposal_index].box, Vec3{}, gts[t.gt_index], config.n_angle_bins);
      out.targets.push_back(t);
    } else if (a.label == ProposalLabel::kIgnored) {
      ++n_ign;
    }
  }
  write_file(out_dir + "/" + id + ".txt", serialize_targets(out));

  const std::size_t n_neg = out.assignments.size() - n_pos - n_ign;
  return {
    "frame " + id + ": pos=" + std::to_string(n_pos) + " neg=" + std::to_string(n_neg) +
      " ign=" + std::to_string(n_ign) + " minibatch=" + std::to_string(out.minibatch.size()),
    false};
}

}  // namespace

RunReport run_assign(
  const PipelineConfig & config, const std::string & data_dir, const std::string & proposals_dir,
  const std::string & out_dir)
{
  RunReport report;
  try {
    validate_pipeline_config(config);
    const auto ids = list_stems(proposals_dir, ".txt");
    if (ids.empty()) {
      throw ConfigError("no proposal files under " + proposals_dir);
    }
    fs::create_directories(out_dir);
    std::vector<FrameOutcome> outcomes(ids.size());
    parallel_frames(ids.size(), config.workers, [&](std::size_t i) {
      try {
        outcomes[i] = assign_one_frame(config, data_dir, proposals_dir, out_dir, ids[i]);
      } catch (const std::exception & e) {
        outcomes[i] = {"frame " + ids[i] + ": ERROR " + e.what(), true};
      }
    });
    return assemble_report(std::move(outcomes), "assign");
  } catch (const std::exception & e) {
    report.status = RunStatus::kConfigError;
    report.text = std::string("error: ") + e.what() + "\n";
    return report;
  }
}

namespace
{

enum class Tier
{
  kAll = 0,
  kEasy,
  kModerate,
  kHard,
};

const char * tier_name(Tier tier)
{
  switch (tier) {
    case Tier::kAll:
      return "all";
    case Tier::kEasy:
      return "easy";
    case Tier::kModerate:
      return "moderate";
    default:
      return "hard";
  }
}

// KITTI difficulty gates on projected height, occlusion and truncation.
bool label_in_tier(const GroundTruthLabel & label, Tier tier)
{
  const double height = label.bbox2d[3] - label.bbox2d[1];
  switch (tier) {
    case Tier::kAll:
      return true;
    case Tier::kEasy:
      return height >= 40.0 && label.occlusion <= 0 && label.truncation <= 0.15;
    case Tier::kModerate:
      return height >= 25.0 && label.occlusion <= 1 && label.truncation <= 0.30;
    default:
      return height >= 25.0 && label.occlusion <= 2 && label.truncation <= 0.50;
  }
}

// Bounded stub confidence for proposals evaluated without a trained head.
double stub_confidence(double segmentation_score_sum)
{
  return segmentation_score_sum / (1.0 + segmentation_score_sum);
}

std::string stub_class_for_box(const PipelineConfig & config, const Box3D & box)
{
  for (std::size_t i = 0; i < config.anchors.sizes.size(); ++i) {
    const auto & s = config.anchors.sizes[i];
    if (box.l == s[0] && box.h == s[1] && box.w == s[2]) {
      return config.classes[std::min(i, config.classes.size() - 1)];
    }
  }
  return config.classes.front();
}

struct EvalFrameData
{
  std::string id;
  // Post-NMS detections and tier-annotated ground truths, per class.
  std::vector<std::vector<Detection>> detections;
  std::vector<std::vector<GroundTruthLabel>> gts;
};

}  // namespace

RunReport run_eval(
  const PipelineConfig & config, const std::string & data_dir,
  const std::string & detections_dir, const std::string & proposals_dir,
  const std::string & records_path)
{
  RunReport report;
  try {
    validate_pipeline_config(config);
    if (detections_dir.empty() && proposals_dir.empty()) {
      throw ConfigError("eval needs a detections directory or a proposals directory");
    }
    const auto ids = list_stems(data_dir + "/label_2", ".txt");
    if (ids.empty()) {
      throw ConfigError("no label files under " + data_dir + "/label_2");
    }
    const std::string source_dir = detections_dir.empty() ? proposals_dir : detections_dir;
    std::string missing;
    for (const std::string & id : ids) {
      if (!fs::exists(source_dir + "/" + id + ".txt")) {
        missing += missing.empty() ? id : ", " + id;
      }
    }
    if (!missing.empty()) {
      throw ConfigError("frame ids without detections: " + missing);
    }

    const std::size_t n_classes = config.classes.size();
    std::vector<EvalFrameData> frames(ids.size());
    std::vector<std::string> frame_errors(ids.size());
    parallel_frames(ids.size(), config.workers, [&](std::size_t i) {
      try {
        EvalFrameData data;
        data.id = ids[i];
        data.detections.resize(n_classes);
        data.gts.resize(n_classes);

        const auto labels =
          parse_labels(read_file(data_dir + "/label_2/" + ids[i] + ".txt"), config.classes);
        for (const GroundTruthLabel & label : labels) {
          if (!label.matchable) {
            continue;
          }
          const auto it = std::find(config.classes.begin(), config.classes.end(), label.class_name);
          data.gts[it - config.classes.begin()].push_back(label);
        }

        std::vector<Detection> detections;
        if (!detections_dir.empty()) {
          detections = parse_detections(read_file(detections_dir + "/" + ids[i] + ".txt"));
        } else {
          const FrameProposals frame =
            parse_proposals(read_file(proposals_dir + "/" + ids[i] + ".txt"));
          for (const Proposal & p : frame.proposals) {
            Detection det;
            det.box = p.box;
            det.score = stub_confidence(p.score);
            det.class_name = stub_class_for_box(config, p.box);
            detections.push_back(std::move(det));
          }
        }

        // Post-process NMS per class; scores are classification confidences.
        for (std::size_t c = 0; c < n_classes; ++c) {
          std::vector<Box3D> boxes;
          std::vector<double> scores;
          std::vector<std::uint64_t> positions;
          std::vector<const Detection *> members;
          for (const Detection & det : detections) {
            if (det.class_name == config.classes[c]) {
              boxes.push_back(det.box);
              scores.push_back(det.score);
              positions.push_back(members.size());
              members.push_back(&det);
            }
          }
          const auto kept = nms_bev_indices(
            boxes, scores, positions, config.post_nms_iou, boxes.size());
          for (const std::size_t k : kept) {
            data.detections[c].push_back(*members[k]);
          }
        }
        frames[i] = std::move(data);
      } catch (const std::exception & e) {
        frame_errors[i] = e.what();
      }
    });

    std::vector<FrameOutcome> outcomes(ids.size());
    std::string records;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!frame_errors[i].empty()) {
        outcomes[i] = {"frame " + ids[i] + ": ERROR " + frame_errors[i], true};
        continue;
      }
      std::size_t n_det = 0;
      std::size_t n_gt = 0;
      nlohmann::json record;
      record["frame"] = ids[i];
      for (std::size_t c = 0; c < n_classes; ++c) {
        n_det += frames[i].detections[c].size();
        n_gt += frames[i].gts[c].size();
        nlohmann::json cls;
        cls["n_gt"] = frames[i].gts[c].size();
        cls["detections"] = nlohmann::json::array();
        for (const Detection & det : frames[i].detections[c]) {
          double best_3d = 0.0;
          double best_bev = 0.0;
          for (const GroundTruthLabel & gt : frames[i].gts[c]) {
            best_3d = std::max(best_3d, iou_3d(det.box, gt.box));
            best_bev = std::max(best_bev, bev_iou(det.box, gt.box));
          }
          cls["detections"].push_back(
            {{"score", det.score}, {"iou_3d", best_3d}, {"iou_bev", best_bev}});
        }
        record["classes"][config.classes[c]] = std::move(cls);
      }
      records += record.dump();
      records += '\n';
      outcomes[i] = {
        "frame " + ids[i] + ": gts=" + std::to_string(n_gt) +
          " detections=" + std::to_string(n_det),
        false};
    }
    if (!records_path.empty()) {
      write_file(records_path, records);
    }

    report = assemble_report(std::move(outcomes), "eval");

    // Summary table over pooled frames.
    report.text += "class      tier       AP_3D   AP_BEV  recall  n_gt\n";
    for (std::size_t c = 0; c < n_classes; ++c) {
      for (const Tier tier : {Tier::kAll, Tier::kEasy, Tier::kModerate, Tier::kHard}) {
        std::vector<EvalFrame> pooled;
        std::size_t tier_gts = 0;
        std::size_t matched = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (!frame_errors[i].empty()) {
            continue;
          }
          EvalFrame ef;
          ef.detections = frames[i].detections[c];
          for (const GroundTruthLabel & gt : frames[i].gts[c]) {
            ef.gts.push_back(gt.box);
            const bool active = label_in_tier(gt, tier);
            ef.gt_ignored.push_back(active ? 0 : 1);
            if (active) {
              ++tier_gts;
              for (const Detection & det : ef.detections) {
                if (iou_3d(det.box, gt.box) >= config.eval_iou_threshold) {
                  ++matched;
                  break;
                }
              }
            }
          }
          pooled.push_back(std::move(ef));
        }
        const double ap3d = compute_ap_pooled(
          pooled, config.eval_iou_threshold, IouKind::k3d, config.eval_forty_point);
        const double apbev = compute_ap_pooled(
          pooled, config.eval_iou_threshold, IouKind::kBev, config.eval_forty_point);
        const double recall =
          tier_gts == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(tier_gts);
        char row[160];
        std::snprintf(
          row, sizeof(row), "%-10s %-10s %6.4f  %6.4f  %6.4f  %zu\n", config.classes[c].c_str(),
          tier_name(tier), ap3d, apbev, recall, tier_gts);
        report.text += row;
      }
    }
    return report;
  } catch (const std::exception & e) {
    report.status = RunStatus::kConfigError;
    report.text = std::string("error: ") + e.what() + "\n";
    return report;
  }
}

namespace
{

double median(std::vector<double> values)
{
  std::sort(values.begin(), values.end());
  return values.empty() ? 0.0 : values[values.size() / 2];
}

}  // namespace

RunReport run_bench(const PipelineConfig & config, int repetitions)
{
  RunReport report;
  try {
    validate_pipeline_config(config);
    const int reps = std::max(1, repetitions);

    SceneSpec spec;
    spec.min_objects = 10;
    spec.max_objects = 10;
    spec.min_points_per_object = 1000;
    spec.max_points_per_object = 1000;
    spec.background_points = 5000;
    spec.seed = config.seed;
    const SyntheticScene scene = generate_scene(spec);

    std::vector<double> seed_rates;
    std::vector<double> nms_times;
    std::vector<double> frame_times;
    std::size_t seeded_count = 0;
    std::size_t kept_count = 0;
    for (int rep = 0; rep < reps; ++rep) {
      const auto frame_start = Clock::now();
      Rng rng(derive_seed(config.seed, "bench"));
      SelectedPoints selected =
        select_positive_points(scene.cloud, config.n_points, config.mask_threshold, rng);
      const PointGrid grid(selected.cloud.xyz);

      const auto seed_start = Clock::now();
      std::vector<Proposal> proposals = seed_proposals(selected, config.anchors);
      const double seed_elapsed = seconds_since(seed_start);
      seeded_count = proposals.size();
      seed_rates.push_back(static_cast<double>(proposals.size()) / seed_elapsed);

      std::vector<Proposal> alive =
        align_and_score(std::move(proposals), grid, selected.cloud.scores);
      const auto nms_start = Clock::now();
      const auto kept = nms_bev(std::move(alive), config.proposal_nms_iou, config.proposal_max_keep);
      nms_times.push_back(seconds_since(nms_start));
      kept_count = kept.size();
      frame_times.push_back(seconds_since(frame_start));
    }

    // Rotated-IoU kernel throughput.
    Rng rng(derive_seed(config.seed, "bench/iou"));
    std::vector<Box3D> pairs;
    for (int i = 0; i < 2000; ++i) {
      pairs.push_back(Box3D(
        Vec3{rng.uniform(-3, 3), 0.0, rng.uniform(-3, 3)}, rng.uniform(0.5, 5.0), 1.6,
        rng.uniform(0.5, 5.0), rng.uniform(-kPi, kPi)));
    }
    const auto iou_start = Clock::now();
    double checksum = 0.0;
    constexpr int kIouRounds = 50;
    for (int round = 0; round < kIouRounds; ++round) {
      for (std::size_t i = 0; i + 1 < pairs.size(); i += 2) {
        checksum += bev_iou(pairs[i], pairs[i + 1]);
      }
    }
    const double iou_elapsed = seconds_since(iou_start);
    const double iou_pairs = kIouRounds * (pairs.size() / 2.0);

    // End-to-end frame throughput, single- and multi-worker.
    const auto measure_frames = [&](int workers, int frames) {
      const auto start = Clock::now();
      parallel_frames(frames, workers, [&](std::size_t f) {
        Rng frame_rng(derive_seed(config.seed, "bench/frame" + std::to_string(f)));
        SelectedPoints sel =
          select_positive_points(scene.cloud, config.n_points, config.mask_threshold, frame_rng);
        const PointGrid g(sel.cloud.xyz);
        std::vector<Proposal> props = seed_proposals(sel, config.anchors);
        std::vector<Proposal> ok = align_and_score(std::move(props), g, sel.cloud.scores);
        nms_bev(std::move(ok), config.proposal_nms_iou, config.proposal_max_keep);
      });
      return frames / seconds_since(start);
    };
    const double fps_single = measure_frames(1, 2);
    const double fps_multi = measure_frames(std::max(config.workers, 2), 4);

    std::ostringstream out;
    out << "bench.scene_objects: " << scene.gts.size() << '\n';
    out << "bench.scene_points: " << scene.cloud.size() << '\n';
    out << "bench.seeded_proposals: " << seeded_count << '\n';
    out << "bench.kept_proposals: " << kept_count << '\n';
    out << "bench.repetitions: " << reps << '\n';
    out << "bench.seed_proposals_per_s: " << format_fixed(median(seed_rates), 0) << '\n';
    out << "bench.nms_seconds: " << format_fixed(median(nms_times), 4) << '\n';
    out << "bench.frame_seconds: " << format_fixed(median(frame_times), 4) << '\n';
    out << "bench.bev_iou_pairs_per_s: " << format_fixed(iou_pairs / iou_elapsed, 0) << '\n';
    out << "bench.frames_per_s_single: " << format_fixed(fps_single, 3) << '\n';
    out << "bench.frames_per_s_workers: " << format_fixed(fps_multi, 3) << '\n';
    out << "bench.checksum: " << format_fixed(checksum, 3) << '\n';
    report.text = out.str();
    report.frames_processed = reps;
    return report;
  } catch (const std::exception & e) {
    report.status = RunStatus::kConfigError;
    report.text = std::string("error: ") + e.what() + "\n";
    return report;
  }
}

RunReport run_selftest_report()
{
  RunReport report;
  const auto results = run_selftest();
  bool all_passed = true;
  for (const SelftestResult & result : results) {
    report.text += result.passed ? "PASS " : "FAIL ";
    report.text += result.category + ": " + result.detail + "\n";
    all_passed = all_passed && result.passed;
  }
  report.text += all_passed ? "selftest: all suites passed\n" : "selftest: FAILURES present\n";
  report.status = all_passed ? RunStatus::kOk : RunStatus::kSelftestFailure;
  return report;
}

namespace
{

// Fixed synthetic rig: KITTI-sized image and a round-number pinhole.
constexpr int kSynthImageWidth = 1242;
constexpr int kSynthImageHeight = 375;
constexpr double kSynthFocal = 707.0;
constexpr double kSynthCx = 604.0;
constexpr double kSynthCy = 180.0;

std::string synth_calib_text()
{
  std::ostringstream out;
  out << "P2: " << kSynthFocal << " 0 " << kSynthCx << " 0 0 " << kSynthFocal << " " << kSynthCy
      << " 0 0 0 1 0\n";
  out << "R0_rect: 1 0 0 0 1 0 0 0 1\n";
  out << "Tr_velo_to_cam: 1 0 0 0 0 1 0 0 0 0 1 0\n";
  return out.str();
}

}  // namespace

void write_synthetic_dataset(
  const std::string & dir, std::size_t n_frames, const SceneSpec & spec, std::uint64_t seed)
{
  fs::create_directories(dir + "/velodyne");
  fs::create_directories(dir + "/calib");
  fs::create_directories(dir + "/label_2");
  fs::create_directories(dir + "/masks");
  const std::string calib_text = synth_calib_text();

  for (std::size_t f = 0; f < n_frames; ++f) {
    char id[24];
    std::snprintf(id, sizeof(id), "%06zu", f);

    SceneSpec frame_spec = spec;
    frame_spec.seed = derive_seed(seed, std::string("scene/") + id);
    const SyntheticScene scene = generate_scene(frame_spec);

    // Identity extrinsics: the synthetic "velodyne" frame is the camera frame.
    write_file(dir + "/velodyne/" + id + ".bin", serialize_point_cloud(scene.cloud));
    write_file(dir + "/calib/" + id + ".txt", calib_text);

    std::vector<GroundTruthLabel> labels;
    for (const Box3D & gt : scene.gts) {
      GroundTruthLabel label;
      label.class_name = "Car";
      label.box = gt;
      double umin = kSynthImageWidth, umax = 0.0, vmin = kSynthImageHeight, vmax = 0.0;
      for (const Vec3 & corner : box_corners(gt)) {
        const double u = kSynthCx + kSynthFocal * corner.x / corner.z;
        const double v = kSynthCy + kSynthFocal * corner.y / corner.z;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      label.bbox2d = {
        std::max(0.0, umin), std::max(0.0, vmin),
        std::min<double>(kSynthImageWidth - 1, umax), std::min<double>(kSynthImageHeight - 1, vmax)};
      labels.push_back(std::move(label));
    }
    write_file(dir + "/label_2/" + id + ".txt", serialize_labels(labels));

    MaskImage mask;
    mask.width = kSynthImageWidth;
    mask.height = kSynthImageHeight;
    mask.pixels.assign(static_cast<std::size_t>(mask.width) * mask.height, 0);
    for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
      if (scene.cloud.scores[i] < 1.0) {
        continue;
      }
      const Vec3 & p = scene.cloud.xyz[i];
      const int px = static_cast<int>(std::floor(kSynthCx + kSynthFocal * p.x / p.z));
      const int py = static_cast<int>(std::floor(kSynthCy + kSynthFocal * p.y / p.z));
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = px + dx;
          const int y = py + dy;
          if (x >= 0 && x < mask.width && y >= 0 && y < mask.height) {
            mask.pixels[static_cast<std::size_t>(y) * mask.width + x] = 255;
          }
        }
      }
    }
    write_file(dir + "/masks/" + id + ".pgm", serialize_mask_pgm(mask));
  }
}

}  // namespace pointdet
