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
#include <unistd.h>

#include <filesystem>
#include <map>

#include "doctest.h"
#include "pointdet/config.hpp"
#include "pointdet/errors.hpp"
#include "pointdet/formats.hpp"
#include "pointdet/kitti_io.hpp"
#include "pointdet/pipeline.hpp"
#include "test_util.hpp"

using namespace pointdet;
namespace fs = std::filesystem;

namespace
{

struct TempDir
{
  fs::path path;
  explicit TempDir(const std::string & tag)
  {
    path = fs::temp_directory_path() / ("pointdet_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::map<std::string, std::string> snapshot_dir(const fs::path & dir)
{
  std::map<std::string, std::string> out;
  for (const auto & entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      out[fs::relative(entry.path(), dir).string()] = read_file(entry.path().string());
    }
  }
  return out;
}

SceneSpec small_scene_spec()
{
  SceneSpec spec;
  spec.min_objects = 4;
  spec.max_objects = 6;
  spec.min_points_per_object = 120;
  spec.max_points_per_object = 200;
  spec.background_points = 1500;
  return spec;
}

PipelineConfig small_config()
{
  PipelineConfig config = default_config("car");
  config.n_points = 1500;
  config.minibatch_size = 32;
  config.seed = 12;
  return config;
}

}  // namespace

TEST_CASE("config presets carry the published operating points")
{
  const PipelineConfig car = default_config("car");
  CHECK(car.n_points == 10000);
  CHECK(car.pointsiou_pos == 0.55);
  CHECK(car.eval_iou_threshold == 0.7);
  REQUIRE(car.anchors.sizes.size() == 1);
  CHECK(car.anchors.sizes[0][0] == 3.9);
  CHECK(car.anchors.proposals_per_point() == 6);

  const PipelineConfig pedcyc = default_config("pedcyc");
  CHECK(pedcyc.n_points == 5000);
  CHECK(pedcyc.pointsiou_pos == 0.5);
  CHECK(pedcyc.eval_iou_threshold == 0.5);
  CHECK(pedcyc.anchors.sizes.size() == 2);

  CHECK_THROWS_AS(default_config("boat"), ConfigError);
}

TEST_CASE("config keys set, get and serialize consistently")
{
  PipelineConfig config = default_config("car");
  config_set(config, "n_points", "1234");
  CHECK(config.n_points == 1234);
  CHECK(config_get(config, "n_points") == "1234");

  config_set(config, "anchor_sizes", "1.5,1.0,0.5;2.5,2.0,1.5");
  REQUIRE(config.anchors.sizes.size() == 2);
  CHECK(config.anchors.sizes[1][2] == 1.5);

  config_set(config, "aug_scale_max", "1.25");
  CHECK(config.augmentation.scale_max == 1.25);

  CHECK_THROWS_AS(config_set(config, "bogus_key", "1"), ConfigError);
  CHECK_THROWS_AS(config_set(config, "n_points", "many"), ConfigError);
  CHECK_THROWS_AS(config_get(config, "bogus_key"), ConfigError);

  // Text round trip: dump then re-apply reproduces every value.
  const std::string dump = config_to_text(config);
  PipelineConfig other = default_config("car");
  apply_config_text(other, dump);
  CHECK(config_to_text(other) == dump);

  PipelineConfig commented = default_config("car");
  apply_config_text(commented, "# comment\n  n_points = 99  # trailing\n\nseed=7\n");
  CHECK(commented.n_points == 99);
  CHECK(commented.seed == 7);
  CHECK_THROWS_AS(apply_config_text(commented, "oops\n"), ConfigError);
}

TEST_CASE("proposal files serialize and parse losslessly")
{
  Rng rng(167);
  FrameProposals frame;
  frame.frame_id = "000042";
  frame.cloud = testutil::random_cloud(rng, 50);
  frame.cloud.scores.assign(50, 0.0);
  for (int i = 0; i < 20; ++i) {
    frame.cloud.scores[i] = rng.uniform01();
  }
  frame.is_foreground.assign(50, 0);
  for (int i = 0; i < 20; ++i) {
    frame.is_foreground[i] = 1;
  }
  for (int i = 0; i < 7; ++i) {
    Proposal p;
    p.box = testutil::random_rect(rng);
    p.seed_index = static_cast<std::uint32_t>(i);
    p.score = rng.uniform(0.0, 30.0);
    frame.proposals.push_back(p);
  }

  const std::string text = serialize_proposals(frame);
  const FrameProposals back = parse_proposals(text);
  CHECK(back.frame_id == frame.frame_id);
  REQUIRE(back.cloud.size() == frame.cloud.size());
  REQUIRE(back.proposals.size() == frame.proposals.size());
  for (std::size_t i = 0; i < frame.cloud.size(); ++i) {
    CHECK(back.cloud.xyz[i].x == frame.cloud.xyz[i].x);  // %.17g round trip
    CHECK(back.cloud.scores[i] == frame.cloud.scores[i]);
    CHECK(back.is_foreground[i] == frame.is_foreground[i]);
  }
  for (std::size_t i = 0; i < frame.proposals.size(); ++i) {
    CHECK(back.proposals[i].box.yaw == frame.proposals[i].box.yaw);
    CHECK(back.proposals[i].score == frame.proposals[i].score);
    CHECK(back.proposals[i].seed_index == frame.proposals[i].seed_index);
  }
  CHECK(serialize_proposals(back) == text);

  CHECK_THROWS_AS(parse_proposals("not a proposals file"), ValueError);
}

TEST_CASE("target files serialize and parse losslessly")
{
  FrameTargets frame;
  frame.frame_id = "000007";
  for (int i = 0; i < 5; ++i) {
    TargetAssignment a;
    a.proposal_index = static_cast<std::uint32_t>(i);
    a.label = i == 0   ? ProposalLabel::kPositive
              : i == 4 ? ProposalLabel::kIgnored
                       : ProposalLabel::kNegative;
    a.matched_gt = i == 0 ? 2 : -1;
    a.points_iou = 0.125 * i;
    frame.assignments.push_back(a);
  }
  frame.minibatch = {0, 1, 3};
  PositiveTarget t;
  t.proposal_index = 0;
  t.gt_index = 2;
  t.target.v_ctr = Vec3{0.5, -0.25, 1.75};
  t.target.v_ctr_star = t.target.v_ctr;
  t.target.v_size_star = {0.1, -0.05, 0.0};
  t.target.angle_bin = 9;
  t.target.angle_residual = -0.21;
  frame.targets.push_back(t);

  const std::string text = serialize_targets(frame);
  const FrameTargets back = parse_targets(text);
  CHECK(back.frame_id == frame.frame_id);
  CHECK(back.minibatch == frame.minibatch);
  REQUIRE(back.assignments.size() == 5);
  CHECK(back.assignments[0].label == ProposalLabel::kPositive);
  CHECK(back.assignments[0].matched_gt == 2);
  CHECK(back.assignments[4].label == ProposalLabel::kIgnored);
  REQUIRE(back.targets.size() == 1);
  CHECK(back.targets[0].target.angle_bin == 9);
  CHECK(back.targets[0].target.angle_residual == -0.21);
  CHECK(serialize_targets(back) == text);
}

TEST_CASE("detection files parse the KITTI-plus-score layout")
{
  std::vector<Detection> dets(2);
  dets[0].box = Box3D(Vec3{1, 0.2, 20}, 3.9, 1.6, 1.6, 0.4);
  dets[0].score = 0.9;
  dets[0].class_name = "Car";
  dets[1].box = Box3D(Vec3{-4, 0.1, 35}, 3.9, 1.6, 1.6, -1.2);
  dets[1].score = 0.4;
  dets[1].class_name = "Car";

  const std::string text = serialize_detections(dets);
  const auto back = parse_detections(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].score == 0.9);
  // The bottom-center detour costs at most an ulp on the center.
  CHECK(back[0].box.center.y == doctest::Approx(dets[0].box.center.y).epsilon(1e-12));
  CHECK(back[1].box.yaw == dets[1].box.yaw);

  CHECK_THROWS_AS(parse_detections("Car 0 0 0 0 0 0 0 1 1 1 0 0 0 0\n"), FieldCountError);
}

TEST_CASE("synthetic dataset layout feeds the whole pipeline")
{
  TempDir tmp("e2e");
  const std::string data = tmp.str() + "/data";
  write_synthetic_dataset(data, 2, small_scene_spec(), 31);

  CHECK(fs::exists(data + "/velodyne/000000.bin"));
  CHECK(fs::exists(data + "/calib/000001.txt"));
  CHECK(fs::exists(data + "/label_2/000000.txt"));
  CHECK(fs::exists(data + "/masks/000001.pgm"));
  CHECK(list_frame_ids(data) == std::vector<std::string>{"000000", "000001"});

  const PipelineConfig config = small_config();
  const RunReport seed_report = run_seed(config, data, tmp.str() + "/proposals");
  CHECK(seed_report.status == RunStatus::kOk);
  CHECK(seed_report.frames_processed == 2);
  CHECK(seed_report.frames_failed == 0);
  CHECK(seed_report.text.find("recall@piou0.5") != std::string::npos);

  const FrameProposals frame =
    parse_proposals(read_file(tmp.str() + "/proposals/000000.txt"));
  CHECK(frame.cloud.size() == config.n_points);
  CHECK(!frame.proposals.empty());
  CHECK(frame.proposals.size() <= config.proposal_max_keep);

  const RunReport assign_report =
    run_assign(config, data, tmp.str() + "/proposals", tmp.str() + "/targets");
  CHECK(assign_report.status == RunStatus::kOk);
  const FrameTargets targets = parse_targets(read_file(tmp.str() + "/targets/000000.txt"));
  CHECK(targets.assignments.size() == frame.proposals.size());
  CHECK(targets.minibatch.size() == config.minibatch_size);
  std::size_t positives = 0;
  for (const TargetAssignment & a : targets.assignments) {
    if (a.label == ProposalLabel::kPositive) {
      ++positives;
    }
  }
  CHECK(positives > 0);
  CHECK(targets.targets.size() == positives);

  // Evaluating stub detections built from the proposals.
  const RunReport eval_report =
    run_eval(config, data, "", tmp.str() + "/proposals", tmp.str() + "/records.jsonl");
  CHECK(eval_report.status == RunStatus::kOk);
  CHECK(eval_report.text.find("class") != std::string::npos);
  CHECK(fs::exists(tmp.str() + "/records.jsonl"));
}

TEST_CASE("seed and assign are deterministic across runs and worker counts")
{
  TempDir tmp("det");
  const std::string data = tmp.str() + "/data";
  write_synthetic_dataset(data, 3, small_scene_spec(), 77);

  PipelineConfig config = small_config();
  auto run_once = [&](const std::string & suffix, int workers) {
    config.workers = workers;
    REQUIRE(run_seed(config, data, tmp.str() + "/p" + suffix).status == RunStatus::kOk);
    REQUIRE(
      run_assign(config, data, tmp.str() + "/p" + suffix, tmp.str() + "/t" + suffix).status ==
      RunStatus::kOk);
    auto merged = snapshot_dir(tmp.str() + "/p" + suffix);
    for (auto & [k, v] : snapshot_dir(tmp.str() + "/t" + suffix)) {
      merged["targets/" + k] = std::move(v);
    }
    return merged;
  };

  const auto first = run_once("1", 1);
  const auto second = run_once("2", 1);
  const auto threaded = run_once("3", 8);
  CHECK(first == second);
  CHECK(first == threaded);
}

TEST_CASE("per-frame errors are reported and skipped")
{
  TempDir tmp("err");
  const std::string data = tmp.str() + "/data";
  write_synthetic_dataset(data, 2, small_scene_spec(), 55);
  fs::remove(data + "/calib/000001.txt");

  const RunReport report = run_seed(small_config(), data, tmp.str() + "/out");
  CHECK(report.status == RunStatus::kPartialFailure);
  CHECK(report.frames_failed == 1);
  CHECK(report.text.find("ERROR") != std::string::npos);
  CHECK(fs::exists(tmp.str() + "/out/000000.txt"));
  CHECK_FALSE(fs::exists(tmp.str() + "/out/000001.txt"));
}

TEST_CASE("eval with oracle and empty detections")
{
  TempDir tmp("eval");
  const std::string data = tmp.str() + "/data";
  write_synthetic_dataset(data, 2, small_scene_spec(), 91);

  // Oracle detections: the labels themselves with score 1.
  const std::string oracle_dir = tmp.str() + "/oracle";
  const std::string empty_dir = tmp.str() + "/empty";
  fs::create_directories(oracle_dir);
  fs::create_directories(empty_dir);
  for (const std::string & id : list_frame_ids(data)) {
    const auto labels = parse_labels(read_file(data + "/label_2/" + id + ".txt"), {"Car"});
    std::vector<Detection> dets;
    for (const auto & label : labels) {
      Detection d;
      d.box = label.box;
      d.score = 1.0;
      d.class_name = "Car";
      dets.push_back(d);
    }
    write_file(oracle_dir + "/" + id + ".txt", serialize_detections(dets));
    write_file(empty_dir + "/" + id + ".txt", "");
  }

  const PipelineConfig config = small_config();
  const RunReport perfect = run_eval(config, data, oracle_dir, "", "");
  CHECK(perfect.status == RunStatus::kOk);
  // Every class/tier row reports AP 1.0 for both IoU kinds.
  std::size_t rows = 0;
  std::istringstream stream(perfect.text);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.rfind("Car", 0) == 0) {
      ++rows;
      CHECK(line.find("1.0000  1.0000") != std::string::npos);
    }
  }
  CHECK(rows == 4);  // all, easy, moderate, hard

  const RunReport zero = run_eval(config, data, empty_dir, "", "");
  CHECK(zero.status == RunStatus::kOk);
  std::istringstream zstream(zero.text);
  while (std::getline(zstream, line)) {
    if (line.rfind("Car", 0) == 0 && line.find(" all ") != std::string::npos) {
      CHECK(line.find("0.0000  0.0000") != std::string::npos);
    }
  }

  // Mismatched frame sets are a hard error naming the missing ids.
  fs::remove(oracle_dir + "/000001.txt");
  const RunReport missing = run_eval(config, data, oracle_dir, "", "");
  CHECK(missing.status == RunStatus::kConfigError);
  CHECK(missing.text.find("000001") != std::string::npos);
}

TEST_CASE("bench produces a stable key set")
{
  PipelineConfig config = default_config("car");
  config.n_points = 2000;
  const RunReport report = run_bench(config, 1);
  CHECK(report.status == RunStatus::kOk);
  for (const char * key :
       {"bench.scene_objects:", "bench.seeded_proposals:", "bench.seed_proposals_per_s:",
        "bench.nms_seconds:", "bench.bev_iou_pairs_per_s:", "bench.frames_per_s_single:",
        "bench.frames_per_s_workers:"}) {
    CHECK(report.text.find(key) != std::string::npos);
  }
}
