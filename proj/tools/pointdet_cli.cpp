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

// Command-line front end. Everything goes through the shared library's C
// API; this translation unit holds no pipeline logic of its own.

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pointdet/pointdet.h"

namespace
{

// Keys come from the library itself so the flag set can never drift.
std::vector<std::string> config_key_names()
{
  pointdet_config * config = nullptr;
  std::vector<std::string> keys;
  if (pointdet_config_new("car", &config) != POINTDET_OK) {
    return keys;
  }
  char * dump = nullptr;
  if (pointdet_config_dump(config, &dump) == POINTDET_OK) {
    std::istringstream stream(dump);
    std::string line;
    while (std::getline(stream, line)) {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) {
        keys.push_back(line.substr(0, eq));
      }
    }
    pointdet_string_free(dump);
  }
  pointdet_config_free(config);
  return keys;
}

int exit_code_of(pointdet_status status)
{
  switch (status) {
    case POINTDET_OK:
      return 0;
    case POINTDET_ERR_PARTIAL_FAILURE:
      return 1;
    case POINTDET_ERR_SELFTEST:
      return 3;
    default:
      return 2;
  }
}

void print_report(char * report)
{
  if (report != nullptr) {
    std::fputs(report, stdout);
    pointdet_string_free(report);
  }
}

int fail(pointdet_status status, const char * stage)
{
  std::fprintf(stderr, "pointdet: %s failed: %s\n", stage, pointdet_last_error());
  return exit_code_of(status);
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Point-based 3D detection core: proposals, targets, evaluation"};
  app.require_subcommand(1);
  // Config flags remain valid after the subcommand name.
  app.fallthrough();

  std::string model = "car";
  std::string config_file;
  app.add_option("--model", model, "Model preset: car or pedcyc")->capture_default_str();
  app.add_option("--config", config_file, "Config file of key = value lines");

  std::map<std::string, std::string> overrides;
  for (const std::string & key : config_key_names()) {
    if (key == "model") {
      continue;
    }
    overrides[key] = {};
    app.add_option("--" + key, overrides[key], "Config override")->group("Config overrides");
  }

  std::string data_dir, out_dir, proposals_dir, detections_dir, records_path;
  std::size_t frames = 10;
  std::size_t objects = 0;
  int reps = 3;
  bool inject_iou_defect = false;

  CLI::App * seed = app.add_subcommand("seed", "Generate, align, score and NMS proposals");
  seed->add_option("--data", data_dir, "KITTI-layout data directory")->required();
  seed->add_option("--out", out_dir, "Output directory for proposal files")->required();

  CLI::App * assign = app.add_subcommand("assign", "Assign PointsIoU targets and minibatches");
  assign->add_option("--data", data_dir, "KITTI-layout data directory")->required();
  assign->add_option("--proposals", proposals_dir, "Directory of proposal files")->required();
  assign->add_option("--out", out_dir, "Output directory for target files")->required();

  CLI::App * eval = app.add_subcommand("eval", "Compute AP and recall against labels");
  eval->add_option("--data", data_dir, "KITTI-layout data directory")->required();
  eval->add_option("--detections", detections_dir, "Directory of detection files (KITTI + score)");
  eval->add_option(
    "--from-proposals", proposals_dir, "Evaluate stub detections built from proposal files");
  eval->add_option("--records", records_path, "Write per-frame JSON-line records here");

  CLI::App * bench = app.add_subcommand("bench", "Throughput report on synthetic scenes");
  bench->add_option("--reps", reps, "Repetitions for medians")->capture_default_str();

  CLI::App * selftest = app.add_subcommand("selftest", "Run the embedded oracle suites");
  selftest
    ->add_flag(
      "--inject-iou-sign-flip", inject_iou_defect,
      "Test hook: corrupt bev_iou to verify the oracle catches it")
    ->group("");  // hidden

  CLI::App * synth = app.add_subcommand("synth", "Write a synthetic KITTI-layout dataset");
  synth->add_option("--out", out_dir, "Dataset directory")->required();
  synth->add_option("--frames", frames, "Number of frames")->capture_default_str();
  synth->add_option("--objects", objects, "Objects per frame (0 = spec default)");

  CLI11_PARSE(app, argc, argv);

  pointdet_config * config = nullptr;
  pointdet_status status = pointdet_config_new(model.c_str(), &config);
  if (status != POINTDET_OK) {
    return fail(status, "config");
  }
  if (!config_file.empty()) {
    status = pointdet_config_load_file(config, config_file.c_str());
    if (status != POINTDET_OK) {
      pointdet_config_free(config);
      return fail(status, "config file");
    }
  }
  for (const auto & [key, value] : overrides) {
    if (value.empty()) {
      continue;
    }
    status = pointdet_config_set(config, key.c_str(), value.c_str());
    if (status != POINTDET_OK) {
      pointdet_config_free(config);
      return fail(status, "config override");
    }
  }

  char * report = nullptr;
  if (seed->parsed()) {
    status = pointdet_run_seed(config, data_dir.c_str(), out_dir.c_str(), &report);
  } else if (assign->parsed()) {
    status = pointdet_run_assign(
      config, data_dir.c_str(), proposals_dir.c_str(), out_dir.c_str(), &report);
  } else if (eval->parsed()) {
    status = pointdet_run_eval(
      config, data_dir.c_str(), detections_dir.empty() ? nullptr : detections_dir.c_str(),
      proposals_dir.empty() ? nullptr : proposals_dir.c_str(),
      records_path.empty() ? nullptr : records_path.c_str(), &report);
  } else if (bench->parsed()) {
    status = pointdet_run_bench(config, reps, &report);
  } else if (selftest->parsed()) {
    pointdet_test_inject_bev_iou_sign_flip(inject_iou_defect ? 1 : 0);
    status = pointdet_run_selftest(&report);
    pointdet_test_inject_bev_iou_sign_flip(0);
  } else if (synth->parsed()) {
    status = pointdet_run_synth(config, out_dir.c_str(), frames, objects, &report);
  }

  print_report(report);
  pointdet_config_free(config);
  return exit_code_of(status);
}
