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

#ifndef POINTDET_PIPELINE_HPP_
#define POINTDET_PIPELINE_HPP_

#include <string>
#include <vector>

#include "pointdet/config.hpp"
#include "pointdet/eval.hpp"

namespace pointdet
{

enum class RunStatus
{
  kOk = 0,
  kPartialFailure = 1,  // some frames failed and were skipped
  kConfigError = 2,
  kSelftestFailure = 3,
};

struct RunReport
{
  RunStatus status = RunStatus::kOk;
  std::string text;  // human-readable report, one line per frame plus summary
  std::size_t frames_processed = 0;
  std::size_t frames_failed = 0;
};

// Expected data layout under `data_dir`:
//   velodyne/<id>.bin   calib/<id>.txt   label_2/<id>.txt   masks/<id>.pgm
// Frame ids are the velodyne file stems (zero-padded six digits on KITTI).
std::vector<std::string> list_frame_ids(const std::string & data_dir);

// Full proposal stage per frame: ingest, mask transfer, point selection,
// anchor seeding, alignment, scoring and BEV NMS. Writes
// `<out_dir>/<id>.txt` proposal files. Frames that fail are reported and
// skipped; labels, when present, add a proposal recall figure per frame.
RunReport run_seed(
  const PipelineConfig & config, const std::string & data_dir, const std::string & out_dir);

// PointsIoU target assignment, minibatch sampling and regression-target
// encoding over previously written proposal files. Writes
// `<out_dir>/<id>.txt` target files.
RunReport run_assign(
  const PipelineConfig & config, const std::string & data_dir,
  const std::string & proposals_dir, const std::string & out_dir);

// AP/recall evaluation. Detections come from `detections_dir` (KITTI label
// lines plus a trailing score) or, when that is empty, from
// `proposals_dir` as stub detections: aligned proposal boxes scored by the
// bounded segmentation-score map s / (1 + s). Post-process NMS runs per
// class at config.post_nms_iou before matching. With a non-empty
// `records_path`, per-frame structured records (JSON lines) are written.
RunReport run_eval(
  const PipelineConfig & config, const std::string & data_dir,
  const std::string & detections_dir, const std::string & proposals_dir,
  const std::string & records_path);

// Synthetic-scene throughput report: seeding proposals/s, BEV IoU pairs/s,
// NMS wall time and end-to-end frames/s, medians over `repetitions`.
RunReport run_bench(const PipelineConfig & config, int repetitions);

// Formats the embedded oracle suites as one PASS/FAIL line per category.
RunReport run_selftest_report();

// Writes a `n_frames`-frame KITTI-layout dataset of synthetic scenes under
// `dir` (velodyne, calib, label_2, masks), with pinhole-consistent masks and
// projected 2D boxes. Placement bounds of `spec` must stay inside the
// synthetic camera frustum; the defaults do.
void write_synthetic_dataset(
  const std::string & dir, std::size_t n_frames, const SceneSpec & spec, std::uint64_t seed);

// Whole-file helpers; throw IoError.
std::string read_file(const std::string & path);
void write_file(const std::string & path, std::string_view contents);

}  // namespace pointdet

#endif  // POINTDET_PIPELINE_HPP_
