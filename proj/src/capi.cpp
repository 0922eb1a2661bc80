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

#include "pointdet/pointdet.h"

#include <cstring>
#include <string>

#include "pointdet/config.hpp"
#include "pointdet/encoding.hpp"
#include "pointdet/errors.hpp"
#include "pointdet/eval.hpp"
#include "pointdet/geometry.hpp"
#include "pointdet/losses.hpp"
#include "pointdet/pipeline.hpp"
#include "pointdet/proposal.hpp"

struct pointdet_config
{
  pointdet::PipelineConfig impl;
};

namespace
{

thread_local std::string g_last_error;

char * copy_string(const std::string & text)
{
  char * out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

pointdet_status status_of(const std::exception & e)
{
  using namespace pointdet;
  g_last_error = e.what();
  if (dynamic_cast<const LengthError *>(&e)) return POINTDET_ERR_LENGTH;
  if (dynamic_cast<const MissingKeyError *>(&e)) return POINTDET_ERR_MISSING_KEY;
  if (dynamic_cast<const ShapeError *>(&e)) return POINTDET_ERR_SHAPE;
  if (dynamic_cast<const FieldCountError *>(&e)) return POINTDET_ERR_FIELD_COUNT;
  if (dynamic_cast<const FrameError *>(&e)) return POINTDET_ERR_FRAME;
  if (dynamic_cast<const EmptyCloudError *>(&e)) return POINTDET_ERR_EMPTY_CLOUD;
  if (dynamic_cast<const EmptyProposalError *>(&e)) return POINTDET_ERR_EMPTY_PROPOSAL;
  if (dynamic_cast<const InsufficientProposalsError *>(&e))
    return POINTDET_ERR_INSUFFICIENT_PROPOSALS;
  if (dynamic_cast<const RangeError *>(&e)) return POINTDET_ERR_RANGE;
  if (dynamic_cast<const PlacementError *>(&e)) return POINTDET_ERR_PLACEMENT;
  if (dynamic_cast<const ConfigError *>(&e)) return POINTDET_ERR_CONFIG;
  if (dynamic_cast<const IoError *>(&e)) return POINTDET_ERR_IO;
  if (dynamic_cast<const ValueError *>(&e)) return POINTDET_ERR_VALUE;
  return POINTDET_ERR_INTERNAL;
}

template <typename Fn>
pointdet_status guarded(Fn && fn)
{
  try {
    g_last_error.clear();
    return fn();
  } catch (const std::exception & e) {
    return status_of(e);
  } catch (...) {
    g_last_error = "unknown error";
    return POINTDET_ERR_INTERNAL;
  }
}

pointdet::Box3D box_from_array(const double box[7])
{
  return pointdet::Box3D(
    pointdet::Vec3{box[0], box[1], box[2]}, box[3], box[4], box[5], box[6]);
}

void box_to_array(const pointdet::Box3D & box, double out[7])
{
  out[0] = box.center.x;
  out[1] = box.center.y;
  out[2] = box.center.z;
  out[3] = box.l;
  out[4] = box.h;
  out[5] = box.w;
  out[6] = box.yaw;
}

pointdet_status report_status(const pointdet::RunReport & report)
{
  switch (report.status) {
    case pointdet::RunStatus::kOk:
      return POINTDET_OK;
    case pointdet::RunStatus::kPartialFailure:
      return POINTDET_ERR_PARTIAL_FAILURE;
    case pointdet::RunStatus::kConfigError:
      return POINTDET_ERR_CONFIG;
    default:
      return POINTDET_ERR_SELFTEST;
  }
}

pointdet_status finish_run(
  const pointdet::RunReport & report, char ** out_report)
{
  if (out_report != nullptr) {
    *out_report = copy_string(report.text);
  }
  const pointdet_status status = report_status(report);
  if (status != POINTDET_OK) {
    g_last_error = report.text;
  }
  return status;
}

}  // namespace

extern "C" {

const char * pointdet_version(void) { return "1.0.0"; }

const char * pointdet_last_error(void) { return g_last_error.c_str(); }

void pointdet_string_free(char * text) { delete[] text; }

pointdet_status pointdet_config_new(const char * model, pointdet_config ** out_config)
{
  return guarded([&]() {
    if (out_config == nullptr) {
      g_last_error = "out_config is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    auto * config = new pointdet_config;
    config->impl = pointdet::default_config(model != nullptr ? model : "car");
    *out_config = config;
    return POINTDET_OK;
  });
}

void pointdet_config_free(pointdet_config * config) { delete config; }

pointdet_status pointdet_config_load_file(pointdet_config * config, const char * path)
{
  return guarded([&]() {
    if (config == nullptr || path == nullptr) {
      g_last_error = "config/path is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    pointdet::apply_config_text(config->impl, pointdet::read_file(path));
    return POINTDET_OK;
  });
}

pointdet_status pointdet_config_set(
  pointdet_config * config, const char * key, const char * value)
{
  return guarded([&]() {
    if (config == nullptr || key == nullptr || value == nullptr) {
      g_last_error = "config/key/value is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    pointdet::config_set(config->impl, key, value);
    return POINTDET_OK;
  });
}

pointdet_status pointdet_config_get(
  const pointdet_config * config, const char * key, char ** out_value)
{
  return guarded([&]() {
    if (config == nullptr || key == nullptr || out_value == nullptr) {
      g_last_error = "config/key/out_value is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    *out_value = copy_string(pointdet::config_get(config->impl, key));
    return POINTDET_OK;
  });
}

pointdet_status pointdet_config_dump(const pointdet_config * config, char ** out_text)
{
  return guarded([&]() {
    if (config == nullptr || out_text == nullptr) {
      g_last_error = "config/out_text is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    *out_text = copy_string(pointdet::config_to_text(config->impl));
    return POINTDET_OK;
  });
}

pointdet_status pointdet_run_seed(
  const pointdet_config * config, const char * data_dir, const char * out_dir,
  char ** out_report)
{
  return guarded([&]() {
    if (config == nullptr || data_dir == nullptr || out_dir == nullptr) {
      g_last_error = "config/data_dir/out_dir is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    return finish_run(pointdet::run_seed(config->impl, data_dir, out_dir), out_report);
  });
}

pointdet_status pointdet_run_assign(
  const pointdet_config * config, const char * data_dir, const char * proposals_dir,
  const char * out_dir, char ** out_report)
{
  return guarded([&]() {
    if (config == nullptr || data_dir == nullptr || proposals_dir == nullptr || out_dir == nullptr) {
      g_last_error = "config/data_dir/proposals_dir/out_dir is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    return finish_run(
      pointdet::run_assign(config->impl, data_dir, proposals_dir, out_dir), out_report);
  });
}

pointdet_status pointdet_run_eval(
  const pointdet_config * config, const char * data_dir, const char * detections_dir,
  const char * proposals_dir, const char * records_path, char ** out_report)
{
  return guarded([&]() {
    if (config == nullptr || data_dir == nullptr) {
      g_last_error = "config/data_dir is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    return finish_run(
      pointdet::run_eval(
        config->impl, data_dir, detections_dir != nullptr ? detections_dir : "",
        proposals_dir != nullptr ? proposals_dir : "",
        records_path != nullptr ? records_path : ""),
      out_report);
  });
}

pointdet_status pointdet_run_bench(
  const pointdet_config * config, int repetitions, char ** out_report)
{
  return guarded([&]() {
    if (config == nullptr) {
      g_last_error = "config is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    return finish_run(pointdet::run_bench(config->impl, repetitions), out_report);
  });
}

pointdet_status pointdet_run_selftest(char ** out_report)
{
  return guarded([&]() { return finish_run(pointdet::run_selftest_report(), out_report); });
}

pointdet_status pointdet_run_synth(
  const pointdet_config * config, const char * dir, size_t n_frames, size_t objects_per_frame,
  char ** out_report)
{
  return guarded([&]() {
    if (config == nullptr || dir == nullptr) {
      g_last_error = "config/dir is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    pointdet::SceneSpec spec;
    if (objects_per_frame > 0) {
      spec.min_objects = objects_per_frame;
      spec.max_objects = objects_per_frame;
    }
    spec.anchor = config->impl.anchors.sizes.front();
    pointdet::write_synthetic_dataset(dir, n_frames, spec, config->impl.seed);
    if (out_report != nullptr) {
      *out_report = copy_string(
        "wrote " + std::to_string(n_frames) + " synthetic frames under " + dir + "\n");
    }
    return POINTDET_OK;
  });
}

pointdet_status pointdet_bev_iou(const double box_a[7], const double box_b[7], double * out_iou)
{
  return guarded([&]() {
    if (box_a == nullptr || box_b == nullptr || out_iou == nullptr) {
      g_last_error = "argument is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    *out_iou = pointdet::bev_iou(box_from_array(box_a), box_from_array(box_b));
    return POINTDET_OK;
  });
}

pointdet_status pointdet_iou_3d(const double box_a[7], const double box_b[7], double * out_iou)
{
  return guarded([&]() {
    if (box_a == nullptr || box_b == nullptr || out_iou == nullptr) {
      g_last_error = "argument is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    *out_iou = pointdet::iou_3d(box_from_array(box_a), box_from_array(box_b));
    return POINTDET_OK;
  });
}

pointdet_status pointdet_points_iou(
  const double * xyz, size_t n_points, const double box_a[7], const double box_b[7],
  double * out_iou)
{
  return guarded([&]() {
    if ((xyz == nullptr && n_points > 0) || box_a == nullptr || box_b == nullptr ||
        out_iou == nullptr) {
      g_last_error = "argument is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    std::vector<pointdet::Vec3> points(n_points);
    for (size_t i = 0; i < n_points; ++i) {
      points[i] = pointdet::Vec3{xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]};
    }
    *out_iou = pointdet::points_iou(points, box_from_array(box_a), box_from_array(box_b));
    return POINTDET_OK;
  });
}

pointdet_status pointdet_box_corners(const double box[7], double out_corners[24])
{
  return guarded([&]() {
    if (box == nullptr || out_corners == nullptr) {
      g_last_error = "argument is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    const auto corners = pointdet::box_corners(box_from_array(box));
    for (int i = 0; i < 8; ++i) {
      out_corners[3 * i] = corners[i].x;
      out_corners[3 * i + 1] = corners[i].y;
      out_corners[3 * i + 2] = corners[i].z;
    }
    return POINTDET_OK;
  });
}

pointdet_status pointdet_point_in_box(
  const double point[3], const double box[7], int * out_inside)
{
  return guarded([&]() {
    if (point == nullptr || box == nullptr || out_inside == nullptr) {
      g_last_error = "argument is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    *out_inside = pointdet::point_in_box(
                    pointdet::Vec3{point[0], point[1], point[2]}, box_from_array(box))
                    ? 1
                    : 0;
    return POINTDET_OK;
  });
}

pointdet_status pointdet_nms_bev(
  const double * boxes, const double * scores, size_t n, double iou_threshold, size_t max_keep,
  size_t * out_kept, size_t * out_n_kept)
{
  return guarded([&]() {
    if ((boxes == nullptr || scores == nullptr) && n > 0) {
      g_last_error = "boxes/scores is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    if (out_kept == nullptr || out_n_kept == nullptr) {
      g_last_error = "out_kept/out_n_kept is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    std::vector<pointdet::Box3D> parsed(n);
    std::vector<double> parsed_scores(scores, scores + n);
    std::vector<std::uint64_t> tiebreak(n);
    for (size_t i = 0; i < n; ++i) {
      parsed[i] = box_from_array(boxes + 7 * i);
      tiebreak[i] = i;
    }
    const auto kept =
      pointdet::nms_bev_indices(parsed, parsed_scores, tiebreak, iou_threshold, max_keep);
    for (size_t i = 0; i < kept.size(); ++i) {
      out_kept[i] = kept[i];
    }
    *out_n_kept = kept.size();
    return POINTDET_OK;
  });
}

pointdet_status pointdet_encode_targets(
  const double proposal_box[7], const double t_ctr[3], const double gt_box[7], int n_bins,
  double out_target[11])
{
  return guarded([&]() {
    if (proposal_box == nullptr || t_ctr == nullptr || gt_box == nullptr || out_target == nullptr) {
      g_last_error = "argument is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    const auto target = pointdet::encode_targets(
      box_from_array(proposal_box), pointdet::Vec3{t_ctr[0], t_ctr[1], t_ctr[2]},
      box_from_array(gt_box), n_bins);
    out_target[0] = target.v_ctr.x;
    out_target[1] = target.v_ctr.y;
    out_target[2] = target.v_ctr.z;
    out_target[3] = target.v_ctr_star.x;
    out_target[4] = target.v_ctr_star.y;
    out_target[5] = target.v_ctr_star.z;
    out_target[6] = target.v_size_star[0];
    out_target[7] = target.v_size_star[1];
    out_target[8] = target.v_size_star[2];
    out_target[9] = target.angle_bin;
    out_target[10] = target.angle_residual;
    return POINTDET_OK;
  });
}

pointdet_status pointdet_decode_box(
  const double proposal_box[7], const double * prediction, int n_bins, double out_box[7],
  int * out_degenerate)
{
  return guarded([&]() {
    if (proposal_box == nullptr || prediction == nullptr || out_box == nullptr || n_bins <= 0) {
      g_last_error = "argument is NULL or n_bins <= 0";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    pointdet::PredictionVector pred;
    pred.t_ctr = pointdet::Vec3{prediction[0], prediction[1], prediction[2]};
    pred.t_ctr_star = pointdet::Vec3{prediction[3], prediction[4], prediction[5]};
    pred.t_size_star = {prediction[6], prediction[7], prediction[8]};
    pred.angle_logits.assign(prediction + 9, prediction + 9 + n_bins);
    pred.angle_residuals.assign(prediction + 9 + n_bins, prediction + 9 + 2 * n_bins);
    const auto decoded = pointdet::decode_box(box_from_array(proposal_box), pred);
    box_to_array(decoded.box, out_box);
    if (out_degenerate != nullptr) {
      *out_degenerate = decoded.degenerate ? 1 : 0;
    }
    return POINTDET_OK;
  });
}

pointdet_status pointdet_smooth_l1(double x, double * out_value, double * out_derivative)
{
  return guarded([&]() {
    if (out_value == nullptr) {
      g_last_error = "out_value is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    const auto result = pointdet::smooth_l1(x);
    *out_value = result.value;
    if (out_derivative != nullptr) {
      *out_derivative = result.grad;
    }
    return POINTDET_OK;
  });
}

pointdet_status pointdet_softmax_cross_entropy(
  const double * logits, size_t n_logits, size_t label, double * out_value, double * out_gradient)
{
  return guarded([&]() {
    if (logits == nullptr || out_value == nullptr || n_logits == 0) {
      g_last_error = "logits/out_value is NULL or empty";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    const auto result =
      pointdet::softmax_cross_entropy(std::span<const double>(logits, n_logits), label);
    *out_value = result.value;
    if (out_gradient != nullptr) {
      for (size_t i = 0; i < n_logits; ++i) {
        out_gradient[i] = result.grad[i];
      }
    }
    return POINTDET_OK;
  });
}

pointdet_status pointdet_corner_loss(
  const double box_a[7], const double box_b[7], double * out_loss)
{
  return guarded([&]() {
    if (box_a == nullptr || box_b == nullptr || out_loss == nullptr) {
      g_last_error = "argument is NULL";
      return POINTDET_ERR_INVALID_ARGUMENT;
    }
    *out_loss = pointdet::corner_loss(box_from_array(box_a), box_from_array(box_b));
    return POINTDET_OK;
  });
}

void pointdet_test_inject_bev_iou_sign_flip(int enabled)
{
  pointdet::set_bev_iou_sign_flip_for_test(enabled != 0);
}

}  // extern "C"
