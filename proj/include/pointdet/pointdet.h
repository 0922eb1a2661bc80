/* Copyright 2026 The pointdet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API of the pointdet shared library.
 *
 * The library implements the non-neural core of a point-based 3D object
 * detection pipeline: rotated-box geometry, KITTI-format ingest, per-point
 * proposal seeding with BEV NMS, PointsIoU target assignment, box/angle
 * target encoding, the multi-task loss terms, point-cloud augmentation and a
 * recall/AP evaluation harness.
 *
 * Conventions:
 *  - Every function returns a pointdet_status; POINTDET_OK is 0.
 *  - Boxes are 7 doubles: cx, cy, cz (camera frame, meters), l, h, w
 *    (meters), yaw (radians about the vertical axis).
 *  - Point arrays are xyz triples, row-major.
 *  - Strings returned through char** are owned by the caller and must be
 *    released with pointdet_string_free.
 */

#ifndef POINTDET_POINTDET_H_
#define POINTDET_POINTDET_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define POINTDET_API __declspec(dllexport)
#else
#define POINTDET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pointdet_status {
  POINTDET_OK = 0,
  POINTDET_ERR_INVALID_ARGUMENT = 1,
  POINTDET_ERR_LENGTH = 2,
  POINTDET_ERR_VALUE = 3,
  POINTDET_ERR_MISSING_KEY = 4,
  POINTDET_ERR_SHAPE = 5,
  POINTDET_ERR_FIELD_COUNT = 6,
  POINTDET_ERR_FRAME = 7,
  POINTDET_ERR_EMPTY_CLOUD = 8,
  POINTDET_ERR_EMPTY_PROPOSAL = 9,
  POINTDET_ERR_INSUFFICIENT_PROPOSALS = 10,
  POINTDET_ERR_RANGE = 11,
  POINTDET_ERR_PLACEMENT = 12,
  POINTDET_ERR_CONFIG = 13,
  POINTDET_ERR_IO = 14,
  POINTDET_ERR_PARTIAL_FAILURE = 15, /* some frames failed and were skipped */
  POINTDET_ERR_SELFTEST = 16,
  POINTDET_ERR_INTERNAL = 17
} pointdet_status;

POINTDET_API const char * pointdet_version(void);

/* Explanation of the most recent error on this thread (empty when none). */
POINTDET_API const char * pointdet_last_error(void);

POINTDET_API void pointdet_string_free(char * text);

/* ------------------------------------------------------------------ */
/* Configuration handle                                                */

typedef struct pointdet_config pointdet_config;

/* model is "car" or "pedcyc"; NULL means "car". */
POINTDET_API pointdet_status
pointdet_config_new(const char * model, pointdet_config ** out_config);
POINTDET_API void pointdet_config_free(pointdet_config * config);

/* Applies `key = value` lines from a config file. */
POINTDET_API pointdet_status
pointdet_config_load_file(pointdet_config * config, const char * path);

POINTDET_API pointdet_status
pointdet_config_set(pointdet_config * config, const char * key, const char * value);

/* Value formatted the way pointdet_config_set accepts. */
POINTDET_API pointdet_status pointdet_config_get(
  const pointdet_config * config, const char * key, char ** out_value);

/* Full `key = value` dump of every recognized key. */
POINTDET_API pointdet_status
pointdet_config_dump(const pointdet_config * config, char ** out_text);

/* ------------------------------------------------------------------ */
/* Pipeline commands (the CLI is a thin veneer over these)             */

/* Proposal stage over a KITTI-layout directory; writes one proposal file
 * per frame into out_dir and returns the per-frame report. */
POINTDET_API pointdet_status pointdet_run_seed(
  const pointdet_config * config, const char * data_dir, const char * out_dir,
  char ** out_report);

/* PointsIoU assignment + minibatch + regression targets over proposal
 * files; writes one target file per frame into out_dir. */
POINTDET_API pointdet_status pointdet_run_assign(
  const pointdet_config * config, const char * data_dir, const char * proposals_dir,
  const char * out_dir, char ** out_report);

/* AP/recall evaluation. Exactly one of detections_dir / proposals_dir must
 * be non-NULL; records_path may be NULL to skip the per-frame record file. */
POINTDET_API pointdet_status pointdet_run_eval(
  const pointdet_config * config, const char * data_dir, const char * detections_dir,
  const char * proposals_dir, const char * records_path, char ** out_report);

POINTDET_API pointdet_status pointdet_run_bench(
  const pointdet_config * config, int repetitions, char ** out_report);

POINTDET_API pointdet_status pointdet_run_selftest(char ** out_report);

/* Writes an n_frames synthetic dataset in KITTI layout under dir. */
POINTDET_API pointdet_status pointdet_run_synth(
  const pointdet_config * config, const char * dir, size_t n_frames, size_t objects_per_frame,
  char ** out_report);

/* ------------------------------------------------------------------ */
/* Stateless kernels (callable from bindings without handles)          */

POINTDET_API pointdet_status
pointdet_bev_iou(const double box_a[7], const double box_b[7], double * out_iou);

POINTDET_API pointdet_status
pointdet_iou_3d(const double box_a[7], const double box_b[7], double * out_iou);

POINTDET_API pointdet_status pointdet_points_iou(
  const double * xyz, size_t n_points, const double box_a[7], const double box_b[7],
  double * out_iou);

/* Corners in canonical order, 8 xyz triples. */
POINTDET_API pointdet_status pointdet_box_corners(const double box[7], double out_corners[24]);

POINTDET_API pointdet_status
pointdet_point_in_box(const double point[3], const double box[7], int * out_inside);

/* Greedy BEV NMS over n scored boxes (7 doubles each). out_kept must hold
 * n entries; returns the kept positions, score-descending. */
POINTDET_API pointdet_status pointdet_nms_bev(
  const double * boxes, const double * scores, size_t n, double iou_threshold, size_t max_keep,
  size_t * out_kept, size_t * out_n_kept);

/* Regression target vector: v_ctr (3), v_ctr_star (3), v_size_star (3),
 * angle_bin (1), angle_residual (1). */
POINTDET_API pointdet_status pointdet_encode_targets(
  const double proposal_box[7], const double t_ctr[3], const double gt_box[7], int n_bins,
  double out_target[11]);

/* Inverse of the encoding. The prediction is t_ctr (3), t_ctr_star (3),
 * t_size_star (3), then n_bins angle logits and n_bins angle residuals. */
POINTDET_API pointdet_status pointdet_decode_box(
  const double proposal_box[7], const double * prediction, int n_bins, double out_box[7],
  int * out_degenerate);

POINTDET_API pointdet_status
pointdet_smooth_l1(double x, double * out_value, double * out_derivative);

/* out_gradient may be NULL; otherwise it must hold n_logits entries. */
POINTDET_API pointdet_status pointdet_softmax_cross_entropy(
  const double * logits, size_t n_logits, size_t label, double * out_value,
  double * out_gradient);

POINTDET_API pointdet_status
pointdet_corner_loss(const double box_a[7], const double box_b[7], double * out_loss);

/* Test-only hook: negates bev_iou results so callers can verify that the
 * selftest oracle suite detects an injected defect. */
POINTDET_API void pointdet_test_inject_bev_iou_sign_flip(int enabled);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* POINTDET_POINTDET_H_ */
