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

#ifndef POINTDET_CONFIG_HPP_
#define POINTDET_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pointdet/augmentation.hpp"
#include "pointdet/proposal.hpp"

namespace pointdet
{

// Full pipeline configuration. Defaults reproduce the published operating
// point of the car model; `pedcyc` switches the model-dependent entries.
struct PipelineConfig
{
  std::string model = "car";
  std::vector<std::string> classes = {"Car"};
  AnchorConfig anchors;
  std::size_t n_points = 10000;       // points selected per cloud
  std::size_t m_points = 512;         // points sampled per proposal
  int n_angle_bins = 12;
  double pointsiou_pos = 0.55;
  double pointsiou_neg = 0.55;
  double mask_threshold = 0.5;        // minimum mask score for foreground
  double proposal_nms_iou = 0.7;
  std::size_t proposal_max_keep = 500;
  double post_nms_iou = 0.01;
  std::size_t minibatch_size = 64;
  double minibatch_pos_fraction = 0.25;  // 1:3 positives to negatives
  double lambda = 1.0;
  double eval_iou_threshold = 0.7;
  bool eval_forty_point = false;
  std::uint64_t seed = 1;
  int workers = 1;
  AugmentationConfig augmentation;

  PipelineConfig();
};

// Model presets: "car" or "pedcyc".
PipelineConfig default_config(std::string_view model);

// All recognized keys, in documentation order.
std::vector<std::string> config_keys();

// Applies one `key = value` override. Setting `model` resets every
// model-dependent default, so it belongs before other overrides.
// Throws ConfigError on unknown keys or unparseable values.
void config_set(PipelineConfig & config, std::string_view key, std::string_view value);

// Current value of a key, in the same syntax config_set accepts.
std::string config_get(const PipelineConfig & config, std::string_view key);

// `key = value` lines with `#` comments; later lines win.
void apply_config_text(PipelineConfig & config, std::string_view text);

std::string config_to_text(const PipelineConfig & config);

}  // namespace pointdet

#endif  // POINTDET_CONFIG_HPP_
