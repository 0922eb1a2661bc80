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

#include "pointdet/config.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "pointdet/errors.hpp"

namespace pointdet
{

namespace
{

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(std::string_view key, std::string_view value)
{
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(value), &used);
    if (used != value.size()) {
      throw ConfigError(std::string(key) + ": trailing characters in '" + std::string(value) + "'");
    }
    return v;
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &) {
    throw ConfigError(std::string(key) + ": cannot parse '" + std::string(value) + "' as number");
  }
}

std::uint64_t to_u64(std::string_view key, std::string_view value)
{
  const double v = to_double(key, value);
  if (v < 0) {
    throw ConfigError(std::string(key) + " must be non-negative");
  }
  return static_cast<std::uint64_t>(v);
}

bool to_bool(std::string_view key, std::string_view value)
{
  if (value == "true" || value == "1") {
    return true;
  }
  if (value == "false" || value == "0") {
    return false;
  }
  throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(value) + "'");
}

std::vector<std::string> split(std::string_view text, char sep)
{
  std::vector<std::string> parts;
  std::string current;
  for (const char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else if (c != ' ') {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::string join_doubles(const std::vector<double> & values)
{
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += format_double(values[i]);
  }
  return out;
}

struct KeyHandler
{
  std::function<void(PipelineConfig &, std::string_view)> set;
  std::function<std::string(const PipelineConfig &)> get;
};

const std::vector<std::pair<std::string, KeyHandler>> & handlers()
{
  static const std::vector<std::pair<std::string, KeyHandler>> table = {
    {"model",
     {[](PipelineConfig & c, std::string_view v) { c = default_config(v); },
      [](const PipelineConfig & c) { return c.model; }}},
    {"classes",
     {[](PipelineConfig & c, std::string_view v) { c.classes = split(v, ','); },
      [](const PipelineConfig & c) {
        std::string out;
        for (std::size_t i = 0; i < c.classes.size(); ++i) {
          out += (i > 0 ? "," : "") + c.classes[i];
        }
        return out;
      }}},
    {"anchor_sizes",
     {[](PipelineConfig & c, std::string_view v) {
        c.anchors.sizes.clear();
        for (const std::string & triple : split(v, ';')) {
          const auto parts = split(triple, ',');
          if (parts.size() != 3) {
            throw ConfigError("anchor_sizes entries must be l,h,w triples");
          }
          c.anchors.sizes.push_back(
            {to_double("anchor_sizes", parts[0]), to_double("anchor_sizes", parts[1]),
             to_double("anchor_sizes", parts[2])});
        }
      },
      [](const PipelineConfig & c) {
        std::string out;
        for (std::size_t i = 0; i < c.anchors.sizes.size(); ++i) {
          if (i > 0) {
            out += ';';
          }
          out += join_doubles(
            {c.anchors.sizes[i][0], c.anchors.sizes[i][1], c.anchors.sizes[i][2]});
        }
        return out;
      }}},
    {"anchor_yaws",
     {[](PipelineConfig & c, std::string_view v) {
        c.anchors.yaws.clear();
        for (const std::string & token : split(v, ',')) {
          c.anchors.yaws.push_back(to_double("anchor_yaws", token));
        }
      },
      [](const PipelineConfig & c) { return join_doubles(c.anchors.yaws); }}},
    {"anchor_shift_ratios",
     {[](PipelineConfig & c, std::string_view v) {
        c.anchors.shift_ratios.clear();
        for (const std::string & token : split(v, ',')) {
          c.anchors.shift_ratios.push_back(to_double("anchor_shift_ratios", token));
        }
      },
      [](const PipelineConfig & c) { return join_doubles(c.anchors.shift_ratios); }}},
    {"n_points",
     {[](PipelineConfig & c, std::string_view v) { c.n_points = to_u64("n_points", v); },
      [](const PipelineConfig & c) { return std::to_string(c.n_points); }}},
    {"m_points",
     {[](PipelineConfig & c, std::string_view v) { c.m_points = to_u64("m_points", v); },
      [](const PipelineConfig & c) { return std::to_string(c.m_points); }}},
    {"n_angle_bins",
     {[](PipelineConfig & c, std::string_view v) {
        c.n_angle_bins = static_cast<int>(to_u64("n_angle_bins", v));
      },
      [](const PipelineConfig & c) { return std::to_string(c.n_angle_bins); }}},
    {"pointsiou_pos",
     {[](PipelineConfig & c, std::string_view v) { c.pointsiou_pos = to_double("pointsiou_pos", v); },
      [](const PipelineConfig & c) { return format_double(c.pointsiou_pos); }}},
    {"pointsiou_neg",
     {[](PipelineConfig & c, std::string_view v) { c.pointsiou_neg = to_double("pointsiou_neg", v); },
      [](const PipelineConfig & c) { return format_double(c.pointsiou_neg); }}},
    {"mask_threshold",
     {[](PipelineConfig & c, std::string_view v) { c.mask_threshold = to_double("mask_threshold", v); },
      [](const PipelineConfig & c) { return format_double(c.mask_threshold); }}},
    {"proposal_nms_iou",
     {[](PipelineConfig & c, std::string_view v) {
        c.proposal_nms_iou = to_double("proposal_nms_iou", v);
      },
      [](const PipelineConfig & c) { return format_double(c.proposal_nms_iou); }}},
    {"proposal_max_keep",
     {[](PipelineConfig & c, std::string_view v) {
        c.proposal_max_keep = to_u64("proposal_max_keep", v);
      },
      [](const PipelineConfig & c) { return std::to_string(c.proposal_max_keep); }}},
    {"post_nms_iou",
     {[](PipelineConfig & c, std::string_view v) { c.post_nms_iou = to_double("post_nms_iou", v); },
      [](const PipelineConfig & c) { return format_double(c.post_nms_iou); }}},
    {"minibatch_size",
     {[](PipelineConfig & c, std::string_view v) { c.minibatch_size = to_u64("minibatch_size", v); },
      [](const PipelineConfig & c) { return std::to_string(c.minibatch_size); }}},
    {"minibatch_pos_fraction",
     {[](PipelineConfig & c, std::string_view v) {
        c.minibatch_pos_fraction = to_double("minibatch_pos_fraction", v);
      },
      [](const PipelineConfig & c) { return format_double(c.minibatch_pos_fraction); }}},
    {"lambda",
     {[](PipelineConfig & c, std::string_view v) { c.lambda = to_double("lambda", v); },
      [](const PipelineConfig & c) { return format_double(c.lambda); }}},
    {"eval_iou_threshold",
     {[](PipelineConfig & c, std::string_view v) {
        c.eval_iou_threshold = to_double("eval_iou_threshold", v);
      },
      [](const PipelineConfig & c) { return format_double(c.eval_iou_threshold); }}},
    {"eval_forty_point",
     {[](PipelineConfig & c, std::string_view v) {
        c.eval_forty_point = to_bool("eval_forty_point", v);
      },
      [](const PipelineConfig & c) { return c.eval_forty_point ? "true" : "false"; }}},
    {"seed",
     {[](PipelineConfig & c, std::string_view v) { c.seed = to_u64("seed", v); },
      [](const PipelineConfig & c) { return std::to_string(c.seed); }}},
    {"workers",
     {[](PipelineConfig & c, std::string_view v) {
        c.workers = static_cast<int>(to_u64("workers", v));
        if (c.workers < 1) {
          throw ConfigError("workers must be >= 1");
        }
      },
      [](const PipelineConfig & c) { return std::to_string(c.workers); }}},
    {"aug_per_box_rot_min",
     {[](PipelineConfig & c, std::string_view v) {
        c.augmentation.per_box_rot_min = to_double("aug_per_box_rot_min", v);
      },
      [](const PipelineConfig & c) { return format_double(c.augmentation.per_box_rot_min); }}},
    {"aug_per_box_rot_max",
     {[](PipelineConfig & c, std::string_view v) {
        c.augmentation.per_box_rot_max = to_double("aug_per_box_rot_max", v);
      },
      [](const PipelineConfig & c) { return format_double(c.augmentation.per_box_rot_max); }}},
    {"aug_translation_std",
     {[](PipelineConfig & c, std::string_view v) {
        c.augmentation.per_box_translation_std = to_double("aug_translation_std", v);
      },
      [](const PipelineConfig & c) {
        return format_double(c.augmentation.per_box_translation_std);
      }}},
    {"aug_flip_prob",
     {[](PipelineConfig & c, std::string_view v) {
        c.augmentation.flip_prob = to_double("aug_flip_prob", v);
      },
      [](const PipelineConfig & c) { return format_double(c.augmentation.flip_prob); }}},
    {"aug_global_rot_min",
     {[](PipelineConfig & c, std::string_view v) {
        c.augmentation.global_rot_min = to_double("aug_global_rot_min", v);
      },
      [](const PipelineConfig & c) { return format_double(c.augmentation.global_rot_min); }}},
    {"aug_global_rot_max",
     {[](PipelineConfig & c, std::string_view v) {
        c.augmentation.global_rot_max = to_double("aug_global_rot_max", v);
      },
      [](const PipelineConfig & c) { return format_double(c.augmentation.global_rot_max); }}},
    {"aug_scale_min",
     {[](PipelineConfig & c, std::string_view v) {
        c.augmentation.scale_min = to_double("aug_scale_min", v);
      },
      [](const PipelineConfig & c) { return format_double(c.augmentation.scale_min); }}},
    {"aug_scale_max",
     {[](PipelineConfig & c, std::string_view v) {
        c.augmentation.scale_max = to_double("aug_scale_max", v);
      },
      [](const PipelineConfig & c) { return format_double(c.augmentation.scale_max); }}},
  };
  return table;
}

}  // namespace

PipelineConfig::PipelineConfig()
{
  anchors.sizes = {{3.9, 1.6, 1.6}};
  anchors.yaws = {0.0, kPi / 2.0};
  anchors.shift_ratios = {-0.5, 0.0, 0.5};
}

PipelineConfig default_config(std::string_view model)
{
  PipelineConfig config;
  if (model == "car") {
    return config;
  }
  if (model == "pedcyc") {
    config.model = "pedcyc";
    config.classes = {"Pedestrian", "Cyclist"};
    config.anchors.sizes = {{1.6, 1.6, 0.8}, {0.8, 1.6, 0.8}};
    config.n_points = 5000;
    config.pointsiou_pos = 0.5;
    config.pointsiou_neg = 0.5;
    config.eval_iou_threshold = 0.5;
    return config;
  }
  throw ConfigError("unknown model '" + std::string(model) + "' (expected car or pedcyc)");
}

std::vector<std::string> config_keys()
{
  std::vector<std::string> keys;
  keys.reserve(handlers().size());
  for (const auto & [key, handler] : handlers()) {
    keys.push_back(key);
  }
  return keys;
}

void config_set(PipelineConfig & config, std::string_view key, std::string_view value)
{
  for (const auto & [name, handler] : handlers()) {
    if (name == key) {
      handler.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::string config_get(const PipelineConfig & config, std::string_view key)
{
  for (const auto & [name, handler] : handlers()) {
    if (name == key) {
      return handler.get(config);
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_config_text(PipelineConfig & config, std::string_view text)
{
  std::istringstream stream{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    config_set(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::string config_to_text(const PipelineConfig & config)
{
  std::string out;
  for (const auto & [name, handler] : handlers()) {
    out += name + " = " + handler.get(config) + "\n";
  }
  return out;
}

}  // namespace pointdet
