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

#include "pointdet/losses.hpp"

#include <algorithm>
#include <cmath>

#include "pointdet/errors.hpp"

namespace pointdet
{

ValueGrad smooth_l1(double x)
{
  const double ax = std::abs(x);
  if (ax < 1.0) {
    return {0.5 * x * x, x};
  }
  return {ax - 0.5, x > 0.0 ? 1.0 : -1.0};
}

CrossEntropyResult softmax_cross_entropy(std::span<const double> logits, std::size_t label)
{
  if (label >= logits.size()) {
    throw RangeError(
      "label " + std::to_string(label) + " outside [0, " + std::to_string(logits.size()) + ")");
  }
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (const double v : logits) {
    sum += std::exp(v - max_logit);
  }
  const double log_sum = std::log(sum);

  CrossEntropyResult out;
  out.value = log_sum - (logits[label] - max_logit);
  out.grad.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.grad[i] = std::exp(logits[i] - max_logit) / sum - (i == label ? 1.0 : 0.0);
  }
  return out;
}

namespace
{

double smooth_l1_sum3(const double * pred, const double * target)
{
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    total += smooth_l1(pred[i] - target[i]).value;
  }
  return total;
}

}  // namespace

double location_loss(const PredictionVector & pred, const RegressionTarget & target)
{
  const double pc[3] = {pred.t_ctr.x, pred.t_ctr.y, pred.t_ctr.z};
  const double tc[3] = {target.v_ctr.x, target.v_ctr.y, target.v_ctr.z};
  const double ps[3] = {pred.t_ctr_star.x, pred.t_ctr_star.y, pred.t_ctr_star.z};
  const double ts[3] = {target.v_ctr_star.x, target.v_ctr_star.y, target.v_ctr_star.z};
  return smooth_l1_sum3(pc, tc) + smooth_l1_sum3(ps, ts) +
         smooth_l1_sum3(pred.t_size_star.data(), target.v_size_star.data());
}

double angle_loss(const PredictionVector & pred, const RegressionTarget & target, int n_bins)
{
  if (static_cast<int>(pred.angle_logits.size()) != n_bins ||
      static_cast<int>(pred.angle_residuals.size()) != n_bins) {
    throw ShapeError("angle prediction width disagrees with the bin count");
  }
  const double cls =
    softmax_cross_entropy(pred.angle_logits, static_cast<std::size_t>(target.angle_bin)).value;
  const double res =
    smooth_l1(pred.angle_residuals[target.angle_bin] - target.angle_residual).value;
  return cls + res;
}

double corner_loss(const Box3D & predicted, const Box3D & ground_truth)
{
  const auto pc = box_corners(predicted);
  const auto gc = box_corners(ground_truth);
  double total = 0.0;
  for (int k = 0; k < 8; ++k) {
    total += distance(pc[k], gc[k]);
  }
  return total;
}

LossBreakdown total_loss(std::span<const LossSample> samples, double lambda)
{
  LossBreakdown b;
  b.lambda = lambda;
  b.n_cls = samples.size();
  for (const LossSample & s : samples) {
    b.cls += softmax_cross_entropy(s.pred.class_logits, static_cast<std::size_t>(s.label)).value;
    if (s.label >= 1) {
      ++b.n_pos;
      b.loc += location_loss(s.pred, s.target);
      b.angle += angle_loss(s.pred, s.target, static_cast<int>(s.pred.angle_logits.size()));
      b.corner += corner_loss(decode_box(s.proposal_box, s.pred).box, s.gt_box);
    }
  }
  const double cls_term = b.n_cls > 0 ? b.cls / static_cast<double>(b.n_cls) : 0.0;
  const double pos_denom = static_cast<double>(std::max<std::size_t>(b.n_pos, 1));
  b.total = cls_term + lambda * (b.loc + b.angle + b.corner) / pos_denom;
  return b;
}

}  // namespace pointdet
