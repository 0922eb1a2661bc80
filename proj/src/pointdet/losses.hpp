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

#ifndef POINTDET_LOSSES_HPP_
#define POINTDET_LOSSES_HPP_

#include <span>
#include <vector>

#include "pointdet/encoding.hpp"
#include "pointdet/geometry.hpp"

namespace pointdet
{

struct ValueGrad
{
  double value = 0.0;
  double grad = 0.0;
};

// 0.5 x^2 inside |x| < 1, |x| - 0.5 outside; gradient x or sign(x).
ValueGrad smooth_l1(double x);

struct CrossEntropyResult
{
  double value = 0.0;
  std::vector<double> grad;  // softmax(logits) - one_hot(label)
};

// -log softmax(logits)[label], stabilized by max subtraction.
// Throws RangeError on an out-of-range label.
CrossEntropyResult softmax_cross_entropy(std::span<const double> logits, std::size_t label);

// Smooth-l1 over the three residual groups: center shift, head center
// residual and size ratios, each summed per component of pred - target.
double location_loss(const PredictionVector & pred, const RegressionTarget & target);

// Cross entropy over the angle bins plus smooth-l1 on the residual of the
// target bin only.
double angle_loss(const PredictionVector & pred, const RegressionTarget & target, int n_bins);

// Sum over the 8 canonical corner pairs of Euclidean distances.
double corner_loss(const Box3D & predicted, const Box3D & ground_truth);

// One proposal's contribution to the batch loss. The regression fields are
// read only when label >= 1.
struct LossSample
{
  PredictionVector pred;
  int label = 0;  // 0 negative, 1 positive
  RegressionTarget target;
  Box3D proposal_box;
  Box3D gt_box;
};

struct LossBreakdown
{
  double total = 0.0;
  double cls = 0.0;     // summed over all proposals
  double loc = 0.0;     // summed over positives
  double angle = 0.0;   // summed over positives
  double corner = 0.0;  // summed over positives
  std::size_t n_cls = 0;
  std::size_t n_pos = 0;
  double lambda = 1.0;
};

// Multi-task batch loss: classification averaged over every proposal plus
// lambda times the positives-only regression terms averaged over positives.
// With zero positives the regression branch contributes nothing.
LossBreakdown total_loss(std::span<const LossSample> samples, double lambda);

}  // namespace pointdet

#endif  // POINTDET_LOSSES_HPP_
