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

#include "pointdet/selftest.hpp"

#include <cmath>
#include <cstdio>

#include "pointdet/encoding.hpp"
#include "pointdet/geometry.hpp"
#include "pointdet/losses.hpp"
#include "pointdet/oracles.hpp"
#include "pointdet/rng.hpp"

namespace pointdet
{

namespace
{

Box3D random_bev_box(Rng & rng)
{
  return Box3D(
    Vec3{rng.uniform(-3.0, 3.0), rng.uniform(-1.0, 1.0), rng.uniform(-3.0, 3.0)},
    rng.uniform(0.5, 5.0), rng.uniform(0.5, 3.0), rng.uniform(0.5, 5.0),
    rng.uniform(-kPi, kPi));
}

SelftestResult check_iou_oracle()
{
  SelftestResult result{"iou-oracle", true, ""};
  Rng rng(421);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Box3D a = random_bev_box(rng);
    const Box3D b = random_bev_box(rng);
    const double fast = bev_iou(a, b);
    const double slow = oracle::raster_bev_iou(a, b, 1024);
    worst = std::max(worst, std::abs(fast - slow));
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max |bev_iou - raster| = %.3g over 200 pairs", worst);
  result.detail = buf;
  result.passed = worst <= 1e-3;
  return result;
}

SelftestResult check_pointsiou_oracle()
{
  SelftestResult result{"pointsiou-oracle", true, ""};
  Rng rng(422);
  int checked = 0;
  for (int scene = 0; scene < 20 && result.passed; ++scene) {
    std::vector<Vec3> xyz;
    const std::size_t n = 200 + rng.uniform_below(300);
    xyz.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      xyz.push_back(Vec3{rng.uniform(-5, 5), rng.uniform(-2, 2), rng.uniform(-5, 5)});
    }
    for (int pair = 0; pair < 25; ++pair) {
      const Box3D a = random_bev_box(rng);
      const Box3D b = random_bev_box(rng);
      const double fast = points_iou(xyz, a, b);
      const double slow = oracle::points_iou(xyz, a, b);
      ++checked;
      if (fast != slow) {
        result.passed = false;
        break;
      }
    }
  }
  result.detail = std::to_string(checked) + " pairs compared exactly";
  return result;
}

SelftestResult check_encode_decode()
{
  SelftestResult result{"encode-decode", true, ""};
  Rng rng(423);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Box3D proposal = random_bev_box(rng);
    const Box3D gt = random_bev_box(rng);
    const Vec3 t_ctr{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const RegressionTarget target = encode_targets(proposal, t_ctr, gt, 12);

    PredictionVector pred;
    pred.t_ctr = t_ctr;
    pred.t_ctr_star = target.v_ctr_star;
    pred.t_size_star = target.v_size_star;
    pred.angle_logits.assign(12, 0.0);
    pred.angle_logits[target.angle_bin] = 1.0;
    pred.angle_residuals.assign(12, 0.0);
    pred.angle_residuals[target.angle_bin] = target.angle_residual;
    const DecodedBox decoded = decode_box(proposal, pred);

    worst = std::max(worst, std::abs(decoded.box.center.x - gt.center.x));
    worst = std::max(worst, std::abs(decoded.box.center.y - gt.center.y));
    worst = std::max(worst, std::abs(decoded.box.center.z - gt.center.z));
    worst = std::max(worst, std::abs(decoded.box.l - gt.l));
    worst = std::max(worst, std::abs(decoded.box.h - gt.h));
    worst = std::max(worst, std::abs(decoded.box.w - gt.w));
    worst = std::max(worst, std::abs(normalize_angle(decoded.box.yaw - gt.yaw)));
    if (std::abs(target.angle_residual) > kPi / 12.0 + 1e-9) {
      result.passed = false;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max round-trip error = %.3g over 2000 pairs", worst);
  result.detail = buf;
  result.passed = result.passed && worst <= 1e-9;
  return result;
}

SelftestResult check_losses()
{
  SelftestResult result{"loss", true, ""};
  Rng rng(424);
  double worst_rel = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-3.0, 3.0);
    const double analytic = smooth_l1(x).grad;
    const double numeric =
      oracle::central_difference([](double v) { return smooth_l1(v).value; }, x, 1e-5);
    // The kink at |x| = 1 is not differentiable; finite differences straddle it.
    if (std::abs(std::abs(x) - 1.0) < 1e-4) {
      continue;
    }
    const double rel = std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
    worst_rel = std::max(worst_rel, rel);
  }
  for (int i = 0; i < 200; ++i) {
    std::vector<double> logits(4);
    for (auto & v : logits) {
      v = rng.uniform(-4.0, 4.0);
    }
    const std::size_t label = rng.uniform_below(4);
    const auto analytic = softmax_cross_entropy(logits, label);
    for (std::size_t k = 0; k < logits.size(); ++k) {
      const double numeric = oracle::central_difference(
        [&](double v) {
          std::vector<double> shifted = logits;
          shifted[k] = v;
          return softmax_cross_entropy(shifted, label).value;
        },
        logits[k], 1e-5);
      const double rel = std::abs(analytic.grad[k] - numeric) / std::max(1.0, std::abs(numeric));
      worst_rel = std::max(worst_rel, rel);
    }
  }
  if (worst_rel > 1e-4) {
    result.passed = false;
  }

  // Unit translation moves all 8 corners by exactly one meter.
  const Box3D base(Vec3{4.0, 1.0, 20.0}, 3.9, 1.6, 1.6, 0.4);
  const Box3D moved(Vec3{5.0, 1.0, 20.0}, 3.9, 1.6, 1.6, 0.4);
  if (corner_loss(base, moved) != 8.0) {
    result.passed = false;
  }

  // Re-evaluate a random batch with the straight-line formula.
  std::vector<LossSample> samples;
  for (int i = 0; i < 6; ++i) {
    LossSample s;
    s.label = i % 2;
    s.pred.class_logits = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    s.pred.t_ctr = Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    s.pred.t_ctr_star = Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    s.pred.t_size_star = {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
    for (int b = 0; b < 12; ++b) {
      s.pred.angle_logits.push_back(rng.uniform(-2, 2));
      s.pred.angle_residuals.push_back(rng.uniform(-0.2, 0.2));
    }
    s.proposal_box = random_bev_box(rng);
    s.gt_box = random_bev_box(rng);
    s.target = encode_targets(s.proposal_box, s.pred.t_ctr, s.gt_box, 12);
    samples.push_back(std::move(s));
  }
  const double fast = total_loss(samples, 1.0).total;
  const double slow = oracle::reference_total_loss(samples, 1.0);
  if (std::abs(fast - slow) > 1e-9) {
    result.passed = false;
  }
  char buf[128];
  std::snprintf(
    buf, sizeof(buf), "max gradient rel err = %.3g, batch delta = %.3g", worst_rel,
    std::abs(fast - slow));
  result.detail = buf;
  return result;
}

}  // namespace

std::vector<SelftestResult> run_selftest()
{
  return {
    check_iou_oracle(),
    check_pointsiou_oracle(),
    check_encode_decode(),
    check_losses(),
  };
}

}  // namespace pointdet
