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

#ifndef POINTDET_ORACLES_HPP_
#define POINTDET_ORACLES_HPP_

#include <functional>
#include <span>

#include "pointdet/geometry.hpp"
#include "pointdet/losses.hpp"

// Independent reference implementations used to cross-check the fast paths.
// Nothing here shares code with the implementations under test: containment
// projects onto axis vectors instead of rotating into the local frame, BEV
// overlap is counted on a raster instead of clipped analytically, and the
// loss re-evaluation recomputes every formula inline. These back the
// embedded `selftest` command and the test suites.
namespace pointdet::oracle
{

// BEV IoU by counting cell centers on a resolution x resolution raster laid
// over the intersection of the two footprints' bounding rectangles;
// individual footprint areas enter analytically as l * w.
double raster_bev_iou(const Box3D & a, const Box3D & b, int resolution);

// Closed-box membership via projections onto the box axes (same boundary
// slack convention as the production test).
bool point_in_box(const Vec3 & point, const Box3D & box);

// Naive double-loop PointsIoU.
double points_iou(std::span<const Vec3> xyz, const Box3D & a, const Box3D & b);

// Central finite difference with step h.
double central_difference(const std::function<double(double)> & f, double x, double h);

// Straight-line re-evaluation of the multi-task batch loss formula,
// recomputing softmax, smooth-l1, decode and corners from scratch.
double reference_total_loss(std::span<const LossSample> samples, double lambda);

}  // namespace pointdet::oracle

#endif  // POINTDET_ORACLES_HPP_
