/* Copyright 2026 The StyleForge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "styleforge/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "styleforge/engine.h"

namespace styleforge {

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

GradCheckReport run_gradient_check(std::uint64_t seed, std::size_t coords) {
  constexpr std::size_t kSide = 16;
  constexpr std::size_t kTile = 8;
  constexpr double kStep = 1e-4;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const VggWeights<double> weights = make_random_vgg_weights(seed).cast<double>();

  const Shape shape{1, 3, kSide, kSide};
  TensorD content(shape), target(shape), style(shape);
  for (double& v : content.data()) v = normal(rng);
  for (double& v : target.data()) v = normal(rng);
  std::vector<double> tile(3 * kTile * kTile);
  for (double& v : tile) v = normal(rng);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < kSide; ++y) {
      for (std::size_t x = 0; x < kSide; ++x) {
        style.at(0, c, y, x) = tile[(c * kTile + y % kTile) * kTile + x % kTile];
      }
    }
  }

  std::set<std::string> all_style;
  for (auto l : kStyleLayers) all_style.emplace(l);
  FeatureSet<double> style_fs = forward_capture(style, weights, all_style, false);
  StyleSpec<double> spec{"fixture", {}, 1.0};
  for (auto l : kStyleLayers) {
    spec.grams.emplace(std::string(l), gram(style_fs.at(l), std::string(l)));
  }
  const std::vector<StyleSpec<double>> styles{spec};
  const TensorD content_features =
      forward_capture(content, weights, {std::string(kContentLayer)}, false)
          .at(kContentLayer);
  const LossWeights lw;

  const ObjectiveValue<double> base =
      evaluate_objective(target, content_features, styles, lw, weights);

  GradCheckReport report;
  std::uniform_int_distribution<std::size_t> pick(0, target.size() - 1);
  for (std::size_t k = 0; k < coords; ++k) {
    const std::size_t idx = pick(rng);
    TensorD probe = target;
    probe[idx] = target[idx] + kStep;
    const double up =
        evaluate_objective(probe, content_features, styles, lw, weights, false)
            .total_loss;
    probe[idx] = target[idx] - kStep;
    const double down =
        evaluate_objective(probe, content_features, styles, lw, weights, false)
            .total_loss;
    GradCheckSample s;
    s.index = idx;
    s.analytic = base.grad[idx];
    s.numeric = (up - down) / (2.0 * kStep);
    s.rel_error = relative_error(s.analytic, s.numeric);
    report.max_rel_error = std::max(report.max_rel_error, s.rel_error);
    report.samples.push_back(s);
  }
  return report;
}

}  // namespace styleforge
