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

#ifndef STYLEFORGE_LOSSES_H_
#define STYLEFORGE_LOSSES_H_

#include <map>
#include <string>
#include <vector>

#include "styleforge/gram.h"
#include "styleforge/tensor.h"

namespace styleforge {

// Weights of the combined objective
//   L = alpha * L_content + beta * sum_s blend_s * sum_l w_l * E_l(s).
struct LossWeights {
  double alpha = 1.0;
  double beta = 1e9;
  std::map<std::string, double> layer_weights = {
      {"conv1_1", 1.0}, {"conv2_1", 0.75}, {"conv3_1", 0.2},
      {"conv4_1", 0.2}, {"conv5_1", 0.2}};
  std::vector<double> style_blend = {1.0};

  // Throws ValidationError: alpha, beta > 0; layer weights >= 0 and keyed by
  // style layers only; blend entries >= 0 summing to 1 within 1e-9.
  void validate() const;
};

// Style targets precomputed from one style image.
template <typename T>
struct StyleSpec {
  std::string name;
  std::map<std::string, GramMatrix<T>> grams;
  double blend_weight = 1.0;

  template <typename U>
  StyleSpec<U> cast() const;
};

template <typename T>
struct ContentLossResult {
  double loss = 0.0;
  BasicTensor<T> grad;  // d loss / d target
};

// 0.5 * sum (content - target)^2; gradient target - content.
template <typename T>
ContentLossResult<T> content_loss(const BasicTensor<T>& target,
                                  const BasicTensor<T>& content);

template <typename T>
struct StyleLossResult {
  double loss = 0.0;
  std::map<std::string, SquareMatrix<T>> grad;  // d loss / d G_target
};

// For each layer with N channels and M positions,
//   E = sum (G_target - G_style)^2 / (4 N^2 M^2),
// weighted by the layer weight and the style's blend weight. Layers are
// summed in network order, then styles in input order.
//
// When the style image has a different number of positions than the target
// the style Gram is rescaled to the target's M first, which is the same as
// comparing G/M on both sides.
//
// Throws CompletenessError when a style or the target lacks a weighted
// layer, ValidationError when the blend vector does not match styles.
template <typename T>
StyleLossResult<T> style_loss(
    const std::map<std::string, GramMatrix<T>>& target_grams,
    const std::vector<StyleSpec<T>>& styles, const LossWeights& weights);

// alpha * content + beta * style. Throws NumericError if either term (or the
// result) is not finite.
double total_loss(double content_term, double style_term,
                  const LossWeights& weights);

}  // namespace styleforge

#endif  // STYLEFORGE_LOSSES_H_
