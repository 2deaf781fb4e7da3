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

#include "styleforge/losses.h"

#include <algorithm>
#include <cmath>

#include "styleforge/vgg19.h"

namespace styleforge {

void LossWeights::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("content weight alpha must be > 0");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ValidationError("style weight beta must be > 0");
  }
  for (const auto& [layer, w] : layer_weights) {
    if (std::find(kStyleLayers.begin(), kStyleLayers.end(), layer) ==
        kStyleLayers.end()) {
      throw ValidationError("layer weight given for non-style layer '" + layer +
                            "'");
    }
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("layer weight for " + layer + " must be >= 0");
    }
  }
  if (style_blend.empty()) throw ValidationError("style blend is empty");
  double sum = 0.0;
  for (double b : style_blend) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      throw ValidationError("style blend weights must be >= 0");
    }
    sum += b;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("style blend weights must sum to 1, got " +
                          std::to_string(sum));
  }
}

template <typename T>
template <typename U>
StyleSpec<U> StyleSpec<T>::cast() const {
  StyleSpec<U> out{name, {}, blend_weight};
  for (const auto& [layer, g] : grams) {
    SquareMatrix<U> m(g.n_channels);
    m.values.assign(g.values.values.begin(), g.values.values.end());
    out.grams.emplace(layer, GramMatrix<U>{g.layer, g.n_channels,
                                           g.n_positions, std::move(m)});
  }
  return out;
}

template <typename T>
ContentLossResult<T> content_loss(const BasicTensor<T>& target,
                                  const BasicTensor<T>& content) {
  require_same_shape(target.shape(), content.shape(), "content_loss");
  ContentLossResult<T> r{0.0, BasicTensor<T>(target.shape())};
  const T* t = target.raw();
  const T* c = content.raw();
  T* g = r.grad.raw();
  double sum = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const T d = t[i] - c[i];
    g[i] = d;
    sum += static_cast<double>(d) * static_cast<double>(d);
  }
  r.loss = 0.5 * sum;
  return r;
}

template <typename T>
StyleLossResult<T> style_loss(
    const std::map<std::string, GramMatrix<T>>& target_grams,
    const std::vector<StyleSpec<T>>& styles, const LossWeights& weights) {
  if (styles.empty()) throw ValidationError("style_loss: no styles given");
  if (weights.style_blend.size() != styles.size()) {
    throw ValidationError("style_loss: " + std::to_string(styles.size()) +
                          " styles but " +
                          std::to_string(weights.style_blend.size()) +
                          " blend weights");
  }
  StyleLossResult<T> r;
  for (std::string_view layer_view : kStyleLayers) {
    const std::string layer(layer_view);
    auto lw = weights.layer_weights.find(layer);
    if (lw == weights.layer_weights.end()) continue;
    auto tg = target_grams.find(layer);
    if (tg == target_grams.end()) {
      throw CompletenessError("style_loss: target has no Gram for " + layer);
    }
    const GramMatrix<T>& gt = tg->second;
    const std::size_t n = gt.n_channels;
    const double m = static_cast<double>(gt.n_positions);
    const double denom = 4.0 * static_cast<double>(n) * static_cast<double>(n) * m * m;

    SquareMatrix<T> grad(n);
    for (std::size_t s = 0; s < styles.size(); ++s) {
      auto sg = styles[s].grams.find(layer);
      if (sg == styles[s].grams.end()) {
        throw CompletenessError("style_loss: style '" + styles[s].name +
                                "' has no Gram for " + layer);
      }
      const GramMatrix<T>& gs = sg->second;
      if (gs.n_channels != n) {
        throw ShapeError("style_loss: " + layer + " Gram is " +
                         std::to_string(gs.n_channels) + " channels for style '" +
                         styles[s].name + "' but target has " + std::to_string(n));
      }
      const double coef = weights.style_blend[s] * lw->second;
      const bool same_m = gs.n_positions == gt.n_positions;
      const double ratio = m / static_cast<double>(gs.n_positions);
      const double grad_scale = coef * 2.0 / denom;
      double sum = 0.0;
      for (std::size_t k = 0; k < n * n; ++k) {
        const double target_v = gt.values.values[k];
        const double style_v = gs.values.values[k];
        const double d = same_m ? target_v - style_v : target_v - ratio * style_v;
        sum += d * d;
        grad.values[k] += static_cast<T>(grad_scale * d);
      }
      r.loss += coef * sum / denom;
    }
    r.grad.emplace(layer, std::move(grad));
  }
  return r;
}

double total_loss(double content_term, double style_term,
                  const LossWeights& weights) {
  if (!std::isfinite(content_term) || !std::isfinite(style_term)) {
    throw NumericError("total_loss: non-finite loss term (content=" +
                       std::to_string(content_term) +
                       ", style=" + std::to_string(style_term) + ")");
  }
  const double total = weights.alpha * content_term + weights.beta * style_term;
  if (!std::isfinite(total)) {
    throw NumericError("total_loss: weighted total overflowed");
  }
  return total;
}

template ContentLossResult<float> content_loss<float>(const BasicTensor<float>&,
                                                      const BasicTensor<float>&);
template ContentLossResult<double> content_loss<double>(
    const BasicTensor<double>&, const BasicTensor<double>&);
template StyleLossResult<float> style_loss<float>(
    const std::map<std::string, GramMatrix<float>>&,
    const std::vector<StyleSpec<float>>&, const LossWeights&);
template StyleLossResult<double> style_loss<double>(
    const std::map<std::string, GramMatrix<double>>&,
    const std::vector<StyleSpec<double>>&, const LossWeights&);
template StyleSpec<double> StyleSpec<float>::cast<double>() const;
template StyleSpec<float> StyleSpec<double>::cast<float>() const;
template StyleSpec<float> StyleSpec<float>::cast<float>() const;
template StyleSpec<double> StyleSpec<double>::cast<double>() const;

}  // namespace styleforge
