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

#ifndef STYLEFORGE_ENGINE_H_
#define STYLEFORGE_ENGINE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "styleforge/adam.h"
#include "styleforge/gram.h"
#include "styleforge/losses.h"
#include "styleforge/tensor.h"
#include "styleforge/vgg19.h"

namespace styleforge {

enum class MultiStyleMode { kSequential, kBlended };

const char* to_string(MultiStyleMode mode);

struct RunConfig {
  double alpha = 1.0;
  double beta = 1e9;
  std::map<std::string, double> layer_weights = LossWeights{}.layer_weights;
  double lr = 0.003;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t steps = 2000;
  std::size_t snapshot_every = 400;
  MultiStyleMode mode = MultiStyleMode::kSequential;
  std::uint64_t seed = 0;

  // Throws ValidationError on steps == 0, snapshot_every == 0, non-positive
  // lr, or invalid loss weights.
  void validate() const;
  AdamOptions adam() const { return {lr, beta1, beta2, epsilon}; }
};

// Loss values evaluated on the image entering optimizer step `step`
// (1-based), i.e. before that step's update.
struct StepRecord {
  std::size_t step = 0;
  double content_loss = 0.0;
  double style_loss = 0.0;
  double total_loss = 0.0;
};

struct Snapshot {
  std::size_t step = 0;  // image after this many updates
  Tensor image;
};

struct RunReport {
  Tensor final_image;
  std::vector<Snapshot> snapshots;
  std::vector<StepRecord> history;
};

struct RunCallbacks {
  std::function<void(const StepRecord&)> on_step;
  std::function<void(const Snapshot&)> on_snapshot;
};

// Multiples of `every` up to `steps`, plus `steps` itself.
std::vector<std::size_t> snapshot_steps(std::size_t steps, std::size_t every);

// Gram targets at the five style layers of one style image.
StyleSpec<float> precompute_style(const Tensor& style_image,
                                  const VggWeights<float>& weights,
                                  std::string name = {},
                                  double blend_weight = 1.0);

template <typename T>
struct ObjectiveValue {
  double content_loss = 0.0;
  double style_loss = 0.0;
  double total_loss = 0.0;
  BasicTensor<T> grad;  // d total / d image; empty unless requested
};

inline std::set<std::string> objective_capture_set() {
  std::set<std::string> s{std::string(kContentLayer)};
  for (auto l : kStyleLayers) s.emplace(l);
  return s;
}

// The full objective alpha * L_content + beta * L_style at `image`, and
// optionally its gradient with respect to the image.
template <typename T, ConvWeightSource<T> W>
ObjectiveValue<T> evaluate_objective(const BasicTensor<T>& image,
                                     const BasicTensor<T>& content_features,
                                     const std::vector<StyleSpec<T>>& styles,
                                     const LossWeights& loss_weights,
                                     const W& weights, bool with_grad = true) {
  FeatureSet<T> fs =
      forward_capture(image, weights, objective_capture_set(), with_grad);
  ContentLossResult<T> content =
      content_loss(fs.at(kContentLayer), content_features);
  std::map<std::string, GramMatrix<T>> grams;
  for (auto layer : kStyleLayers) {
    grams.emplace(std::string(layer), gram(fs.at(layer), std::string(layer)));
  }
  StyleLossResult<T> style = style_loss(grams, styles, loss_weights);

  ObjectiveValue<T> out;
  out.content_loss = content.loss;
  out.style_loss = style.loss;
  out.total_loss = total_loss(content.loss, style.loss, loss_weights);
  if (!with_grad) return out;

  std::map<std::string, BasicTensor<T>> grads;
  const T alpha = static_cast<T>(loss_weights.alpha);
  for (T& g : content.grad.data()) g *= alpha;
  grads.emplace(std::string(kContentLayer), std::move(content.grad));
  const T beta = static_cast<T>(loss_weights.beta);
  for (auto& [layer, grad_gram] : style.grad) {
    for (T& g : grad_gram.values) g *= beta;
    grads.emplace(layer, gram_backward(grad_gram, fs.at(layer)));
  }
  out.grad = backward_to_input(fs, weights, grads);
  return out;
}

// Loss weights for one optimization over `styles`: the blend vector is the
// styles' blend weights normalized to sum to 1.
LossWeights loss_weights_for(const RunConfig& cfg,
                             const std::vector<StyleSpec<float>>& styles);

// One optimization run. The target starts as an exact copy of `content`;
// every step evaluates the objective and its gradient, then takes an Adam
// step. Throws NumericError naming the step and the last finite losses if
// the objective diverges.
RunReport run_single(const Tensor& content,
                     const std::vector<StyleSpec<float>>& styles,
                     const RunConfig& cfg, const VggWeights<float>& weights,
                     const RunCallbacks& callbacks = {});

// Thrown by run_sequential when a stage fails; carries the reports of the
// stages that completed.
class ChainError : public Error {
 public:
  ChainError(std::size_t stage, std::vector<RunReport> completed,
             const std::string& cause);
  std::size_t stage() const { return stage_; }
  const std::vector<RunReport>& completed() const { return completed_; }

 private:
  std::size_t stage_;
  std::vector<RunReport> completed_;
};

// Applies the styles one after another. Stage k uses the final image of
// stage k-1 as both its content target and its initialization, and gets the
// full cfg.steps budget. A style's blend weight w_k (normalized over all
// styles) scales that stage's beta by n * w_k, so uniform weights leave beta
// unchanged.
std::vector<RunReport> run_sequential(
    const Tensor& content, const std::vector<StyleSpec<float>>& styles,
    const RunConfig& cfg, const VggWeights<float>& weights,
    const std::function<RunCallbacks(std::size_t stage)>& stage_callbacks = {});

}  // namespace styleforge

#endif  // STYLEFORGE_ENGINE_H_
