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

#include "styleforge/engine.h"

#include <cmath>
#include <sstream>

namespace styleforge {

const char* to_string(MultiStyleMode mode) {
  return mode == MultiStyleMode::kSequential ? "sequential" : "blended";
}

void RunConfig::validate() const {
  if (steps == 0) throw ValidationError("steps must be >= 1");
  if (snapshot_every == 0) throw ValidationError("snapshot interval must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw ValidationError("learning rate must be > 0");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ValidationError("Adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ValidationError("Adam epsilon must be > 0");
  LossWeights lw;
  lw.alpha = alpha;
  lw.beta = beta;
  lw.layer_weights = layer_weights;
  lw.validate();
}

std::vector<std::size_t> snapshot_steps(std::size_t steps, std::size_t every) {
  std::vector<std::size_t> out;
  if (every == 0) return out;
  for (std::size_t s = every; s <= steps; s += every) out.push_back(s);
  if (steps > 0 && (out.empty() || out.back() != steps)) out.push_back(steps);
  return out;
}

StyleSpec<float> precompute_style(const Tensor& style_image,
                                  const VggWeights<float>& weights,
                                  std::string name, double blend_weight) {
  std::set<std::string> capture;
  for (auto l : kStyleLayers) capture.emplace(l);
  FeatureSet<float> fs =
      forward_capture(style_image, weights, capture, /*retain_tape=*/false);
  StyleSpec<float> spec{std::move(name), {}, blend_weight};
  for (auto l : kStyleLayers) {
    const std::string layer(l);
    spec.grams.emplace(layer, gram(fs.at(layer), layer));
  }
  return spec;
}

LossWeights loss_weights_for(const RunConfig& cfg,
                             const std::vector<StyleSpec<float>>& styles) {
  if (styles.empty()) throw ValidationError("at least one style is required");
  LossWeights lw;
  lw.alpha = cfg.alpha;
  lw.beta = cfg.beta;
  lw.layer_weights = cfg.layer_weights;
  double sum = 0.0;
  for (const auto& s : styles) {
    if (!(s.blend_weight >= 0.0) || !std::isfinite(s.blend_weight)) {
      throw ValidationError("style '" + s.name + "' has an invalid blend weight");
    }
    sum += s.blend_weight;
  }
  if (!(sum > 0.0)) throw ValidationError("style blend weights sum to zero");
  lw.style_blend.clear();
  for (const auto& s : styles) lw.style_blend.push_back(s.blend_weight / sum);
  lw.validate();
  return lw;
}

RunReport run_single(const Tensor& content,
                     const std::vector<StyleSpec<float>>& styles,
                     const RunConfig& cfg, const VggWeights<float>& weights,
                     const RunCallbacks& callbacks) {
  cfg.validate();
  const LossWeights lw = loss_weights_for(cfg, styles);

  const std::set<std::string> content_layer{std::string(kContentLayer)};
  const Tensor content_features =
      forward_capture(content, weights, content_layer, /*retain_tape=*/false)
          .at(kContentLayer);

  RunReport report;
  report.final_image = content;
  report.history.reserve(cfg.steps);
  Tensor& target = report.final_image;
  AdamState<float> adam(target.shape(), cfg.adam());

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    ObjectiveValue<float> obj;
    try {
      obj = evaluate_objective(target, content_features, styles, lw, weights);
      adam_step(target, obj.grad, adam);
    } catch (const NumericError& e) {
      std::ostringstream msg;
      msg << "optimization diverged at step " << step << ": " << e.what();
      if (!report.history.empty()) {
        const StepRecord& last = report.history.back();
        msg << " (last finite losses at step " << last.step
            << ": content=" << last.content_loss
            << " style=" << last.style_loss << " total=" << last.total_loss
            << ")";
      }
      throw NumericError(msg.str());
    }
    StepRecord rec{step, obj.content_loss, obj.style_loss, obj.total_loss};
    report.history.push_back(rec);
    if (callbacks.on_step) callbacks.on_step(rec);
    if (step % cfg.snapshot_every == 0 || step == cfg.steps) {
      report.snapshots.push_back({step, target});
      if (callbacks.on_snapshot) callbacks.on_snapshot(report.snapshots.back());
    }
  }
  return report;
}

ChainError::ChainError(std::size_t stage, std::vector<RunReport> completed,
                       const std::string& cause)
    : Error("sequential stage " + std::to_string(stage + 1) + " failed: " +
            cause),
      stage_(stage),
      completed_(std::move(completed)) {}

std::vector<RunReport> run_sequential(
    const Tensor& content, const std::vector<StyleSpec<float>>& styles,
    const RunConfig& cfg, const VggWeights<float>& weights,
    const std::function<RunCallbacks(std::size_t stage)>& stage_callbacks) {
  const LossWeights blend = loss_weights_for(cfg, styles);
  const double n = static_cast<double>(styles.size());
  std::vector<RunReport> reports;
  reports.reserve(styles.size());
  for (std::size_t k = 0; k < styles.size(); ++k) {
    const Tensor& init = reports.empty() ? content : reports.back().final_image;
    RunConfig stage_cfg = cfg;
    // n * w_k is exactly 1 for a single style or uniform weights.
    const double scale = n * blend.style_blend[k];
    if (scale != 1.0) stage_cfg.beta = cfg.beta * scale;
    StyleSpec<float> style = styles[k];
    style.blend_weight = 1.0;
    try {
      RunCallbacks cb = stage_callbacks ? stage_callbacks(k) : RunCallbacks{};
      reports.push_back(run_single(init, {style}, stage_cfg, weights, cb));
    } catch (const Error& e) {
      throw ChainError(k, std::move(reports), e.what());
    }
  }
  return reports;
}

}  // namespace styleforge
