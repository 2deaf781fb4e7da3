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

#include "styleforge/vgg19.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "styleforge/vggw.h"

namespace styleforge {
namespace {

std::string weight_name(std::string_view layer) {
  return std::string(layer) + ".weight";
}
std::string bias_name(std::string_view layer) {
  return std::string(layer) + ".bias";
}

std::string dims_str(const std::vector<std::uint32_t>& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

Tensor tensor_from_entry(const vggw::Entry& e) {
  Shape s;
  switch (e.dims.size()) {
    case 4: s = {e.dims[0], e.dims[1], e.dims[2], e.dims[3]}; break;
    case 3: s = {1, e.dims[0], e.dims[1], e.dims[2]}; break;
    default:
      throw ShapeError("entry '" + e.name + "' has rank " +
                       std::to_string(e.dims.size()) +
                       ", expected a 3-D or 4-D tensor");
  }
  return Tensor(s, e.values);
}

vggw::Entry entry_from_tensor(std::string name, const Tensor& t) {
  const Shape& s = t.shape();
  return {std::move(name),
          {static_cast<std::uint32_t>(s.n), static_cast<std::uint32_t>(s.c),
           static_cast<std::uint32_t>(s.h), static_cast<std::uint32_t>(s.w)},
          std::vector<float>(t.data().begin(), t.data().end())};
}

}  // namespace

std::optional<std::size_t> vgg_layer_index(std::string_view name) {
  for (std::size_t i = 0; i < kVggLayers.size(); ++i) {
    if (kVggLayers[i].name == name) return i;
  }
  return std::nullopt;
}

bool is_capture_layer(std::string_view name) {
  return std::find(kCaptureLayers.begin(), kCaptureLayers.end(), name) !=
         kCaptureLayers.end();
}

template <typename T>
VggWeights<T>::VggWeights(std::array<ConvParams<T>, kVggConvCount> layers)
    : layers_(std::move(layers)) {
  for (std::size_t i = 0; i < kVggConvCount; ++i) {
    const ConvLayerInfo& info = kVggLayers[i];
    const Shape expected{info.c_out, info.c_in, 3, 3};
    if (layers_[i].kernel.empty()) {
      throw CompletenessError("VGG19 weights: layer " + std::string(info.name) +
                              " has no kernel");
    }
    if (!(layers_[i].kernel.shape() == expected)) {
      throw ShapeError("VGG19 weights: " + std::string(info.name) +
                       " kernel expected " + expected.str() + ", found " +
                       layers_[i].kernel.shape().str());
    }
    if (layers_[i].bias.size() != info.c_out) {
      throw ShapeError("VGG19 weights: " + std::string(info.name) +
                       " bias expected " + std::to_string(info.c_out) +
                       " entries, found " +
                       std::to_string(layers_[i].bias.size()));
    }
  }
}

template <typename T>
const BasicTensor<T>& FeatureSet<T>::at(std::string_view layer) const {
  auto it = captures.find(std::string(layer));
  if (it == captures.end()) {
    throw ValidationError("feature set has no capture for '" +
                          std::string(layer) + "'");
  }
  return it->second;
}

namespace detail {

void validate_capture(const std::set<std::string>& capture) {
  if (capture.empty()) {
    throw ValidationError("forward_capture: capture set is empty");
  }
  for (const auto& name : capture) {
    if (!is_capture_layer(name)) {
      throw ValidationError("forward_capture: '" + name +
                            "' is not a capturable layer");
    }
  }
}

void validate_image(const Shape& image) {
  if (image.n != 1 || image.c != 3) {
    throw ShapeError("forward_capture: image must be [1,3,h,w], got " +
                     image.str());
  }
}

std::size_t deepest_layer(const std::set<std::string>& capture) {
  std::size_t last = 0;
  for (const auto& name : capture) last = std::max(last, *vgg_layer_index(name));
  return last;
}

}  // namespace detail

VggWeights<float> load_weights(const std::filesystem::path& path) {
  const auto entries = vggw::read_file(path);
  std::map<std::string, const vggw::Entry*> by_name;
  for (const auto& e : entries) by_name.emplace(e.name, &e);

  std::array<ConvParams<float>, kVggConvCount> layers;
  for (std::size_t i = 0; i < kVggConvCount; ++i) {
    const ConvLayerInfo& info = kVggLayers[i];
    auto w = by_name.find(weight_name(info.name));
    auto b = by_name.find(bias_name(info.name));
    if (w == by_name.end() || b == by_name.end()) {
      throw CompletenessError("VGG19 weights: missing layer " +
                              std::string(info.name) + " (" +
                              (w == by_name.end() ? weight_name(info.name)
                                                  : bias_name(info.name)) +
                              ")");
    }
    const std::vector<std::uint32_t> want_w = {
        static_cast<std::uint32_t>(info.c_out),
        static_cast<std::uint32_t>(info.c_in), 3, 3};
    if (w->second->dims != want_w) {
      throw ShapeError("VGG19 weights: " + weight_name(info.name) +
                       " expected " + dims_str(want_w) + ", found " +
                       dims_str(w->second->dims));
    }
    const std::vector<std::uint32_t> want_b = {
        static_cast<std::uint32_t>(info.c_out)};
    if (b->second->dims != want_b) {
      throw ShapeError("VGG19 weights: " + bias_name(info.name) + " expected " +
                       dims_str(want_b) + ", found " + dims_str(b->second->dims));
    }
    for (const auto* e : {w->second, b->second}) {
      if (!std::all_of(e->values.begin(), e->values.end(),
                       [](float v) { return std::isfinite(v); })) {
        throw FormatError("VGG19 weights: non-finite value in " + e->name);
      }
    }
    layers[i].kernel = Tensor(Shape{info.c_out, info.c_in, 3, 3}, w->second->values);
    layers[i].bias = b->second->values;
  }
  return VggWeights<float>(std::move(layers));
}

VggWeights<float> make_random_vgg_weights(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::array<ConvParams<float>, kVggConvCount> layers;
  for (std::size_t i = 0; i < kVggConvCount; ++i) {
    const ConvLayerInfo& info = kVggLayers[i];
    const double stddev = std::sqrt(2.0 / static_cast<double>(info.c_in * 9));
    std::normal_distribution<double> normal(0.0, stddev);
    std::uniform_real_distribution<double> uniform(-0.05, 0.05);
    Tensor kernel(Shape{info.c_out, info.c_in, 3, 3});
    for (float& v : kernel.data()) v = static_cast<float>(normal(rng));
    std::vector<float> bias(info.c_out);
    for (float& v : bias) v = static_cast<float>(uniform(rng));
    layers[i] = {std::move(kernel), std::move(bias)};
  }
  return VggWeights<float>(std::move(layers));
}

std::optional<ReferenceBundle> load_reference_bundle(
    const std::filesystem::path& path) {
  const auto entries = vggw::read_file(path);
  ReferenceBundle bundle;
  bool has_input = false;
  for (const auto& e : entries) {
    if (e.name == "ref.input") {
      bundle.input = tensor_from_entry(e);
      has_input = true;
    } else if (e.name.starts_with("ref.")) {
      bundle.activations.emplace(e.name.substr(4), tensor_from_entry(e));
    }
  }
  if (!has_input) return std::nullopt;
  return bundle;
}

void save_weights(const std::filesystem::path& path,
                  const VggWeights<float>& weights,
                  const ReferenceBundle* reference) {
  std::vector<vggw::Entry> entries;
  for (std::size_t i = 0; i < kVggConvCount; ++i) {
    const auto& p = weights.conv(i);
    entries.push_back(entry_from_tensor(weight_name(kVggLayers[i].name), p.kernel));
    entries.push_back({bias_name(kVggLayers[i].name),
                       {static_cast<std::uint32_t>(p.bias.size())},
                       p.bias});
  }
  if (reference != nullptr) {
    entries.push_back(entry_from_tensor("ref.input", reference->input));
    for (std::string_view layer : kCaptureLayers) {
      auto it = reference->activations.find(std::string(layer));
      if (it != reference->activations.end()) {
        entries.push_back(entry_from_tensor("ref." + it->first, it->second));
      }
    }
  }
  vggw::write_file(path, entries);
}

template class VggWeights<float>;
template class VggWeights<double>;
template struct FeatureSet<float>;
template struct FeatureSet<double>;

}  // namespace styleforge
