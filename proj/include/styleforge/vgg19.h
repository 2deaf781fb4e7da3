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

#ifndef STYLEFORGE_VGG19_H_
#define STYLEFORGE_VGG19_H_

#include <array>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "styleforge/kernels.h"
#include "styleforge/tensor.h"

namespace styleforge {

// Static description of one VGG19 convolution. Every conv is followed by a
// ReLU; pool_after marks the 2x2 max-pool closing each block.
struct ConvLayerInfo {
  std::string_view name;
  int block;
  std::size_t c_in;
  std::size_t c_out;
  bool pool_after;
};

inline constexpr std::size_t kVggConvCount = 16;

inline constexpr std::array<ConvLayerInfo, kVggConvCount> kVggLayers = {{
    {"conv1_1", 1, 3, 64, false},     {"conv1_2", 1, 64, 64, true},
    {"conv2_1", 2, 64, 128, false},   {"conv2_2", 2, 128, 128, true},
    {"conv3_1", 3, 128, 256, false},  {"conv3_2", 3, 256, 256, false},
    {"conv3_3", 3, 256, 256, false},  {"conv3_4", 3, 256, 256, true},
    {"conv4_1", 4, 256, 512, false},  {"conv4_2", 4, 512, 512, false},
    {"conv4_3", 4, 512, 512, false},  {"conv4_4", 4, 512, 512, true},
    {"conv5_1", 5, 512, 512, false},  {"conv5_2", 5, 512, 512, false},
    {"conv5_3", 5, 512, 512, false},  {"conv5_4", 5, 512, 512, true},
}};

inline constexpr std::string_view kContentLayer = "conv4_2";
inline constexpr std::array<std::string_view, 5> kStyleLayers = {
    "conv1_1", "conv2_1", "conv3_1", "conv4_1", "conv5_1"};
// Layers forward_capture is allowed to record.
inline constexpr std::array<std::string_view, 6> kCaptureLayers = {
    "conv1_1", "conv2_1", "conv3_1", "conv4_1", "conv4_2", "conv5_1"};

// Index into kVggLayers, or nullopt for an unknown name.
std::optional<std::size_t> vgg_layer_index(std::string_view name);

bool is_capture_layer(std::string_view name);

template <typename T>
struct ConvParams {
  BasicTensor<T> kernel;  // [c_out, c_in, 3, 3]
  std::vector<T> bias;    // [c_out]
};

// Frozen weights for all 16 conv layers, in network order.
template <typename T>
class VggWeights {
 public:
  // Throws ShapeError / CompletenessError unless every layer has the
  // canonical shape.
  explicit VggWeights(std::array<ConvParams<T>, kVggConvCount> layers);

  const ConvParams<T>& conv(std::size_t index) const { return layers_[index]; }

  template <typename U>
  VggWeights<U> cast() const {
    std::array<ConvParams<U>, kVggConvCount> out;
    for (std::size_t i = 0; i < kVggConvCount; ++i) {
      out[i].kernel = layers_[i].kernel.template cast<U>();
      out[i].bias.assign(layers_[i].bias.begin(), layers_[i].bias.end());
    }
    return VggWeights<U>(std::move(out));
  }

 private:
  std::array<ConvParams<T>, kVggConvCount> layers_;
};

// Anything that hands out conv parameters by layer index. Lets tests wrap
// the weights to observe which layers a pass touches.
template <typename W, typename T>
concept ConvWeightSource = requires(const W& w, std::size_t i) {
  { w.conv(i) } -> std::convertible_to<const ConvParams<T>&>;
};

// Reads the 16 "convB_L.weight"/"convB_L.bias" entries from a VGGW file.
// Throws FormatError, CompletenessError (naming the missing layer) or
// ShapeError (expected vs found).
VggWeights<float> load_weights(const std::filesystem::path& path);

// Fills every kernel with He-normal noise (std = sqrt(2 / fan_in)) and
// biases with small uniform noise. Deterministic for a given seed.
VggWeights<float> make_random_vgg_weights(std::uint64_t seed);

// Optional "ref.input" / "ref.<layer>" entries of a VGGW file, used for
// parity checks against an external implementation.
struct ReferenceBundle {
  Tensor input;
  std::map<std::string, Tensor> activations;
};
std::optional<ReferenceBundle> load_reference_bundle(
    const std::filesystem::path& path);

// Writes weights (and optionally a reference bundle) in VGGW format.
void save_weights(const std::filesystem::path& path,
                  const VggWeights<float>& weights,
                  const ReferenceBundle* reference = nullptr);

// Post-ReLU activations captured during a forward pass, plus the tape needed
// to backpropagate to the image.
template <typename T>
struct FeatureSet {
  struct Tape {
    Shape input_shape;
    // Post-ReLU output of every executed conv, in order.
    std::vector<BasicTensor<T>> activations;
    // pools[i] holds the argmax record of the pool following conv i.
    std::vector<std::optional<PoolIndices>> pools;
  };

  std::map<std::string, BasicTensor<T>> captures;
  std::optional<Tape> tape;

  const BasicTensor<T>& at(std::string_view layer) const;
};

namespace detail {
void validate_capture(const std::set<std::string>& capture);
void validate_image(const Shape& image);
std::size_t deepest_layer(const std::set<std::string>& capture);
}  // namespace detail

// Runs conv -> ReLU (and the block-closing max-pools) up to the deepest
// requested layer only; nothing deeper is read or executed.
template <typename T, ConvWeightSource<T> W>
FeatureSet<T> forward_capture(const BasicTensor<T>& image, const W& weights,
                              const std::set<std::string>& capture,
                              bool retain_tape = true) {
  detail::validate_image(image.shape());
  detail::validate_capture(capture);
  const std::size_t last = detail::deepest_layer(capture);

  FeatureSet<T> fs;
  typename FeatureSet<T>::Tape tape;
  tape.input_shape = image.shape();
  BasicTensor<T> x = image;
  for (std::size_t i = 0; i <= last; ++i) {
    const ConvParams<T>& p = weights.conv(i);
    BasicTensor<T> act =
        relu_forward(conv2d_forward(x, p.kernel, std::span<const T>(p.bias)));
    const std::string name(kVggLayers[i].name);
    if (capture.contains(name)) fs.captures.emplace(name, act);
    std::optional<PoolIndices> pool;
    if (kVggLayers[i].pool_after && i < last) {
      PoolResult<T> pooled = pool2x2_forward(act);
      x = std::move(pooled.output);
      pool = std::move(pooled.indices);
    } else if (i < last) {
      x = act;
    }
    if (retain_tape) {
      tape.activations.push_back(std::move(act));
      tape.pools.push_back(std::move(pool));
    }
  }
  if (retain_tape) fs.tape = std::move(tape);
  return fs;
}

namespace detail {
template <typename T>
void validate_grads(const FeatureSet<T>& fs,
                    const std::map<std::string, BasicTensor<T>>& grads) {
  for (const auto& [name, g] : grads) {
    auto it = fs.captures.find(name);
    if (it == fs.captures.end()) {
      throw ValidationError("backward_to_input: gradient for '" + name +
                            "' but that layer was not captured");
    }
    require_same_shape(g.shape(), it->second.shape(), "backward_to_input");
  }
}
}  // namespace detail

// Pulls dL/d(capture) back to dL/d(image). Contributions from several
// captures are summed where their paths merge.
template <typename T, ConvWeightSource<T> W>
BasicTensor<T> backward_to_input(
    const FeatureSet<T>& fs, const W& weights,
    const std::map<std::string, BasicTensor<T>>& grads) {
  if (!fs.tape) {
    throw StateError("backward_to_input: feature set was built without a tape");
  }
  detail::validate_grads(fs, grads);
  const auto& tape = *fs.tape;
  std::optional<BasicTensor<T>> g;
  for (std::size_t i = tape.activations.size(); i-- > 0;) {
    auto it = grads.find(std::string(kVggLayers[i].name));
    if (it != grads.end()) {
      if (g) {
        T* dst = g->raw();
        const T* src = it->second.raw();
        for (std::size_t k = 0; k < g->size(); ++k) dst[k] += src[k];
      } else {
        g = it->second;
      }
    }
    if (!g) continue;
    BasicTensor<T> pre = relu_backward(*g, tape.activations[i]);
    g = conv2d_input_grad(pre, weights.conv(i).kernel);
    if (i > 0 && tape.pools[i - 1]) {
      g = pool2x2_backward(*g, *tape.pools[i - 1]);
    }
  }
  if (!g) return BasicTensor<T>(tape.input_shape);
  return std::move(*g);
}

extern template class VggWeights<float>;
extern template class VggWeights<double>;
extern template struct FeatureSet<float>;
extern template struct FeatureSet<double>;

}  // namespace styleforge

#endif  // STYLEFORGE_VGG19_H_
