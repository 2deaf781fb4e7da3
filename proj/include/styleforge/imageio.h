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

#ifndef STYLEFORGE_IMAGEIO_H_
#define STYLEFORGE_IMAGEIO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "styleforge/tensor.h"

namespace styleforge {

struct NormalizationSpec {
  std::array<double, 3> mean = {0.485, 0.456, 0.406};
  std::array<double, 3> std = {0.229, 0.224, 0.225};
  std::size_t max_dim = 400;

  // Throws ValidationError unless std > 0 and max_dim >= 32.
  void validate() const;
};

inline constexpr std::size_t kMinImageDim = 32;

// Interleaved 8-bit RGB.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // height * width * 3
};

// Decodes PNG or JPEG (detected from the file signature) to RGB.
// Throws IoError if the file cannot be read, FormatError otherwise.
RgbImage read_image(const std::filesystem::path& path);

// 8-bit RGB PNG, no alpha.
void write_png(const std::filesystem::path& path, const RgbImage& image);

// Output size that makes the longest side max_dim, keeping the aspect
// ratio (the short side is floored).
std::array<std::size_t, 2> fit_longest_side(std::size_t width,
                                            std::size_t height,
                                            std::size_t max_dim);

// Bilinear resize of a planar float image [1,c,h,w] with half-pixel centers:
// output pixel (x, y) samples the source at ((x + 0.5) * sw / dw - 0.5, ...),
// clamped to the border. Each output is a convex combination of source
// values, so the value range is preserved.
Tensor resize_bilinear(const Tensor& image, std::size_t out_h,
                       std::size_t out_w);

// Decode, resize longest side to spec.max_dim, scale to [0,1], then
// (x - mean) / std per channel. Returns [1,3,h,w]. Throws
// DegenerateInputError if either output side is below 32.
Tensor load_normalize(const std::filesystem::path& path,
                      const NormalizationSpec& spec);

// Inverse of the normalization: x * std + mean, times 255, rounded half to
// even and clamped to [0,255].
RgbImage denormalize(const Tensor& image, const NormalizationSpec& spec);

void denormalize_save(const Tensor& image, const NormalizationSpec& spec,
                      const std::filesystem::path& path);

}  // namespace styleforge

#endif  // STYLEFORGE_IMAGEIO_H_
