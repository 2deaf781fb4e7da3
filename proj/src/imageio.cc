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

#include "styleforge/imageio.h"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

namespace styleforge {
namespace {

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open image " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("failed reading image " + path.string());
  return bytes;
}

bool is_png(const std::vector<unsigned char>& b) {
  static constexpr unsigned char kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  return b.size() >= 8 && std::memcmp(b.data(), kSig, 8) == 0;
}

bool is_jpeg(const std::vector<unsigned char>& b) {
  return b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF;
}

RgbImage decode_png(const std::vector<unsigned char>& bytes,
                    const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw FormatError("PNG decode failed for " + path.string() + ": " +
                      png.message);
  }
  png.format = PNG_FORMAT_RGB;
  RgbImage out{png.width, png.height, {}};
  out.pixels.resize(PNG_IMAGE_SIZE(png));
  // Alpha, if present, is composited over white.
  png_color background{255, 255, 255};
  if (!png_image_finish_read(&png, &background, out.pixels.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw FormatError("PNG decode failed for " + path.string() + ": " + msg);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_silent(j_common_ptr) {}

// Returns false (with err.message set) on decode failure. Kept free of
// objects with destructors because of the longjmp error path.
bool decode_jpeg_raw(const unsigned char* data, std::size_t size,
                     RgbImage& out, JpegErrorManager& err) {
  jpeg_decompress_struct cinfo;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.output_message = jpeg_silent;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out.width = cinfo.output_width;
  out.height = cinfo.output_height;
  out.pixels.resize(out.width * out.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.pixels.data() + cinfo.output_scanline * out.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

RgbImage decode_jpeg(const std::vector<unsigned char>& bytes,
                     const std::filesystem::path& path) {
  RgbImage out;
  JpegErrorManager err{};
  if (!decode_jpeg_raw(bytes.data(), bytes.size(), out, err)) {
    throw FormatError("JPEG decode failed for " + path.string() + ": " +
                      err.message);
  }
  return out;
}

}  // namespace

void NormalizationSpec::validate() const {
  for (double s : std) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ValidationError("normalization std must be > 0 per channel");
    }
  }
  for (double m : mean) {
    if (!std::isfinite(m)) throw ValidationError("normalization mean must be finite");
  }
  if (max_dim < kMinImageDim) {
    throw ValidationError("image size must be >= " + std::to_string(kMinImageDim));
  }
}

RgbImage read_image(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (is_png(bytes)) return decode_png(bytes, path);
  if (is_jpeg(bytes)) return decode_jpeg(bytes, path);
  throw FormatError("unsupported image format (expected PNG or JPEG): " +
                    path.string());
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  if (image.pixels.size() != image.width * image.height * 3) {
    throw ShapeError("write_png: pixel buffer does not match dimensions");
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.pixels.data(), 0,
                               nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + png.message);
  }
}

std::array<std::size_t, 2> fit_longest_side(std::size_t width,
                                            std::size_t height,
                                            std::size_t max_dim) {
  if (width >= height) {
    return {max_dim, height * max_dim / width};
  }
  return {width * max_dim / height, max_dim};
}

Tensor resize_bilinear(const Tensor& image, std::size_t out_h,
                       std::size_t out_w) {
  const Shape& s = image.shape();
  if (out_h == s.h && out_w == s.w) return image;
  Tensor out(Shape{s.n, s.c, out_h, out_w});

  // Precompute the two taps and weight per output column / row.
  struct Tap {
    std::size_t lo, hi;
    float frac;
  };
  auto taps = [](std::size_t in, std::size_t outn) {
    std::vector<Tap> t(outn);
    const double scale = static_cast<double>(in) / static_cast<double>(outn);
    for (std::size_t i = 0; i < outn; ++i) {
      double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const auto lo = static_cast<std::size_t>(std::floor(src));
      const std::size_t hi = std::min(lo + 1, in - 1);
      t[i] = {lo, hi, static_cast<float>(src - static_cast<double>(lo))};
    }
    return t;
  };
  const auto xs = taps(s.w, out_w);
  const auto ys = taps(s.h, out_h);

  for (std::size_t n = 0; n < s.n; ++n) {
    for (std::size_t c = 0; c < s.c; ++c) {
      auto src = image.channel(n, c);
      auto dst = out.channel(n, c);
      for (std::size_t y = 0; y < out_h; ++y) {
        const Tap& ty = ys[y];
        const float* r0 = src.data() + ty.lo * s.w;
        const float* r1 = src.data() + ty.hi * s.w;
        for (std::size_t x = 0; x < out_w; ++x) {
          const Tap& tx = xs[x];
          const float top = r0[tx.lo] + (r0[tx.hi] - r0[tx.lo]) * tx.frac;
          const float bot = r1[tx.lo] + (r1[tx.hi] - r1[tx.lo]) * tx.frac;
          float v = top + (bot - top) * ty.frac;
          // Guard the convex-combination bound against rounding.
          const float lo = std::min({r0[tx.lo], r0[tx.hi], r1[tx.lo], r1[tx.hi]});
          const float hi = std::max({r0[tx.lo], r0[tx.hi], r1[tx.lo], r1[tx.hi]});
          dst[y * out_w + x] = std::clamp(v, lo, hi);
        }
      }
    }
  }
  return out;
}

Tensor load_normalize(const std::filesystem::path& path,
                      const NormalizationSpec& spec) {
  spec.validate();
  const RgbImage rgb = read_image(path);
  if (rgb.width == 0 || rgb.height == 0) {
    throw DegenerateInputError("image " + path.string() + " is empty");
  }
  Tensor planar(Shape{1, 3, rgb.height, rgb.width});
  const std::size_t plane = rgb.width * rgb.height;
  for (std::size_t i = 0; i < plane; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      planar[c * plane + i] = static_cast<float>(rgb.pixels[i * 3 + c]) / 255.0f;
    }
  }
  const auto [out_w, out_h] = fit_longest_side(rgb.width, rgb.height, spec.max_dim);
  if (out_w < kMinImageDim || out_h < kMinImageDim) {
    throw DegenerateInputError("image " + path.string() + " resizes to " +
                               std::to_string(out_w) + "x" + std::to_string(out_h) +
                               ", below the " + std::to_string(kMinImageDim) +
                               " pixel minimum");
  }
  Tensor resized = resize_bilinear(planar, out_h, out_w);
  for (std::size_t c = 0; c < 3; ++c) {
    const float mean = static_cast<float>(spec.mean[c]);
    const float std = static_cast<float>(spec.std[c]);
    for (float& v : resized.channel(0, c)) v = (v - mean) / std;
  }
  return resized;
}

RgbImage denormalize(const Tensor& image, const NormalizationSpec& spec) {
  const Shape& s = image.shape();
  if (s.n != 1 || s.c != 3) {
    throw ShapeError("denormalize: image must be [1,3,h,w], got " + s.str());
  }
  RgbImage out{s.w, s.h, std::vector<std::uint8_t>(s.w * s.h * 3)};
  const std::size_t plane = s.plane();
  for (std::size_t c = 0; c < 3; ++c) {
    const float mean = static_cast<float>(spec.mean[c]);
    const float std = static_cast<float>(spec.std[c]);
    auto src = image.channel(0, c);
    for (std::size_t i = 0; i < plane; ++i) {
      const float v = (src[i] * std + mean) * 255.0f;
      if (!std::isfinite(v)) {
        throw NumericError("denormalize: non-finite pixel value");
      }
      const float q = std::clamp(std::nearbyint(v), 0.0f, 255.0f);
      out.pixels[i * 3 + c] = static_cast<std::uint8_t>(q);
    }
  }
  return out;
}

void denormalize_save(const Tensor& image, const NormalizationSpec& spec,
                      const std::filesystem::path& path) {
  write_png(path, denormalize(image, spec));
}

}  // namespace styleforge
