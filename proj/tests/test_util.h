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

#ifndef STYLEFORGE_TESTS_TEST_UTIL_H_
#define STYLEFORGE_TESTS_TEST_UTIL_H_

// Test-only oracles and fixtures. Everything here is written independently
// of the optimized kernels it is used to check.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include <unistd.h>

#include "styleforge/tensor.h"
#include "styleforge/vgg19.h"

namespace styleforge::testing {

template <typename T>
BasicTensor<T> random_tensor(const Shape& s, std::mt19937_64& rng, double lo = -1.0,
                             double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  BasicTensor<T> t(s);
  for (T& v : t.data()) v = static_cast<T>(u(rng));
  return t;
}

// Direct six-loop convolution, accumulated in double.
template <typename T>
BasicTensor<double> naive_conv(const BasicTensor<T>& in, const BasicTensor<T>& k,
                               const std::vector<T>& bias) {
  const Shape& s = in.shape();
  const std::size_t co = k.shape().n;
  BasicTensor<double> out(Shape{s.n, co, s.h, s.w});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t o = 0; o < co; ++o)
      for (std::size_t y = 0; y < s.h; ++y)
        for (std::size_t x = 0; x < s.w; ++x) {
          double acc = bias[o];
          for (std::size_t i = 0; i < s.c; ++i)
            for (int dy = 0; dy < 3; ++dy)
              for (int dx = 0; dx < 3; ++dx) {
                const long sy = static_cast<long>(y) + dy - 1;
                const long sx = static_cast<long>(x) + dx - 1;
                if (sy < 0 || sx < 0 || sy >= static_cast<long>(s.h) ||
                    sx >= static_cast<long>(s.w))
                  continue;
                acc += static_cast<double>(in.at(n, i, sy, sx)) *
                       static_cast<double>(k.at(o, i, dy, dx));
              }
          out.at(n, o, y, x) = acc;
        }
  return out;
}

// Per-window brute-force 2x2 max.
template <typename T>
BasicTensor<T> naive_pool(const BasicTensor<T>& in) {
  const Shape& s = in.shape();
  BasicTensor<T> out(Shape{s.n, s.c, s.h / 2, s.w / 2});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t y = 0; y < s.h / 2; ++y)
        for (std::size_t x = 0; x < s.w / 2; ++x) {
          T m = in.at(n, c, 2 * y, 2 * x);
          for (std::size_t dy = 0; dy < 2; ++dy)
            for (std::size_t dx = 0; dx < 2; ++dx)
              m = std::max(m, in.at(n, c, 2 * y + dy, 2 * x + dx));
          out.at(n, c, y, x) = m;
        }
  return out;
}

// Independent VGG forward built from the naive oracles: post-ReLU
// activations of every conv layer up to and including `last`.
inline std::map<std::string, BasicTensor<double>> naive_vgg_forward(
    const BasicTensor<double>& image, const VggWeights<double>& w, std::string_view last) {
  std::map<std::string, BasicTensor<double>> out;
  BasicTensor<double> x = image;
  for (std::size_t i = 0; i < kVggConvCount; ++i) {
    const auto& p = w.conv(i);
    BasicTensor<double> y = naive_conv(x, p.kernel, p.bias);
    for (double& v : y.data()) v = std::max(v, 0.0);
    out.emplace(std::string(kVggLayers[i].name), y);
    if (kVggLayers[i].name == last) return out;
    x = kVggLayers[i].pool_after ? naive_pool(y) : y;
  }
  throw std::logic_error("unknown layer");
}

// Central finite difference of f at coordinate idx of x.
inline double central_difference(const std::function<double(const TensorD&)>& f,
                                  const TensorD& x, std::size_t idx, double h = 1e-4) {
  TensorD p = x;
  p[idx] = x[idx] + h;
  const double up = f(p);
  p[idx] = x[idx] - h;
  const double down = f(p);
  return (up - down) / (2.0 * h);
}

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// Smooth content-like image in roughly normalized range: color gradients
// plus a bright disk.
inline Tensor content_fixture(std::size_t h, std::size_t w) {
  Tensor t(Shape{1, 3, h, w});
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const double u = static_cast<double>(x) / static_cast<double>(w);
      const double v = static_cast<double>(y) / static_cast<double>(h);
      const double r = std::hypot(u - 0.55, v - 0.45);
      const double disk = r < 0.25 ? 1.0 : 0.0;
      t.at(0, 0, y, x) = static_cast<float>(2.0 * u - 1.0 + disk);
      t.at(0, 1, y, x) = static_cast<float>(1.0 - 2.0 * v + 0.5 * disk);
      t.at(0, 2, y, x) = static_cast<float>(std::sin(3.0 * u + 2.0 * v) - disk);
    }
  return t;
}

// Periodic colored texture: diagonal stripes crossed with a checker, period
// `period` pixels in both directions.
inline Tensor texture_fixture(std::size_t h, std::size_t w, std::size_t period = 8) {
  Tensor t(Shape{1, 3, h, w});
  const double k = 2.0 * std::numbers::pi / static_cast<double>(period);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      const double a = std::sin(k * static_cast<double>(x + y));
      const double checker = ((x / (period / 2) + y / (period / 2)) % 2) ? 1.0 : -1.0;
      t.at(0, 0, y, x) = static_cast<float>(1.5 * a);
      t.at(0, 1, y, x) = static_cast<float>(1.2 * checker);
      t.at(0, 2, y, x) = static_cast<float>(0.8 * a * checker - 0.5);
    }
  return t;
}

// Random weights shared across tests in one binary (generation is not free).
inline const VggWeights<float>& shared_weights() {
  static const VggWeights<float> w = make_random_vgg_weights(20261014);
  return w;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("styleforge_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace styleforge::testing

#endif  // STYLEFORGE_TESTS_TEST_UTIL_H_
