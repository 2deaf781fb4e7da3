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

#include "styleforge/kernels.h"

#include <algorithm>
#include <cstring>
#include <limits>
#include <string>

#include "styleforge/gemm.h"

namespace styleforge {
namespace {

// im2col buffers are built one strip of output rows at a time so the
// lowered matrix stays around this many elements.
constexpr std::size_t kColBudget = std::size_t{1} << 20;

void check_kernel(const Shape& kernel, std::size_t c_in, const char* op) {
  if (kernel.h != 3 || kernel.w != 3) {
    throw ShapeError(std::string(op) + ": kernel must be [c_out,c_in,3,3], got " +
                     kernel.str());
  }
  if (kernel.c != c_in) {
    throw ShapeError(std::string(op) + ": input channels " +
                     std::to_string(c_in) + " do not match kernel " +
                     kernel.str());
  }
}

std::size_t strip_rows(std::size_t k, std::size_t h, std::size_t w) {
  return std::clamp<std::size_t>(kColBudget / (k * w), 1, h);
}

// col[(ci*9 + dy*3 + dx), (y-y0)*w + x] = in[ci, y+dy-1, x+dx-1] (0 outside).
template <typename T>
void im2col_strip(const T* in, std::size_t c, std::size_t h, std::size_t w,
                  std::size_t y0, std::size_t y1, T* col) {
  const std::size_t sp = (y1 - y0) * w;
  for (std::size_t ci = 0; ci < c; ++ci) {
    const T* plane = in + ci * h * w;
    for (std::size_t dy = 0; dy < 3; ++dy) {
      for (std::size_t dx = 0; dx < 3; ++dx) {
        T* row = col + (ci * 9 + dy * 3 + dx) * sp;
        for (std::size_t y = y0; y < y1; ++y) {
          T* dst = row + (y - y0) * w;
          const std::ptrdiff_t sy =
              static_cast<std::ptrdiff_t>(y) + static_cast<std::ptrdiff_t>(dy) - 1;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) {
            std::fill_n(dst, w, T{0});
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(sy) * w;
          if (dx == 1) {
            std::memcpy(dst, src, w * sizeof(T));
          } else if (dx == 0) {
            dst[0] = T{0};
            std::memcpy(dst + 1, src, (w - 1) * sizeof(T));
          } else {
            std::memcpy(dst, src + 1, (w - 1) * sizeof(T));
            dst[w - 1] = T{0};
          }
        }
      }
    }
  }
}

// Adjoint of im2col_strip: scatters col back, accumulating into in.
template <typename T>
void col2im_strip_add(const T* col, std::size_t c, std::size_t h,
                      std::size_t w, std::size_t y0, std::size_t y1, T* in) {
  const std::size_t sp = (y1 - y0) * w;
  for (std::size_t ci = 0; ci < c; ++ci) {
    T* plane = in + ci * h * w;
    for (std::size_t dy = 0; dy < 3; ++dy) {
      for (std::size_t dx = 0; dx < 3; ++dx) {
        const T* row = col + (ci * 9 + dy * 3 + dx) * sp;
        for (std::size_t y = y0; y < y1; ++y) {
          const T* src = row + (y - y0) * w;
          const std::ptrdiff_t sy =
              static_cast<std::ptrdiff_t>(y) + static_cast<std::ptrdiff_t>(dy) - 1;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
          T* dst = plane + static_cast<std::size_t>(sy) * w;
          if (dx == 1) {
            for (std::size_t x = 0; x < w; ++x) dst[x] += src[x];
          } else if (dx == 0) {
            for (std::size_t x = 1; x < w; ++x) dst[x - 1] += src[x];
          } else {
            for (std::size_t x = 0; x + 1 < w; ++x) dst[x + 1] += src[x];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input,
                              const BasicTensor<T>& kernel,
                              std::span<const T> bias) {
  const Shape& is = input.shape();
  const Shape& ks = kernel.shape();
  check_kernel(ks, is.c, "conv2d_forward");
  if (bias.size() != ks.n) {
    throw ShapeError("conv2d_forward: bias has " + std::to_string(bias.size()) +
                     " entries, kernel " + ks.str() + " needs " +
                     std::to_string(ks.n));
  }
  const std::size_t c_out = ks.n;
  const std::size_t k = is.c * 9;
  const std::size_t plane = is.plane();
  BasicTensor<T> out(Shape{is.n, c_out, is.h, is.w});
  const auto weights = MatrixView<T>::row_major(kernel.raw(), c_out, k);
  const std::size_t rows = strip_rows(k, is.h, is.w);
  std::vector<T> col(k * rows * is.w);

  for (std::size_t n = 0; n < is.n; ++n) {
    const T* in = input.raw() + n * is.c * plane;
    T* dst = out.raw() + n * c_out * plane;
    for (std::size_t o = 0; o < c_out; ++o) {
      std::fill_n(dst + o * plane, plane, bias[o]);
    }
    for (std::size_t y0 = 0; y0 < is.h; y0 += rows) {
      const std::size_t y1 = std::min(is.h, y0 + rows);
      const std::size_t sp = (y1 - y0) * is.w;
      im2col_strip(in, is.c, is.h, is.w, y0, y1, col.data());
      gemm(weights, MatrixView<T>::row_major(col.data(), k, sp),
           dst + y0 * is.w, plane, /*accumulate=*/true);
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> conv2d_input_grad(const BasicTensor<T>& grad_out,
                                 const BasicTensor<T>& kernel) {
  const Shape& gs = grad_out.shape();
  const Shape& ks = kernel.shape();
  if (ks.h != 3 || ks.w != 3 || gs.c != ks.n) {
    throw ShapeError("conv2d_input_grad: grad_out " + gs.str() +
                     " is incompatible with kernel " + ks.str());
  }
  const std::size_t c_out = ks.n;
  const std::size_t c_in = ks.c;
  const std::size_t k = c_in * 9;
  const std::size_t plane = gs.plane();
  BasicTensor<T> grad_in(Shape{gs.n, c_in, gs.h, gs.w});
  const auto weights_t =
      MatrixView<T>::row_major(kernel.raw(), c_out, k).transposed();
  const std::size_t rows = strip_rows(k, gs.h, gs.w);
  std::vector<T> col(k * rows * gs.w);

  for (std::size_t n = 0; n < gs.n; ++n) {
    const T* g = grad_out.raw() + n * c_out * plane;
    T* dst = grad_in.raw() + n * c_in * plane;
    for (std::size_t y0 = 0; y0 < gs.h; y0 += rows) {
      const std::size_t y1 = std::min(gs.h, y0 + rows);
      const std::size_t sp = (y1 - y0) * gs.w;
      MatrixView<T> g_strip{g + y0 * gs.w, c_out, sp,
                            static_cast<std::ptrdiff_t>(plane), 1};
      gemm(weights_t, g_strip, col.data(), sp, /*accumulate=*/false);
      col2im_strip_add(col.data(), c_in, gs.h, gs.w, y0, y1, dst);
    }
  }
  return grad_in;
}

template <typename T>
BasicTensor<T> relu_forward(BasicTensor<T> input) {
  for (T& v : input.data()) v = v > T{0} ? v : T{0};
  return input;
}

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& grad_out,
                             const BasicTensor<T>& activation) {
  require_same_shape(grad_out.shape(), activation.shape(), "relu_backward");
  BasicTensor<T> grad(grad_out.shape());
  const T* g = grad_out.raw();
  const T* a = activation.raw();
  T* out = grad.raw();
  for (std::size_t i = 0; i < grad.size(); ++i) {
    out[i] = a[i] > T{0} ? g[i] : T{0};
  }
  return grad;
}

template <typename T>
PoolResult<T> pool2x2_forward(const BasicTensor<T>& input) {
  const Shape& is = input.shape();
  if (is.h < 2 || is.w < 2) {
    throw DegenerateInputError("pool2x2_forward: spatial size " +
                               std::to_string(is.h) + "x" +
                               std::to_string(is.w) + " is below 2x2");
  }
  if (input.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ShapeError("pool2x2_forward: tensor too large for 32-bit indices");
  }
  const Shape os{is.n, is.c, is.h / 2, is.w / 2};
  PoolResult<T> result{BasicTensor<T>(os), PoolIndices{is, os, {}}};
  result.indices.argmax.resize(os.numel());
  T* out = result.output.raw();
  std::uint32_t* arg = result.indices.argmax.data();
  const T* in = input.raw();
  std::size_t o = 0;
  for (std::size_t nc = 0; nc < is.n * is.c; ++nc) {
    const std::size_t base = nc * is.plane();
    for (std::size_t y = 0; y < os.h; ++y) {
      for (std::size_t x = 0; x < os.w; ++x, ++o) {
        const std::size_t top = base + (2 * y) * is.w + 2 * x;
        const std::size_t cand[4] = {top, top + 1, top + is.w, top + is.w + 1};
        std::size_t best = cand[0];
        for (std::size_t k = 1; k < 4; ++k) {
          if (in[cand[k]] > in[best]) best = cand[k];
        }
        out[o] = in[best];
        arg[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return result;
}

template <typename T>
BasicTensor<T> pool2x2_backward(const BasicTensor<T>& grad_out,
                                const PoolIndices& indices) {
  require_same_shape(grad_out.shape(), indices.output_shape,
                     "pool2x2_backward");
  BasicTensor<T> grad(indices.input_shape);
  const T* g = grad_out.raw();
  T* out = grad.raw();
  for (std::size_t o = 0; o < indices.argmax.size(); ++o) {
    out[indices.argmax[o]] += g[o];
  }
  return grad;
}

#define STYLEFORGE_INSTANTIATE_KERNELS(T)                                    \
  template BasicTensor<T> conv2d_forward<T>(                                 \
      const BasicTensor<T>&, const BasicTensor<T>&, std::span<const T>);     \
  template BasicTensor<T> conv2d_input_grad<T>(const BasicTensor<T>&,        \
                                               const BasicTensor<T>&);       \
  template BasicTensor<T> relu_forward<T>(BasicTensor<T>);                   \
  template BasicTensor<T> relu_backward<T>(const BasicTensor<T>&,            \
                                           const BasicTensor<T>&);           \
  template PoolResult<T> pool2x2_forward<T>(const BasicTensor<T>&);          \
  template BasicTensor<T> pool2x2_backward<T>(const BasicTensor<T>&,         \
                                              const PoolIndices&);

STYLEFORGE_INSTANTIATE_KERNELS(float)
STYLEFORGE_INSTANTIATE_KERNELS(double)

#undef STYLEFORGE_INSTANTIATE_KERNELS

}  // namespace styleforge
