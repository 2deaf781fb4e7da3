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

#ifndef STYLEFORGE_GEMM_H_
#define STYLEFORGE_GEMM_H_

#include <cstddef>

namespace styleforge {

// Read-only strided matrix view. A transposed view is just the same buffer
// with the strides swapped.
template <typename T>
struct MatrixView {
  const T* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::ptrdiff_t row_stride = 0;
  std::ptrdiff_t col_stride = 1;

  static MatrixView row_major(const T* data, std::size_t rows,
                              std::size_t cols) {
    return {data, rows, cols, static_cast<std::ptrdiff_t>(cols), 1};
  }

  MatrixView transposed() const {
    return {data, cols, rows, col_stride, row_stride};
  }

  T operator()(std::size_t i, std::size_t j) const {
    return data[static_cast<std::ptrdiff_t>(i) * row_stride +
                static_cast<std::ptrdiff_t>(j) * col_stride];
  }
};

// C (rows(a) x cols(b), leading dimension ldc) = a * b, or += when
// accumulate is set. Cache-blocked with packed panels and a register-tiled
// micro-kernel. The reduction over k always runs in ascending order, so the
// result for a given element does not depend on the thread count.
template <typename T>
void gemm(MatrixView<T> a, MatrixView<T> b, T* c, std::size_t ldc,
          bool accumulate);

// Reference triple loop. Used by tests only.
template <typename T>
void gemm_naive(MatrixView<T> a, MatrixView<T> b, T* c, std::size_t ldc,
                bool accumulate);

}  // namespace styleforge

#endif  // STYLEFORGE_GEMM_H_
