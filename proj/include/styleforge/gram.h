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

#ifndef STYLEFORGE_GRAM_H_
#define STYLEFORGE_GRAM_H_

#include <cstddef>
#include <string>
#include <vector>

#include "styleforge/tensor.h"

namespace styleforge {

// Dense row-major n x n matrix.
template <typename T>
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<T> values;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t size) : n(size), values(size * size) {}

  T& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }
  T operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

// Channel co-activation statistics of one feature map: G = F F^T where F is
// the map flattened to channels x positions. Not normalized.
template <typename T>
struct GramMatrix {
  std::string layer;
  std::size_t n_channels = 0;
  std::size_t n_positions = 0;
  SquareMatrix<T> values;

  T operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

// Throws UnsupportedBatchError unless features has batch size 1. The upper
// triangle is computed and mirrored, so the result is exactly symmetric.
template <typename T>
GramMatrix<T> gram(const BasicTensor<T>& features, std::string layer = {});

// dL/dF = (dL/dG + dL/dG^T) F, reshaped to the feature shape.
template <typename T>
BasicTensor<T> gram_backward(const SquareMatrix<T>& grad_gram,
                             const BasicTensor<T>& features);

}  // namespace styleforge

#endif  // STYLEFORGE_GRAM_H_
