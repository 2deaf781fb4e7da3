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

#include "styleforge/gram.h"

#include "styleforge/gemm.h"

namespace styleforge {
namespace {

void require_single_batch(const Shape& s, const char* op) {
  if (s.n != 1) {
    throw UnsupportedBatchError(std::string(op) + ": batch size must be 1, got " +
                                s.str());
  }
}

}  // namespace

template <typename T>
GramMatrix<T> gram(const BasicTensor<T>& features, std::string layer) {
  const Shape& s = features.shape();
  require_single_batch(s, "gram");
  const std::size_t c = s.c;
  const std::size_t m = s.plane();
  GramMatrix<T> g{std::move(layer), c, m, SquareMatrix<T>(c)};
  const auto f = MatrixView<T>::row_major(features.raw(), c, m);
  gemm(f, f.transposed(), g.values.values.data(), c, /*accumulate=*/false);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) g.values(j, i) = g.values(i, j);
  }
  return g;
}

template <typename T>
BasicTensor<T> gram_backward(const SquareMatrix<T>& grad_gram,
                             const BasicTensor<T>& features) {
  const Shape& s = features.shape();
  require_single_batch(s, "gram_backward");
  if (grad_gram.n != s.c || grad_gram.values.size() != s.c * s.c) {
    throw ShapeError("gram_backward: gradient is " + std::to_string(grad_gram.n) +
                     "x" + std::to_string(grad_gram.n) + " but features are " +
                     s.str());
  }
  const std::size_t c = s.c;
  SquareMatrix<T> sym(c);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      sym(i, j) = grad_gram(i, j) + grad_gram(j, i);
    }
  }
  BasicTensor<T> grad(s);
  gemm(MatrixView<T>::row_major(sym.values.data(), c, c),
       MatrixView<T>::row_major(features.raw(), c, s.plane()), grad.raw(),
       s.plane(), /*accumulate=*/false);
  return grad;
}

template GramMatrix<float> gram<float>(const BasicTensor<float>&, std::string);
template GramMatrix<double> gram<double>(const BasicTensor<double>&,
                                         std::string);
template BasicTensor<float> gram_backward<float>(const SquareMatrix<float>&,
                                                 const BasicTensor<float>&);
template BasicTensor<double> gram_backward<double>(const SquareMatrix<double>&,
                                                   const BasicTensor<double>&);

}  // namespace styleforge
