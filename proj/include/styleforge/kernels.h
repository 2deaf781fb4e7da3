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

#ifndef STYLEFORGE_KERNELS_H_
#define STYLEFORGE_KERNELS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "styleforge/tensor.h"

namespace styleforge {

// 3x3 convolution, stride 1, zero padding 1 (spatial size preserved).
// kernel is [c_out, c_in, 3, 3]; bias has c_out entries.
//   out[n,o,y,x] = bias[o] + sum_{i,dy,dx} in[n,i,y+dy-1,x+dx-1] * k[o,i,dy,dx]
// Lowered to im2col over row strips followed by a blocked GEMM.
template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& input,
                              const BasicTensor<T>& kernel,
                              std::span<const T> bias);

// Gradient of a scalar loss w.r.t. the convolution input, given the gradient
// w.r.t. its output. Weights are frozen, so no kernel/bias gradient exists.
template <typename T>
BasicTensor<T> conv2d_input_grad(const BasicTensor<T>& grad_out,
                                 const BasicTensor<T>& kernel);

template <typename T>
BasicTensor<T> relu_forward(BasicTensor<T> input);

// grad_out * 1[x > 0]. `activation` may be either the ReLU input or its
// output: both are positive at exactly the same positions.
template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& grad_out,
                             const BasicTensor<T>& activation);

// Argmax bookkeeping of a 2x2/stride-2 max-pool: for every output element,
// the flat offset of the winning input element.
struct PoolIndices {
  Shape input_shape;
  Shape output_shape;
  std::vector<std::uint32_t> argmax;
};

template <typename T>
struct PoolResult {
  BasicTensor<T> output;
  PoolIndices indices;
};

// 2x2 max-pool, stride 2. Odd trailing rows/columns are dropped. Ties go to
// the first element in row-major window order. Throws DegenerateInputError
// when h or w is below 2.
template <typename T>
PoolResult<T> pool2x2_forward(const BasicTensor<T>& input);

template <typename T>
BasicTensor<T> pool2x2_backward(const BasicTensor<T>& grad_out,
                                const PoolIndices& indices);

}  // namespace styleforge

#endif  // STYLEFORGE_KERNELS_H_
