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

#include "styleforge/gemm.h"

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "styleforge/parallel.h"

namespace styleforge {
namespace {

// Register tile sizes. NR spans whole vector registers so the inner loop of
// the micro-kernel vectorizes cleanly.
template <typename T>
struct Tile;

#if defined(__AVX512F__)
template <>
struct Tile<float> {
  static constexpr std::size_t kMR = 8;
  static constexpr std::size_t kNR = 32;
};
template <>
struct Tile<double> {
  static constexpr std::size_t kMR = 8;
  static constexpr std::size_t kNR = 16;
};
#else
template <>
struct Tile<float> {
  static constexpr std::size_t kMR = 6;
  static constexpr std::size_t kNR = 16;
};
template <>
struct Tile<double> {
  static constexpr std::size_t kMR = 6;
  static constexpr std::size_t kNR = 8;
};
#endif

constexpr std::size_t kKC = 256;
constexpr std::size_t kMC = 128;
constexpr std::size_t kNC = 2048;

// Packs a(i0 : i0+mc, p0 : p0+kc) into MR-row panels, k-major within a
// panel, zero-padding the ragged last panel.
template <typename T>
void pack_a(const MatrixView<T>& a, std::size_t i0, std::size_t mc,
            std::size_t p0, std::size_t kc, T* out) {
  constexpr std::size_t MR = Tile<T>::kMR;
  for (std::size_t ir = 0; ir < mc; ir += MR) {
    const std::size_t rows = std::min(MR, mc - ir);
    for (std::size_t p = 0; p < kc; ++p) {
      for (std::size_t i = 0; i < rows; ++i) *out++ = a(i0 + ir + i, p0 + p);
      for (std::size_t i = rows; i < MR; ++i) *out++ = T{0};
    }
  }
}

// Packs b(p0 : p0+kc, j0 : j0+nc) into NR-column panels.
template <typename T>
void pack_b(const MatrixView<T>& b, std::size_t p0, std::size_t kc,
            std::size_t j0, std::size_t nc, T* out) {
  constexpr std::size_t NR = Tile<T>::kNR;
  for (std::size_t jr = 0; jr < nc; jr += NR) {
    const std::size_t cols = std::min(NR, nc - jr);
    if (cols == NR && b.col_stride == 1) {
      for (std::size_t p = 0; p < kc; ++p) {
        const T* src = b.data + static_cast<std::ptrdiff_t>(p0 + p) * b.row_stride +
                       static_cast<std::ptrdiff_t>(j0 + jr);
        std::memcpy(out, src, NR * sizeof(T));
        out += NR;
      }
      continue;
    }
    for (std::size_t p = 0; p < kc; ++p) {
      for (std::size_t j = 0; j < cols; ++j) *out++ = b(p0 + p, j0 + jr + j);
      for (std::size_t j = cols; j < NR; ++j) *out++ = T{0};
    }
  }
}

template <typename T>
inline void micro_kernel(std::size_t kc, const T* __restrict a,
                         const T* __restrict b, T* __restrict c,
                         std::size_t ldc, std::size_t rows, std::size_t cols) {
  constexpr std::size_t MR = Tile<T>::kMR;
  constexpr std::size_t NR = Tile<T>::kNR;
  alignas(64) T acc[MR][NR] = {};
  for (std::size_t p = 0; p < kc; ++p) {
    const T* bp = b + p * NR;
    const T* ap = a + p * MR;
#pragma GCC unroll 8
    for (std::size_t i = 0; i < MR; ++i) {
      const T av = ap[i];
#pragma GCC ivdep
      for (std::size_t j = 0; j < NR; ++j) acc[i][j] += av * bp[j];
    }
  }
  if (rows == MR && cols == NR) {
    for (std::size_t i = 0; i < MR; ++i) {
      T* row = c + i * ldc;
#pragma GCC ivdep
      for (std::size_t j = 0; j < NR; ++j) row[j] += acc[i][j];
    }
    return;
  }
  for (std::size_t i = 0; i < rows; ++i) {
    T* row = c + i * ldc;
    for (std::size_t j = 0; j < cols; ++j) row[j] += acc[i][j];
  }
}

// C block (already initialized) += a * b over the given row/col range.
template <typename T>
void gemm_block(const MatrixView<T>& a, const MatrixView<T>& b, T* c,
                std::size_t ldc, std::size_t m0, std::size_t m1,
                std::size_t n0, std::size_t n1) {
  constexpr std::size_t MR = Tile<T>::kMR;
  constexpr std::size_t NR = Tile<T>::kNR;
  const std::size_t k = a.cols;
  std::vector<T> packed_a(((kMC + MR - 1) / MR) * MR * kKC);
  std::vector<T> packed_b(((kNC + NR - 1) / NR) * NR * kKC);
  for (std::size_t jc = n0; jc < n1; jc += kNC) {
    const std::size_t nc = std::min(kNC, n1 - jc);
    for (std::size_t pc = 0; pc < k; pc += kKC) {
      const std::size_t kc = std::min(kKC, k - pc);
      pack_b(b, pc, kc, jc, nc, packed_b.data());
      for (std::size_t ic = m0; ic < m1; ic += kMC) {
        const std::size_t mc = std::min(kMC, m1 - ic);
        pack_a(a, ic, mc, pc, kc, packed_a.data());
        for (std::size_t jr = 0; jr < nc; jr += NR) {
          const std::size_t cols = std::min(NR, nc - jr);
          const T* bp = packed_b.data() + (jr / NR) * NR * kc;
          for (std::size_t ir = 0; ir < mc; ir += MR) {
            const std::size_t rows = std::min(MR, mc - ir);
            const T* ap = packed_a.data() + (ir / MR) * MR * kc;
            micro_kernel<T>(kc, ap, bp, c + (ic + ir) * ldc + jc + jr, ldc,
                            rows, cols);
          }
        }
      }
    }
  }
}

template <typename T>
void check_dims(const MatrixView<T>& a, const MatrixView<T>& b) {
  if (a.cols != b.rows) {
    throw std::invalid_argument("gemm: inner dimensions do not match");
  }
}

}  // namespace

template <typename T>
void gemm(MatrixView<T> a, MatrixView<T> b, T* c, std::size_t ldc,
          bool accumulate) {
  check_dims(a, b);
  const std::size_t m = a.rows;
  const std::size_t n = b.cols;
  if (m == 0 || n == 0) return;
  if (!accumulate) {
    for (std::size_t i = 0; i < m; ++i) std::fill_n(c + i * ldc, n, T{0});
  }
  if (a.cols == 0) return;

  // Split the larger output dimension across workers; each worker owns a
  // disjoint block of C and packs its own panels.
  constexpr std::size_t MR = Tile<T>::kMR;
  constexpr std::size_t NR = Tile<T>::kNR;
  const std::size_t work = m * n * a.cols;
  if (max_threads() <= 1 || work < (1u << 18)) {
    gemm_block(a, b, c, ldc, 0, m, 0, n);
    return;
  }
  if (n >= m) {
    const std::size_t panels = (n + NR - 1) / NR;
    parallel_for(panels, 4, [&](std::size_t p0, std::size_t p1) {
      gemm_block(a, b, c, ldc, 0, m, p0 * NR, std::min(n, p1 * NR));
    });
  } else {
    const std::size_t panels = (m + MR - 1) / MR;
    parallel_for(panels, 4, [&](std::size_t p0, std::size_t p1) {
      gemm_block(a, b, c, ldc, p0 * MR, std::min(m, p1 * MR), 0, n);
    });
  }
}

template <typename T>
void gemm_naive(MatrixView<T> a, MatrixView<T> b, T* c, std::size_t ldc,
                bool accumulate) {
  check_dims(a, b);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.cols; ++j) {
      T sum = accumulate ? c[i * ldc + j] : T{0};
      for (std::size_t p = 0; p < a.cols; ++p) sum += a(i, p) * b(p, j);
      c[i * ldc + j] = sum;
    }
  }
}

template void gemm<float>(MatrixView<float>, MatrixView<float>, float*,
                          std::size_t, bool);
template void gemm<double>(MatrixView<double>, MatrixView<double>, double*,
                           std::size_t, bool);
template void gemm_naive<float>(MatrixView<float>, MatrixView<float>, float*,
                                std::size_t, bool);
template void gemm_naive<double>(MatrixView<double>, MatrixView<double>,
                                 double*, std::size_t, bool);

}  // namespace styleforge
