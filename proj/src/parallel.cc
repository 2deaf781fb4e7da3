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

#include "styleforge/parallel.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <thread>
#include <vector>

namespace styleforge {
namespace {

int threads_from_env() {
  const char* env = std::getenv("STYLEFORGE_THREADS");
  if (env != nullptr) {
    int value = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end && value >= 1) return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{threads_from_env()};
  return cap;
}

}  // namespace

int max_threads() { return thread_cap().load(std::memory_order_relaxed); }

void set_max_threads(int threads) {
  thread_cap().store(std::max(1, threads), std::memory_order_relaxed);
}

void parallel_for(std::size_t count, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (count == 0) return;
  grain = std::max<std::size_t>(grain, 1);
  const std::size_t max_chunks = (count + grain - 1) / grain;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), max_chunks);
  if (workers <= 1) {
    fn(0, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t k = 1; k < workers; ++k) {
    const std::size_t begin = k * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(0, std::min(count, chunk));
}

}  // namespace styleforge
