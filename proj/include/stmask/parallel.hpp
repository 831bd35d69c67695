/* Copyright 2026 The stmask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace stmask {

/// Process-wide worker count hint used by the compute kernels. 0 selects
/// std::thread::hardware_concurrency().
void set_num_threads(unsigned n) noexcept;
unsigned num_threads() noexcept;

/// Runs body(i) for i in [0, n) on up to num_threads() workers.
///
/// Each index is processed by exactly one worker and bodies must only write
/// state owned by their index, so results never depend on the worker count.
/// If bodies throw, the exception from the lowest failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(num_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, n);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        for (std::size_t i = begin; i < end; ++i) {
          try {
            body(i);
          } catch (...) {
            errors[w] = std::current_exception();
            error_index[w] = i;
            return;
          }
        }
      });
    }
  }
  std::size_t first = workers;
  for (std::size_t w = 0; w < workers; ++w) {
    if (errors[w] && (first == workers || error_index[w] < error_index[first])) first = w;
  }
  if (first != workers) std::rethrow_exception(errors[first]);
}

}  // namespace stmask
