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

#include "stmask/parallel.hpp"

#include <atomic>

namespace stmask {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_num_threads(unsigned n) noexcept { g_threads.store(n); }

unsigned num_threads() noexcept {
  const unsigned n = g_threads.load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace stmask
