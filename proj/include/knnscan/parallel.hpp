// Copyright 2026 The knnscan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace knnscan {

inline unsigned default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs `body(worker, begin, end)` over [0, n) in chunks pulled from a shared
// counter. `worker` is in [0, workers) and identifies per-thread scratch.
// The body must only write to slots it owns; under that contract the result
// does not depend on `workers`. The first exception thrown by any worker is
// rethrown on the calling thread.
template <class Body>
void parallel_chunks(std::size_t n, unsigned workers, Body&& body,
                     std::size_t chunk = 256) {
  workers = std::max(1u, workers);
  if (workers == 1 || n <= chunk) {
    if (n > 0) body(0u, std::size_t{0}, n);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto run = [&](unsigned w) {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) break;
        body(w, begin, std::min(n, begin + chunk));
      }
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
      next.store(n);
    }
  };
  std::vector<std::jthread> threads;
  threads.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) threads.emplace_back(run, w);
  run(0);
  threads.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace knnscan
