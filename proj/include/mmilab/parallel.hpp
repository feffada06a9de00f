// include/mmilab/parallel.hpp
//
// Copyright 2026 mmi-lab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MMILAB_PARALLEL_HPP
#define MMILAB_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mmilab {

// MMILAB_JOBS, else hardware concurrency.
int default_jobs();

// Evaluates f(0..n-1) with up to `jobs` workers into an index-ordered
// vector, so downstream reductions are bitwise independent of scheduling.
// The first worker exception is rethrown after join.
template <typename R, typename F>
std::vector<R> parallel_map(int n, int jobs, F&& f) {
  std::vector<R> out(n);
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const int k = std::min(jobs, n);
  threads.reserve(k);
  for (int i = 0; i < k; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace mmilab

#endif  // MMILAB_PARALLEL_HPP
