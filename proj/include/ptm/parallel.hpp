// Copyright 2026 The poisson-transport Authors
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

#ifndef PTM_PARALLEL_HPP_
#define PTM_PARALLEL_HPP_

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ptm {

// Runs fn(begin, end) over a chunked partition of [0, n).  Results must be
// written to index-addressed storage by the callee; any reduction is then done
// sequentially in index order by the caller, so numerical output never depends
// on the thread count.  The first exception thrown in a worker is rethrown.
inline void parallel_chunks(long n, int threads,
                            const std::function<void(long, long)>& fn) {
  if (n <= 0) return;
  long nt = threads > 0 ? threads : 1;
  if (nt > n) nt = n;
  if (nt == 1) {
    fn(0, n);
    return;
  }
  const long chunk = (n + nt - 1) / nt;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (long w = 0; w < nt; ++w) {
    const long begin = w * chunk;
    const long end = begin + chunk < n ? begin + chunk : n;
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ptm

#endif  // PTM_PARALLEL_HPP_
