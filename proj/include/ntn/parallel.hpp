// SPDX-License-Identifier: Apache-2.0
//
// ntn-gscm: satellite channel parameter toolkit
// Copyright (C) 2026 The ntn-gscm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ntn
{
// Splits [0, n) into contiguous blocks, one per worker. fn(worker, lo, hi). The first exception
// thrown by any worker is rethrown after all workers joined.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn &&fn)
{
    jobs = std::max(1u, jobs);
    if (n < jobs)
        jobs = static_cast<unsigned>(std::max<std::size_t>(n, 1));
    if (jobs == 1)
    {
        fn(0u, std::size_t{0}, n);
        return;
    }
    std::exception_ptr err;
    std::mutex m;
    {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j)
        {
            const std::size_t lo = n * j / jobs, hi = n * (j + 1) / jobs;
            pool.emplace_back([&, j, lo, hi] {
                try
                {
                    fn(j, lo, hi);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(m);
                    if (!err)
                        err = std::current_exception();
                }
            });
        }
    }
    if (err)
        std::rethrow_exception(err);
}

inline unsigned default_jobs()
{
    return std::max(1u, std::thread::hardware_concurrency());
}
} // namespace ntn
