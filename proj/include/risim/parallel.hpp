// SPDX-License-Identifier: Apache-2.0
//
// risim - RIS-aided mmWave radar imaging simulator and reconstruction toolkit
// Copyright (C) 2026 The risim authors
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

#ifndef RISIM_PARALLEL_HPP
#define RISIM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace risim
{
    // Calls fn(i) for i in [0, count) on up to `threads` workers (0 = hardware concurrency).
    // Work items must be independent. The first exception thrown by a worker is rethrown.
    template <typename Fn>
    void parallel_for(std::size_t count, unsigned threads, Fn &&fn)
    {
        if (threads == 0)
            threads = std::max(1u, std::thread::hardware_concurrency());
        if (threads <= 1 || count <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                fn(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&]
        {
            for (std::size_t i = next++; i < count; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = count;
                }
            }
        };

        const auto n = std::min<std::size_t>(threads, count);
        std::vector<std::jthread> pool;
        pool.reserve(n - 1);
        for (std::size_t t = 1; t < n; ++t)
            pool.emplace_back(worker);
        worker();
        pool.clear();
        if (error)
            std::rethrow_exception(error);
    }
}

#endif
