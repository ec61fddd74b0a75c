// SPDX-License-Identifier: Apache-2.0
//
// nfbeam: near-field beam training simulation for uniform planar arrays
// Copyright (C) 2026 The nfbeam authors
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

#ifndef NFBEAM_PARALLEL_HPP
#define NFBEAM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nfbeam
{
    inline unsigned resolve_workers(unsigned requested)
    {
        if (requested != 0)
            return requested;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }

    // Runs fn(i) for i in [0, count) on a small pool. Work items are claimed dynamically,
    // so fn must only write to slot i of any shared output.
    template <typename Fn>
    void parallel_for(std::size_t count, unsigned workers, Fn &&fn)
    {
        const unsigned n = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(count, 1));
        if (n <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                fn(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto body = [&]
        {
            for (;;)
            {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        };

        std::vector<std::jthread> pool;
        pool.reserve(n - 1);
        for (unsigned t = 1; t < n; ++t)
            pool.emplace_back(body);
        body();
        pool.clear();
        if (error)
            std::rethrow_exception(error);
    }
}

#endif
