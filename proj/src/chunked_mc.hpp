// SPDX-License-Identifier: Apache-2.0
//
// wetsim - training design and link-level simulation for multi-antenna
// wireless energy transfer
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
#include <array>
#include <cstdint>
#include <thread>
#include <vector>

#include "wetsim/common.hpp"

namespace wetsim::detail {

inline int resolve_workers(int requested, long chunks) {
    int workers = requested > 0 ? requested
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) {
        workers = 1;
    }
    if (static_cast<long>(workers) > chunks) {
        workers = static_cast<int>(chunks);
    }
    return workers;
}

/// Sums (and sums of squares) of per-trial statistics over `trials`
/// independent trials, computed on a fixed chunk grid. Partial sums are
/// kept per chunk and reduced in chunk order, so the result is a pure
/// function of the trial function and the chunk/rng layout, independent of
/// the worker count.
///
/// TrialFn: void(long trial_index, std::mt19937_64 &chunk_rng,
///               std::array<double, NStats> &values)
template <int NStats, typename TrialFn>
struct McSums {
    std::array<double, NStats> sum{};
    std::array<double, NStats> sum_sq{};
};

template <int NStats, typename TrialFn>
McSums<NStats, TrialFn> chunked_mc(long trials, std::uint64_t seed, int requested_workers,
                                   long chunk_size, TrialFn &&fn) {
    if (trials < 1) {
        throw ContractViolation("chunked_mc: trials must be >= 1");
    }
    const long chunks = (trials + chunk_size - 1) / chunk_size;
    const int workers = resolve_workers(requested_workers, chunks);

    std::vector<std::array<double, NStats>> chunk_sum(chunks);
    std::vector<std::array<double, NStats>> chunk_sq(chunks);

    auto run_range = [&](long first_chunk, long last_chunk) {
        std::array<double, NStats> values{};
        for (long c = first_chunk; c < last_chunk; ++c) {
            auto rng = make_stream(seed, static_cast<std::uint64_t>(c));
            std::array<double, NStats> s{};
            std::array<double, NStats> sq{};
            const long begin = c * chunk_size;
            const long end = std::min(trials, begin + chunk_size);
            for (long t = begin; t < end; ++t) {
                fn(t, rng, values);
                for (int i = 0; i < NStats; ++i) {
                    s[i] += values[i];
                    sq[i] += values[i] * values[i];
                }
            }
            chunk_sum[c] = s;
            chunk_sq[c] = sq;
        }
    };

    if (workers == 1) {
        run_range(0, chunks);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const long per = (chunks + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const long first = w * per;
            const long last = std::min(chunks, first + per);
            if (first >= last) {
                break;
            }
            pool.emplace_back(run_range, first, last);
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    McSums<NStats, TrialFn> out;
    for (long c = 0; c < chunks; ++c) {
        for (int i = 0; i < NStats; ++i) {
            out.sum[i] += chunk_sum[c][i];
            out.sum_sq[i] += chunk_sq[c][i];
        }
    }
    return out;
}

} // namespace wetsim::detail
