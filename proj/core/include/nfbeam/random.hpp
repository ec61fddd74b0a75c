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

#ifndef NFBEAM_RANDOM_HPP
#define NFBEAM_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <random>

namespace nfbeam
{
    // splitmix64 finalizer
    constexpr std::uint64_t mix64(std::uint64_t v)
    {
        v += 0x9E3779B97F4A7C15ULL;
        v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ULL;
        v = (v ^ (v >> 27)) * 0x94D049BB133111EBULL;
        return v ^ (v >> 31);
    }

    // Seed for an independent stream keyed by (seed, stream, index). Trials and pilots use
    // disjoint keys so results do not depend on evaluation order.
    constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
    {
        return mix64(mix64(mix64(seed) ^ stream) ^ (index * 0xD1B54A32D192ED03ULL));
    }

    using Engine = std::mt19937_64;

    // Lightweight generator for short counter-keyed draws where seeding an mt19937_64 would dominate
    class SplitMix64
    {
    public:
        using result_type = std::uint64_t;

        explicit SplitMix64(std::uint64_t state) : state_(state) {}

        static constexpr result_type min() { return 0; }
        static constexpr result_type max() { return ~result_type{0}; }

        result_type operator()()
        {
            state_ += 0x9E3779B97F4A7C15ULL;
            return mix64(state_);
        }

    private:
        std::uint64_t state_;
    };

    inline Engine make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
    {
        const std::uint64_t s = derive_seed(seed, stream, index);
        std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index)};
        return Engine(seq);
    }

    // Stream identifiers, kept distinct so that e.g. UE placement and noise never share draws
    namespace streams
    {
        inline constexpr std::uint64_t volume = 0x766F6C;
        inline constexpr std::uint64_t ue = 0x7565;
        inline constexpr std::uint64_t channel = 0x6368;
        inline constexpr std::uint64_t noise = 0x6E6F;
        inline constexpr std::uint64_t coverage = 0x636F76;
    }
}

#endif
