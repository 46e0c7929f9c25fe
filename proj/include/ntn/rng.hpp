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

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace ntn
{
using Rng = std::mt19937_64;

// Independent stream for a (master seed, id...) tuple. Streams depend only on the ids, never on
// the order in which they are created, so work can be split across threads freely.
inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> ids)
{
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * ids.size());
    words.push_back(static_cast<std::uint32_t>(master));
    words.push_back(static_cast<std::uint32_t>(master >> 32));
    for (std::uint64_t id : ids)
    {
        words.push_back(static_cast<std::uint32_t>(id));
        words.push_back(static_cast<std::uint32_t>(id >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

// Stateless hash of a key tuple to [0, 1), used for order-free subsampling
inline double hash_unit(std::uint64_t master, std::initializer_list<std::uint64_t> ids)
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(master);
    for (std::uint64_t id : ids)
        h = mix(h ^ id);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Stream tags keep the pipeline stages from sharing random numbers
enum class Stream : std::uint64_t
{
    terminals = 1,
    links = 2,
    scatterers = 3,
    xpr = 4,
    resim = 5,
    field = 6,
};

inline std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }
} // namespace ntn
