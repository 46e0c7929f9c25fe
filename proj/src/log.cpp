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

#include "ntn/log.hpp"

#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>

namespace ntn::log
{
namespace
{
std::atomic<Level> g_level{Level::info};
std::mutex g_mutex;
std::map<std::string, std::size_t, std::less<>> g_counts;

void emit(const char *prefix, std::string_view msg)
{
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "[%s] %.*s\n", prefix, static_cast<int>(msg.size()), msg.data());
}
} // namespace

void set_level(Level l) { g_level = l; }
Level level() { return g_level; }

void info(std::string_view msg)
{
    if (g_level <= Level::info)
        emit("info", msg);
}

void warn(std::string_view msg)
{
    if (g_level <= Level::warn)
        emit("warn", msg);
}

void error(std::string_view msg)
{
    if (g_level <= Level::error)
        emit("error", msg);
}

void warn_once(std::string_view key, std::string_view msg)
{
    bool first = false;
    {
        std::lock_guard<std::mutex> lock(g_mutex);
        auto it = g_counts.find(key);
        if (it == g_counts.end())
        {
            g_counts.emplace(std::string(key), 1);
            first = true;
        }
        else
            ++it->second;
    }
    if (first)
        warn(msg);
}

std::size_t warn_count(std::string_view key)
{
    std::lock_guard<std::mutex> lock(g_mutex);
    auto it = g_counts.find(key);
    return it == g_counts.end() ? 0 : it->second;
}
} // namespace ntn::log
