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

#include <string>
#include <string_view>

namespace ntn::log
{
enum class Level
{
    debug = 0,
    info = 1,
    warn = 2,
    error = 3,
    quiet = 4,
};

void set_level(Level l);
Level level();

void info(std::string_view msg);
void warn(std::string_view msg);
void error(std::string_view msg);

// Emits the message the first time a key is seen and counts later occurrences
void warn_once(std::string_view key, std::string_view msg);
std::size_t warn_count(std::string_view key);
} // namespace ntn::log
