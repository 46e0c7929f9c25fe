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

#include <array>
#include <string>
#include <string_view>

namespace ntn
{
enum class Scenario
{
    DenseUrban = 0,
    Urban = 1,
    Suburban = 2,
    Rural = 3,
};

enum class LosState
{
    LOS = 0,
    NLOS = 1,
};

inline constexpr std::array<Scenario, 4> all_scenarios = {Scenario::DenseUrban, Scenario::Urban,
                                                          Scenario::Suburban, Scenario::Rural};
inline constexpr std::array<LosState, 2> all_states = {LosState::LOS, LosState::NLOS};

std::string_view to_string(Scenario s);
std::string_view to_string(LosState s);
Scenario parse_scenario(std::string_view name); // throws std::invalid_argument
LosState parse_state(std::string_view name);
} // namespace ntn
