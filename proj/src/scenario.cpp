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

#include "ntn/scenario.hpp"

#include <stdexcept>

namespace ntn
{
std::string_view to_string(Scenario s)
{
    switch (s)
    {
    case Scenario::DenseUrban: return "DenseUrban";
    case Scenario::Urban: return "Urban";
    case Scenario::Suburban: return "Suburban";
    case Scenario::Rural: return "Rural";
    }
    return "?";
}

std::string_view to_string(LosState s)
{
    return s == LosState::LOS ? "LOS" : "NLOS";
}

Scenario parse_scenario(std::string_view name)
{
    for (Scenario s : all_scenarios)
        if (to_string(s) == name)
            return s;
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

LosState parse_state(std::string_view name)
{
    if (name == "LOS")
        return LosState::LOS;
    if (name == "NLOS")
        return LosState::NLOS;
    throw std::invalid_argument("unknown LOS state '" + std::string(name) + "'");
}
} // namespace ntn
