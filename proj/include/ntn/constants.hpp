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

#include <cmath>
#include <numbers>

namespace ntn
{
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double terminal_height_m = 1.5;

constexpr double deg2rad(double deg) { return deg * (pi / 180.0); }
constexpr double rad2deg(double rad) { return rad * (180.0 / pi); }

// Wraps to [-pi, pi)
inline double wrap_angle(double x)
{
    if (x >= -pi && x < pi)
        return x;
    double y = x - two_pi * std::floor((x + pi) / two_pi);
    if (y >= pi)
        y -= two_pi;
    if (y < -pi)
        y = -pi;
    return y;
}

// Wraps to [0, 2*pi)
inline double wrap_positive(double x)
{
    double y = std::fmod(x, two_pi);
    if (y < 0.0)
        y += two_pi;
    if (y >= two_pi)
        y = 0.0;
    return y;
}

struct EarthConstants
{
    double radius_km = 6378.137;
    double mass_kg = 5.9722e24;
    double rotation_period_s = 86164.09054;
    double rotation_rate = 7.29211585453e-5; // rad/s
    double grav_const = 6.67408e-20;         // km^3 / (s^2 kg)
    double j2 = 0.001082636;

    double gm() const { return grav_const * mass_kg; } // km^3/s^2
};
} // namespace ntn
