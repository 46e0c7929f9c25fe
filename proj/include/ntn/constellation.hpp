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

#include "ntn/frames.hpp"
#include "ntn/orbit.hpp"
#include "ntn/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ntn
{
struct WalkerSpec
{
    int total_sats = 60;
    int planes = 6;
    int phasing = 1;
    double altitude_km = 550.0;
    double inc = deg2rad(53.0);

    void validate() const;
};

struct Satellite
{
    std::string name;
    OrbitalElements elements;
    int shell = 0;
};

struct LinkSample
{
    std::size_t term_id = 0;
    TerminalLocation terminal;
    std::size_t sat_id = 0;
    int shell = 0;
    double t_s = 0.0;
    MtFrameState mt;
    double distance_m = 0.0; // |q| * 1000
    double elevation = 0.0;  // rad
};

struct LinkOptions
{
    double min_elevation = deg2rad(10.0);
    // Uniform random subsample per shell, 0 keeps every visible link
    std::size_t max_links_per_shell = 0;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    EarthConstants earth;
};

// Links below this elevation are never produced, log10 of the elevation diverges
inline constexpr double absolute_min_elevation = deg2rad(0.5);

std::vector<OrbitalElements> walker_delta(const WalkerSpec &spec, const EarthConstants &c = {});
std::vector<Satellite> make_constellation(std::span<const WalkerSpec> shells, const EarthConstants &c = {});

std::vector<TerminalLocation> sample_terminals(std::size_t n, Rng &rng, double lat_limit = deg2rad(53.0),
                                               const EarthConstants &c = {});

// Times t_start + k t_step on the half-open interval [t_start, t_end)
std::vector<double> time_grid(double t_start, double t_end, double t_step);

std::vector<LinkSample> enumerate_links(std::span<const Satellite> sats,
                                        std::span<const TerminalLocation> terminals,
                                        std::span<const double> times, const LinkOptions &opt);

// Closed-form slant range from a terminal at radius Re to a satellite h above that radius
double slant_range(double Re_km, double h_km, double elevation);
} // namespace ntn
