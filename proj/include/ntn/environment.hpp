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

#include "ntn/constellation.hpp"
#include "ntn/lsp.hpp"
#include "ntn/rng.hpp"
#include "ntn/scenario.hpp"

#include <span>
#include <vector>

namespace ntn
{
struct TruncatedNormal
{
    double min = 0.0, max = 0.0, mean = 0.0, std = 0.0;

    // Rejection sampling; throws std::runtime_error after 1e6 failed draws
    double sample(Rng &rng) const;
};

struct ScenarioParams
{
    Scenario name = Scenario::DenseUrban;
    int n_paths = 0;
    TruncatedNormal distance; // m
    TruncatedNormal height;   // m above ground
};

const ScenarioParams &scenario_params(Scenario s);

struct Scatterer
{
    double azimuth = 0.0; // rad, [-pi, pi), counter-clockwise from east
    double distance_m = 0.0;
    double height_m = 0.0;
};

struct Path
{
    double delay_s = 0.0;
    double power = 0.0; // linear gain
    double aoa_az = 0.0, aoa_el = 0.0;
    double aod_az = 0.0, aod_el = 0.0;
    double xpr_db = 0.0;
    bool is_los = false;
};

// Direct path geometry, kept so that add_los does not need the link again
struct LosGeometry
{
    double delay_s = 0.0;
    double aoa_az = 0.0, aoa_el = 0.0;
    double aod_az = 0.0, aod_el = 0.0;
};

struct PathSet
{
    std::vector<Path> paths;
    double d_m = 0.0; // terminal-satellite distance
    double f_ghz = 0.0;
    double alpha = 0.0;
    LosGeometry los;

    bool has_los() const;
    double total_power() const;
    double nlos_power() const;
};

std::vector<Scatterer> draw_scatterers(const ScenarioParams &sc, Rng &rng);

// Single-bounce NLOS paths. Arrival angles are in the terminal's ENU frame; departure angles are in a
// frame at the satellite whose x-axis points at the terminal and whose z-axis is the projected local up.
PathSet geometry_paths(const LinkSample &link, std::span<const Scatterer> scatterers, double f_ghz);

double fspl_db(double d_m, double f_ghz);

PathSet assign_nlos_powers(PathSet ps, const LspCoefficients &pl_nlos, double sf_db);
PathSet add_los(PathSet ps);
PathSet draw_xpr(PathSet ps, const LspCoefficients &xpr, Rng &rng);

struct Drop
{
    PathSet nlos;
    PathSet los;
};

// One link at one frequency: scatterers and the NLOS shadow-fading normal are drawn from the
// link stream so that all frequencies of a link share them.
struct DropDraws
{
    std::vector<Scatterer> scatterers;
    double sf_normal = 0.0;
};

DropDraws draw_drop(const ScenarioParams &sc, Rng &rng);
Drop make_drop(const LinkSample &link, const DropDraws &draws, const ParameterSet &params, double f_ghz,
               Rng &xpr_rng);
} // namespace ntn
