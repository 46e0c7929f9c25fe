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

#include "ntn/constants.hpp"
#include "ntn/orbit.hpp"

#include <Eigen/Dense>

namespace ntn
{
struct TerminalLocation
{
    double lon = 0.0; // phi_u [rad]
    double lat = 0.0; // theta_u [rad]
    double radius_km = EarthConstants{}.radius_km;
};

struct Spherical
{
    double phi = 0.0;
    double theta = 0.0;
    double radius = 0.0;
};

// Satellite seen from a terminal: position in the local East-North-Up frame [km] and angles [rad]
struct MtFrameState
{
    Eigen::Vector3d q_km = Eigen::Vector3d::Zero();
    double alpha = 0.0; // elevation
    double beta = 0.0;  // bank
    double gamma = 0.0; // heading, [-pi, pi)
    double delta = 0.0; // tilt
};

struct Orientation
{
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
};

// Time step for the finite-difference direction of flight [s]
inline constexpr double direction_dt_s = 1e-4;

Eigen::Vector3d sph_to_cart(double phi, double theta, double R);
Spherical cart_to_sph(const Eigen::Vector3d &v);

// Position of a propagated satellite in the rotating Cartesian frame [km]
Eigen::Vector3d rotating_position(const GeoState &g);
Eigen::Vector3d terminal_position(const TerminalLocation &u);

Eigen::Matrix3d rotation_to_mt_frame(const TerminalLocation &u);
Eigen::Vector3d to_mt_frame(const Eigen::Vector3d &sat_km, const TerminalLocation &u);
Eigen::Vector3d to_mt_frame(const Eigen::Vector3d &sat_km, const TerminalLocation &u,
                            const Eigen::Matrix3d &Rq);

double elevation(const Eigen::Vector3d &q);
inline bool is_visible(const Eigen::Vector3d &q) { return q.z() > 0.0; }

// Orientation from two rotating-frame positions taken direction_dt_s apart
Orientation orientation(const Eigen::Vector3d &r_t, const Eigen::Vector3d &r_next,
                        const TerminalLocation &u);
Orientation orientation(const Eigen::Vector3d &r_t, const Eigen::Vector3d &r_next,
                        const TerminalLocation &u, const Eigen::Matrix3d &Rq);

MtFrameState mt_state(const Eigen::Vector3d &r_t, const Eigen::Vector3d &r_next,
                      const TerminalLocation &u);
} // namespace ntn
