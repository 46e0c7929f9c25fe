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

#include <span>
#include <string>
#include <vector>

namespace ntn
{
// Keplerian elements at the reference time epoch_s. Angles in rad, stored in [0, 2*pi).
struct OrbitalElements
{
    double a_km = 0.0;
    double e = 0.0;
    double inc = 0.0;
    double raan0 = 0.0;
    double argp0 = 0.0;
    double nu0 = 0.0;
    double epoch_s = 0.0;

    double apogee_radius() const { return a_km * (1.0 + e); }
    double perigee_radius() const { return a_km * (1.0 - e); }

    // Builds elements from apogee/perigee radii
    static OrbitalElements from_apsides(double ra_km, double rp_km, double inc, double raan0,
                                        double argp0, double nu0, double epoch_s = 0.0);

    // Throws std::invalid_argument if the orbit is not a bound ellipse above the surface
    void validate(const EarthConstants &c = {}) const;
};

struct InertialState
{
    double x_km = 0.0, y_km = 0.0, z_km = 0.0;
    double norm() const;
};

struct GeoState
{
    double lat = 0.0; // theta_r, [-pi/2, pi/2]
    double lon = 0.0; // phi_r, [-pi, pi)
    double radius_km = 0.0;
};

struct SecularRates
{
    double n_bar = 0.0; // rad/s
    double p_bar = 0.0;
};

struct NodePerigee
{
    double raan = 0.0;
    double argp = 0.0;
};

SecularRates secular_rates(const OrbitalElements &el, const EarthConstants &c = {});

// J2 secular drift of RAAN and argument of perigee, dt relative to the epoch
NodePerigee perturbed_node_perigee(const OrbitalElements &el, const SecularRates &rates, double dt);

// Solves E - e sin E = E0 - e sin E0 + n_bar*dt. The result is not wrapped, so E advances
// continuously with dt.
double solve_eccentric_anomaly(double E0, double e, double n_bar, double dt);

// Kepler's equation for a single mean anomaly M (any real value)
double solve_kepler(double M, double e);

double true_from_eccentric(double E, double e);
double eccentric_from_true(double nu, double e);
double orbital_radius(const OrbitalElements &el, double nu);
InertialState inertial_position(double raan, double argp, double nu, double inc, double R_km);
GeoState rotating_geographic(const InertialState &s, double t, const EarthConstants &c = {});

struct TrackPoint
{
    double t = 0.0;
    InertialState inertial;
    GeoState geo;
};

TrackPoint propagate_point(const OrbitalElements &el, double t, const EarthConstants &c = {});
std::vector<TrackPoint> propagate_track(const OrbitalElements &el, std::span<const double> times,
                                        const EarthConstants &c = {});
std::vector<GeoState> propagate(const OrbitalElements &el, std::span<const double> times,
                                const EarthConstants &c = {});

// Orbit period for the unperturbed two-body problem [s]
double keplerian_period(double a_km, const EarthConstants &c = {});
} // namespace ntn
