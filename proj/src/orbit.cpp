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

#include "ntn/orbit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ntn
{
OrbitalElements OrbitalElements::from_apsides(double ra_km, double rp_km, double inc, double raan0,
                                              double argp0, double nu0, double epoch_s)
{
    if (!(ra_km >= rp_km) || !(rp_km > 0.0))
        throw std::invalid_argument("from_apsides: require ra >= rp > 0");
    OrbitalElements el;
    el.a_km = 0.5 * (ra_km + rp_km);
    el.e = (ra_km - rp_km) / (ra_km + rp_km);
    el.inc = inc;
    el.raan0 = wrap_positive(raan0);
    el.argp0 = wrap_positive(argp0);
    el.nu0 = wrap_positive(nu0);
    el.epoch_s = epoch_s;
    return el;
}

void OrbitalElements::validate(const EarthConstants &c) const
{
    if (!std::isfinite(a_km) || !std::isfinite(e) || !std::isfinite(inc) || !std::isfinite(raan0) ||
        !std::isfinite(argp0) || !std::isfinite(nu0) || !std::isfinite(epoch_s))
        throw std::invalid_argument("orbital elements must be finite");
    if (e < 0.0 || e >= 1.0)
        throw std::invalid_argument("eccentricity must be in [0, 1), got " + std::to_string(e));
    if (a_km * (1.0 - e) <= c.radius_km)
        throw std::invalid_argument("perigee radius " + std::to_string(a_km * (1.0 - e)) +
                                    " km is not above the Earth radius");
    if (inc < 0.0 || inc > pi)
        throw std::invalid_argument("inclination must be in [0, pi]");
}

double InertialState::norm() const
{
    return std::sqrt(x_km * x_km + y_km * y_km + z_km * z_km);
}

double keplerian_period(double a_km, const EarthConstants &c)
{
    return two_pi * std::sqrt(a_km * a_km * a_km / c.gm());
}

SecularRates secular_rates(const OrbitalElements &el, const EarthConstants &c)
{
    const double a = el.a_km;
    const double one_e2 = 1.0 - el.e * el.e;
    const double si = std::sin(el.inc);

    SecularRates r;
    r.p_bar = 3.0 * c.j2 * c.radius_km * c.radius_km / (2.0 * a * a * one_e2 * one_e2);
    const double n0 = std::sqrt(c.gm() / (a * a * a));
    r.n_bar = n0 * (1.0 + r.p_bar * (1.0 - 1.5 * si * si) * std::sqrt(one_e2));
    return r;
}

NodePerigee perturbed_node_perigee(const OrbitalElements &el, const SecularRates &rates, double dt)
{
    const double si = std::sin(el.inc);
    const double k = dt * rates.n_bar * rates.p_bar;
    NodePerigee out;
    out.raan = wrap_angle(el.raan0 - k * std::cos(el.inc));
    out.argp = wrap_angle(el.argp0 + k * (2.0 - 2.5 * si * si));
    return out;
}

double solve_kepler(double M, double e)
{
    if (!(e >= 0.0 && e < 1.0))
        throw std::invalid_argument("solve_kepler: eccentricity must be in [0, 1)");
    if (e == 0.0)
        return M;

    // Solve on the reduced anomaly and add the whole revolutions back
    const double k = std::round(M / two_pi);
    const double Mr = M - k * two_pi;

    constexpr double tol = 1e-12;
    constexpr int max_iter = 50;

    double E = (e > 0.8) ? (Mr >= 0.0 ? pi : -pi) : Mr;
    bool converged = false;
    for (int i = 0; i < max_iter; ++i)
    {
        const double f = E - e * std::sin(E) - Mr;
        const double fp = 1.0 - e * std::cos(E);
        const double step = f / fp;
        E -= step;
        if (std::abs(step) < tol)
        {
            converged = std::abs(E - e * std::sin(E) - Mr) < tol;
            break;
        }
    }

    if (!converged)
    {
        // Bisection: the root lies within [Mr - e, Mr + e]
        double lo = Mr - e, hi = Mr + e;
        for (int i = 0; i < 200 && hi - lo > 1e-15; ++i)
        {
            const double mid = 0.5 * (lo + hi);
            if (mid - e * std::sin(mid) - Mr < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        E = 0.5 * (lo + hi);
        if (!(std::abs(E - e * std::sin(E) - Mr) < tol))
            throw std::runtime_error("solve_kepler: no convergence");
    }
    return E + k * two_pi;
}

double solve_eccentric_anomaly(double E0, double e, double n_bar, double dt)
{
    if (e == 0.0)
        return E0 + n_bar * dt;
    const double M = E0 - e * std::sin(E0) + n_bar * dt;
    return solve_kepler(M, e);
}

// Difference form of the half-angle relation, keeps nu and E in the same revolution
double true_from_eccentric(double E, double e)
{
    const double b = e / (1.0 + std::sqrt(1.0 - e * e));
    return E + 2.0 * std::atan2(b * std::sin(E), 1.0 - b * std::cos(E));
}

double eccentric_from_true(double nu, double e)
{
    const double b = e / (1.0 + std::sqrt(1.0 - e * e));
    return nu - 2.0 * std::atan2(b * std::sin(nu), 1.0 + b * std::cos(nu));
}

double orbital_radius(const OrbitalElements &el, double nu)
{
    return el.a_km * (1.0 - el.e * el.e) / (1.0 + el.e * std::cos(nu));
}

InertialState inertial_position(double raan, double argp, double nu, double inc, double R_km)
{
    if (!(R_km > 0.0))
        throw std::invalid_argument("inertial_position: radius must be positive");
    const double u = argp + nu;
    const double cu = std::cos(u), su = std::sin(u);
    const double cO = std::cos(raan), sO = std::sin(raan);
    const double ci = std::cos(inc), si = std::sin(inc);

    InertialState s;
    s.x_km = R_km * (cu * cO - su * sO * ci);
    s.y_km = R_km * (cu * sO + su * cO * ci);
    s.z_km = R_km * su * si;
    return s;
}

GeoState rotating_geographic(const InertialState &s, double t, const EarthConstants &c)
{
    const double rho = std::hypot(s.x_km, s.y_km);
    const double R = s.norm();
    if (!(R > 0.0))
        throw std::invalid_argument("rotating_geographic: zero position vector");

    GeoState g;
    g.lat = std::atan2(s.z_km, rho);
    g.lon = (rho > 0.0) ? wrap_angle(std::atan2(s.y_km, s.x_km) - c.rotation_rate * t) : 0.0;
    g.radius_km = R;
    return g;
}

TrackPoint propagate_point(const OrbitalElements &el, double t, const EarthConstants &c)
{
    const double dt = t - el.epoch_s;
    const SecularRates rates = secular_rates(el, c);
    const NodePerigee np = perturbed_node_perigee(el, rates, dt);
    const double E0 = eccentric_from_true(el.nu0, el.e);
    const double E = solve_eccentric_anomaly(E0, el.e, rates.n_bar, dt);
    const double nu = true_from_eccentric(E, el.e);
    const double R = orbital_radius(el, nu);

    TrackPoint p;
    p.t = t;
    p.inertial = inertial_position(np.raan, np.argp, nu, el.inc, R);
    p.geo = rotating_geographic(p.inertial, t, c);
    return p;
}

std::vector<TrackPoint> propagate_track(const OrbitalElements &el, std::span<const double> times,
                                        const EarthConstants &c)
{
    el.validate(c);
    std::vector<TrackPoint> out;
    out.reserve(times.size());
    for (double t : times)
    {
        if (!std::isfinite(t))
            throw std::invalid_argument("propagate: non-finite time");
        out.push_back(propagate_point(el, t, c));
    }
    return out;
}

std::vector<GeoState> propagate(const OrbitalElements &el, std::span<const double> times,
                                const EarthConstants &c)
{
    std::vector<GeoState> out;
    out.reserve(times.size());
    for (const auto &p : propagate_track(el, times, c))
        out.push_back(p.geo);
    return out;
}
} // namespace ntn
