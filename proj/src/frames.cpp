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

#include "ntn/frames.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ntn
{
Eigen::Vector3d sph_to_cart(double phi, double theta, double R)
{
    if (R < 0.0)
        throw std::invalid_argument("sph_to_cart: negative radius");
    const double ct = std::cos(theta);
    return {R * std::cos(phi) * ct, R * std::sin(phi) * ct, R * std::sin(theta)};
}

Spherical cart_to_sph(const Eigen::Vector3d &v)
{
    Spherical s;
    s.radius = v.norm();
    const double rho = std::hypot(v.x(), v.y());
    s.phi = (rho > 0.0) ? std::atan2(v.y(), v.x()) : 0.0;
    s.theta = std::atan2(v.z(), rho);
    return s;
}

Eigen::Vector3d rotating_position(const GeoState &g)
{
    return sph_to_cart(g.lon, g.lat, g.radius_km);
}

Eigen::Vector3d terminal_position(const TerminalLocation &u)
{
    return sph_to_cart(u.lon, u.lat, u.radius_km);
}

Eigen::Matrix3d rotation_to_mt_frame(const TerminalLocation &u)
{
    const double sp = std::sin(u.lon), cp = std::cos(u.lon);
    const double st = std::sin(u.lat), ct = std::cos(u.lat);
    Eigen::Matrix3d R;
    R << -sp, cp, 0.0,
        -st * cp, -st * sp, ct,
        ct * cp, ct * sp, st;
    return R;
}

Eigen::Vector3d to_mt_frame(const Eigen::Vector3d &sat_km, const TerminalLocation &u,
                            const Eigen::Matrix3d &Rq)
{
    return Rq * (sat_km - terminal_position(u));
}

Eigen::Vector3d to_mt_frame(const Eigen::Vector3d &sat_km, const TerminalLocation &u)
{
    return to_mt_frame(sat_km, u, rotation_to_mt_frame(u));
}

double elevation(const Eigen::Vector3d &q)
{
    const double rho = std::hypot(q.x(), q.y());
    if (rho == 0.0 && q.z() == 0.0)
        throw std::invalid_argument("elevation: satellite and terminal positions coincide");
    return std::atan2(q.z(), rho);
}

Orientation orientation(const Eigen::Vector3d &r_t, const Eigen::Vector3d &r_next,
                        const TerminalLocation &u, const Eigen::Matrix3d &Rq)
{
    const Eigen::Vector3d D = r_next - r_t;
    const double dn = D.norm();
    if (!(dn > 1e-12 * r_t.norm()) || !(r_t.norm() > 0.0))
        throw std::invalid_argument("orientation: direction of flight is numerically zero");

    const Eigen::Vector3d U = terminal_position(u).normalized();
    const Eigen::Vector3d Rn = r_t / r_t.norm();
    const Eigen::Vector3d Dn = D / dn;

    Orientation o;
    o.beta = std::asin(std::clamp(U.dot(Rn.cross(Dn)), -1.0, 1.0));

    const Eigen::Vector3d Dq = Rq * Dn;
    const double rho = std::hypot(Dq.x(), Dq.y());
    o.gamma = (rho < 1e-12) ? 0.0 : wrap_angle(std::atan2(Dq.y(), Dq.x()));
    o.delta = std::atan2(Dq.z(), rho);
    return o;
}

Orientation orientation(const Eigen::Vector3d &r_t, const Eigen::Vector3d &r_next,
                        const TerminalLocation &u)
{
    return orientation(r_t, r_next, u, rotation_to_mt_frame(u));
}

MtFrameState mt_state(const Eigen::Vector3d &r_t, const Eigen::Vector3d &r_next,
                      const TerminalLocation &u)
{
    const Eigen::Matrix3d Rq = rotation_to_mt_frame(u);
    MtFrameState s;
    s.q_km = to_mt_frame(r_t, u, Rq);
    s.alpha = elevation(s.q_km);
    const Orientation o = orientation(r_t, r_next, u, Rq);
    s.beta = o.beta;
    s.gamma = o.gamma;
    s.delta = o.delta;
    return s;
}
} // namespace ntn
