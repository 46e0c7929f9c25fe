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

#include "ntn/environment.hpp"
#include "ntn/log.hpp"

#include <cmath>
#include <stdexcept>

namespace ntn
{
double TruncatedNormal::sample(Rng &rng) const
{
    std::normal_distribution<double> nd(mean, std);
    for (int i = 0; i < 1000000; ++i)
    {
        const double x = nd(rng);
        if (x >= min && x <= max)
            return x;
    }
    throw std::runtime_error("truncated normal: rejection sampling did not terminate");
}

const ScenarioParams &scenario_params(Scenario s)
{
    static const std::array<ScenarioParams, 4> table = {{
        {Scenario::DenseUrban, 10, {0.1, 100.0, 40.0, 30.0}, {0.0, 60.0, 2.0, 18.0}},
        {Scenario::Urban, 10, {0.1, 200.0, 50.0, 35.0}, {0.0, 30.0, 2.0, 9.0}},
        {Scenario::Suburban, 8, {0.1, 500.0, 65.0, 50.0}, {0.0, 8.0, 1.5, 1.5}},
        {Scenario::Rural, 6, {0.1, 3500.0, 300.0, 200.0}, {0.0, 8.0, 1.5, 1.5}},
    }};
    return table[static_cast<std::size_t>(s)];
}

bool PathSet::has_los() const
{
    for (const auto &p : paths)
        if (p.is_los)
            return true;
    return false;
}

double PathSet::total_power() const
{
    double s = 0.0;
    for (const auto &p : paths)
        s += p.power;
    return s;
}

double PathSet::nlos_power() const
{
    double s = 0.0;
    for (const auto &p : paths)
        if (!p.is_los)
            s += p.power;
    return s;
}

std::vector<Scatterer> draw_scatterers(const ScenarioParams &sc, Rng &rng)
{
    std::uniform_real_distribution<double> uaz(-pi, pi);
    std::vector<Scatterer> out(static_cast<std::size_t>(sc.n_paths));
    for (auto &s : out)
    {
        s.azimuth = uaz(rng);
        s.distance_m = sc.distance.sample(rng);
        s.height_m = sc.height.sample(rng);
    }
    return out;
}

PathSet geometry_paths(const LinkSample &link, std::span<const Scatterer> scatterers, double f_ghz)
{
    const Eigen::Vector3d sat = link.mt.q_km * 1000.0;
    const Eigen::Vector3d mt(0.0, 0.0, terminal_height_m);
    if (!(sat.z() > 0.0))
        throw std::invalid_argument("geometry_paths: satellite below the horizon");

    const Eigen::Vector3d los = sat - mt;
    const double d = los.norm();

    // Departure frame at the satellite
    const Eigen::Vector3d xs = -los / d;
    Eigen::Vector3d ref(0.0, 0.0, 1.0);
    Eigen::Vector3d zs = ref - ref.dot(xs) * xs;
    if (zs.norm() < 1e-9)
    {
        ref = Eigen::Vector3d(0.0, 1.0, 0.0);
        zs = ref - ref.dot(xs) * xs;
    }
    zs.normalize();
    const Eigen::Vector3d ys = zs.cross(xs);

    PathSet ps;
    ps.d_m = d;
    ps.f_ghz = f_ghz;
    ps.alpha = link.elevation;
    const double rho = std::hypot(los.x(), los.y());
    ps.los.delay_s = d / speed_of_light;
    ps.los.aoa_az = rho > 0.0 ? std::atan2(los.y(), los.x()) : 0.0;
    ps.los.aoa_el = std::atan2(los.z(), rho);

    ps.paths.reserve(scatterers.size() + 1);
    for (const auto &sc : scatterers)
    {
        const Eigen::Vector3d s(sc.distance_m * std::cos(sc.azimuth), sc.distance_m * std::sin(sc.azimuth),
                                sc.height_m);
        const Eigen::Vector3d a = s - mt;
        const Eigen::Vector3d b = sat - s;
        const double bn = b.norm();
        // |b| - d without cancellation
        const double db = (mt - s).dot(2.0 * sat - s - mt) / (bn + d);
        const double excess = a.norm() + db;

        Path p;
        p.delay_s = (d + excess) / speed_of_light;
        p.aoa_az = wrap_angle(sc.azimuth);
        p.aoa_el = std::atan2(a.z(), std::hypot(a.x(), a.y()));
        const Eigen::Vector3d v = s - sat;
        const double vx = v.dot(xs), vy = v.dot(ys), vz = v.dot(zs);
        p.aod_az = std::atan2(vy, vx);
        p.aod_el = std::atan2(vz, std::hypot(vx, vy));
        ps.paths.push_back(p);
    }
    return ps;
}

double fspl_db(double d_m, double f_ghz)
{
    if (!(d_m > 0.0) || !(f_ghz > 0.0))
        throw std::invalid_argument("fspl_db: distance and frequency must be positive");
    return 32.45 + 20.0 * std::log10(d_m) + 20.0 * std::log10(f_ghz);
}

PathSet assign_nlos_powers(PathSet ps, const LspCoefficients &pl_nlos, double sf_db)
{
    std::size_t n = 0;
    for (const auto &p : ps.paths)
        n += p.is_los ? 0 : 1;
    if (n == 0)
        throw std::invalid_argument("assign_nlos_powers: no NLOS paths");
    const double loss_db = eval_mean(pl_nlos, ps.d_m, ps.f_ghz, ps.alpha) + sf_db;
    const double each = std::pow(10.0, -0.1 * loss_db) / static_cast<double>(n);
    for (auto &p : ps.paths)
        if (!p.is_los)
            p.power = each;
    return ps;
}

PathSet add_los(PathSet ps)
{
    if (ps.has_los())
        throw std::invalid_argument("add_los: path set already has a LOS path");
    Path p;
    p.is_los = true;
    p.delay_s = ps.los.delay_s;
    p.power = std::pow(10.0, -0.1 * fspl_db(ps.d_m, ps.f_ghz));
    p.aoa_az = ps.los.aoa_az;
    p.aoa_el = ps.los.aoa_el;
    p.aod_az = ps.los.aod_az;
    p.aod_el = ps.los.aod_el;
    ps.paths.insert(ps.paths.begin(), p);
    return ps;
}

PathSet draw_xpr(PathSet ps, const LspCoefficients &xpr, Rng &rng)
{
    const double mean = eval_mean(xpr, ps.d_m, ps.f_ghz, ps.alpha);
    double sd = eval_std_raw(xpr, ps.f_ghz, ps.alpha);
    if (sd < 0.0)
    {
        log::warn_once("xpr_std_clamp", "XPR: negative STD clamped to 0.5 dB");
        sd = 0.5;
    }
    std::normal_distribution<double> nd(0.0, 1.0);
    for (auto &p : ps.paths)
        p.xpr_db = mean + sd * nd(rng);
    return ps;
}

DropDraws draw_drop(const ScenarioParams &sc, Rng &rng)
{
    DropDraws d;
    d.scatterers = draw_scatterers(sc, rng);
    std::normal_distribution<double> nd(0.0, 1.0);
    d.sf_normal = nd(rng);
    return d;
}

Drop make_drop(const LinkSample &link, const DropDraws &draws, const ParameterSet &params, double f_ghz,
               Rng &xpr_rng)
{
    const StateParams &nl = params.state(LosState::NLOS);
    const StateParams &lo = params.state(LosState::LOS);

    PathSet base = geometry_paths(link, draws.scatterers, f_ghz);
    const double sf_db = eval_std(nl.at(Lsp::SF).c, f_ghz, base.alpha) * draws.sf_normal;

    Drop drop;
    drop.nlos = assign_nlos_powers(std::move(base), nl.at(Lsp::PL).c, sf_db);
    drop.los = add_los(drop.nlos);
    drop.nlos = draw_xpr(std::move(drop.nlos), nl.at(Lsp::XPR).c, xpr_rng);
    drop.los = draw_xpr(std::move(drop.los), lo.at(Lsp::XPR).c, xpr_rng);
    return drop;
}
} // namespace ntn
