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

#include "ntn/constellation.hpp"
#include "ntn/log.hpp"
#include "ntn/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace ntn
{
void WalkerSpec::validate() const
{
    if (total_sats <= 0 || planes <= 0)
        throw std::invalid_argument("walker: total and planes must be positive");
    if (total_sats % planes != 0)
        throw std::invalid_argument("walker: total (" + std::to_string(total_sats) +
                                    ") not divisible by planes (" + std::to_string(planes) + ")");
    if (phasing < 0 || phasing >= planes)
        throw std::invalid_argument("walker: phasing must be in [0, planes)");
    if (!(altitude_km > 0.0))
        throw std::invalid_argument("walker: altitude must be positive");
    if (!(inc >= 0.0 && inc <= pi))
        throw std::invalid_argument("walker: inclination must be in [0, 180] deg");
}

std::vector<OrbitalElements> walker_delta(const WalkerSpec &spec, const EarthConstants &c)
{
    spec.validate();
    const int per_plane = spec.total_sats / spec.planes;
    std::vector<OrbitalElements> out;
    out.reserve(static_cast<std::size_t>(spec.total_sats));
    for (int p = 0; p < spec.planes; ++p)
    {
        for (int s = 0; s < per_plane; ++s)
        {
            OrbitalElements el;
            el.a_km = c.radius_km + spec.altitude_km;
            el.e = 0.0;
            el.inc = spec.inc;
            el.raan0 = wrap_positive(two_pi * p / spec.planes);
            el.argp0 = 0.0;
            el.nu0 = wrap_positive(two_pi * s / per_plane + two_pi * spec.phasing * p / spec.total_sats);
            out.push_back(el);
        }
    }
    return out;
}

std::vector<Satellite> make_constellation(std::span<const WalkerSpec> shells, const EarthConstants &c)
{
    std::vector<Satellite> sats;
    for (std::size_t k = 0; k < shells.size(); ++k)
    {
        const auto els = walker_delta(shells[k], c);
        const int per_plane = shells[k].total_sats / shells[k].planes;
        for (std::size_t i = 0; i < els.size(); ++i)
        {
            Satellite s;
            s.name = "S" + std::to_string(k) + "-P" + std::to_string(i / per_plane) + "-" +
                     std::to_string(i % per_plane);
            s.elements = els[i];
            s.shell = static_cast<int>(k);
            sats.push_back(std::move(s));
        }
    }
    return sats;
}

std::vector<TerminalLocation> sample_terminals(std::size_t n, Rng &rng, double lat_limit, const EarthConstants &c)
{
    if (n == 0)
        throw std::invalid_argument("sample_terminals: n must be positive");
    if (!(lat_limit > 0.0 && lat_limit <= pi / 2))
        throw std::invalid_argument("sample_terminals: latitude limit must be in (0, 90] deg");

    // Area-uniform: sin(lat) is uniform on [-sin(limit), sin(limit)]
    const double s_max = std::sin(lat_limit);
    std::uniform_real_distribution<double> ulon(-pi, pi);
    std::uniform_real_distribution<double> us(-s_max, s_max);

    std::vector<TerminalLocation> out(n);
    for (auto &u : out)
    {
        u.lon = ulon(rng);
        u.lat = std::clamp(std::asin(us(rng)), -lat_limit, lat_limit);
        u.radius_km = c.radius_km;
    }
    return out;
}

std::vector<double> time_grid(double t_start, double t_end, double t_step)
{
    if (!(t_step > 0.0) || !(t_end >= t_start))
        throw std::invalid_argument("time grid: require t_step > 0 and t_end >= t_start");
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::floor((t_end - t_start) / t_step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i)
    {
        const double ti = t_start + static_cast<double>(i) * t_step;
        if (ti < t_end)
            t.push_back(ti);
    }
    return t;
}

double slant_range(double Re_km, double h_km, double elevation)
{
    const double s = std::sin(elevation);
    return -Re_km * s + std::sqrt(Re_km * Re_km * s * s + h_km * h_km + 2.0 * Re_km * h_km);
}

namespace
{
struct SatPositions
{
    // [time][sat]
    std::vector<Eigen::Vector3d> now, next;
    std::size_t n_sat = 0;
};

SatPositions precompute(std::span<const Satellite> sats, std::span<const double> times, const EarthConstants &c)
{
    SatPositions P;
    P.n_sat = sats.size();
    P.now.resize(sats.size() * times.size());
    P.next.resize(sats.size() * times.size());
    for (std::size_t s = 0; s < sats.size(); ++s)
    {
        sats[s].elements.validate(c);
        for (std::size_t k = 0; k < times.size(); ++k)
        {
            P.now[k * P.n_sat + s] = rotating_position(propagate_point(sats[s].elements, times[k], c).geo);
            P.next[k * P.n_sat + s] =
                rotating_position(propagate_point(sats[s].elements, times[k] + direction_dt_s, c).geo);
        }
    }
    return P;
}

template <typename Visit>
void for_each_visible(const SatPositions &P, std::span<const Satellite> sats, const TerminalLocation &u,
                      std::size_t n_times, double min_elev, Visit &&visit)
{
    const Eigen::Matrix3d Rq = rotation_to_mt_frame(u);
    const Eigen::Vector3d up = terminal_position(u);
    for (std::size_t s = 0; s < sats.size(); ++s)
    {
        for (std::size_t k = 0; k < n_times; ++k)
        {
            const Eigen::Vector3d q = Rq * (P.now[k * P.n_sat + s] - up);
            if (!(q.z() > 0.0))
                continue;
            const double a = elevation(q);
            if (a < min_elev)
                continue;
            visit(s, k, q, a);
        }
    }
}

} // namespace

std::vector<LinkSample> enumerate_links(std::span<const Satellite> sats,
                                        std::span<const TerminalLocation> terminals,
                                        std::span<const double> times, const LinkOptions &opt)
{
    const double min_elev = std::max(opt.min_elevation, absolute_min_elevation);
    const SatPositions P = precompute(sats, times, opt.earth);
    int n_shells = 0;
    for (const auto &s : sats)
        n_shells = std::max(n_shells, s.shell + 1);

    auto key_hash = [&](std::size_t term, std::size_t sat, std::size_t k) {
        return hash_unit(opt.seed ^ 0x4c494e4b53ULL, {term, sat, k});
    };

    // Per-shell threshold on the link hash so that exactly max_links_per_shell links survive
    std::vector<double> threshold(static_cast<std::size_t>(n_shells), 2.0);
    const unsigned jobs = std::max(1u, opt.jobs);
    if (opt.max_links_per_shell > 0)
    {
        const std::size_t quota = opt.max_links_per_shell;
        using Heap = std::priority_queue<double>;
        std::vector<std::vector<Heap>> heaps(jobs, std::vector<Heap>(static_cast<std::size_t>(n_shells)));
        parallel_for(terminals.size(), jobs, [&](unsigned j, std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i)
                for_each_visible(P, sats, terminals[i], times.size(), min_elev,
                                 [&](std::size_t s, std::size_t k, const Eigen::Vector3d &, double) {
                                     auto &h = heaps[j][static_cast<std::size_t>(sats[s].shell)];
                                     const double v = key_hash(i, s, k);
                                     if (h.size() < quota)
                                         h.push(v);
                                     else if (v < h.top())
                                     {
                                         h.pop();
                                         h.push(v);
                                     }
                                 });
        });
        for (std::size_t sh = 0; sh < threshold.size(); ++sh)
        {
            std::vector<double> all;
            for (auto &w : heaps)
                while (!w[sh].empty())
                {
                    all.push_back(w[sh].top());
                    w[sh].pop();
                }
            if (all.size() >= quota)
            {
                std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(quota - 1), all.end());
                threshold[sh] = all[quota - 1];
            }
        }
    }

    std::vector<std::vector<LinkSample>> parts(jobs);
    parallel_for(terminals.size(), jobs, [&](unsigned j, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
        {
            const TerminalLocation &u = terminals[i];
            const Eigen::Matrix3d Rq = rotation_to_mt_frame(u);
            for_each_visible(P, sats, u, times.size(), min_elev,
                             [&](std::size_t s, std::size_t k, const Eigen::Vector3d &q, double a) {
                                 if (opt.max_links_per_shell > 0 &&
                                     key_hash(i, s, k) > threshold[static_cast<std::size_t>(sats[s].shell)])
                                     return;
                                 LinkSample L;
                                 L.term_id = i;
                                 L.terminal = u;
                                 L.sat_id = s;
                                 L.shell = sats[s].shell;
                                 L.t_s = times[k];
                                 L.mt.q_km = q;
                                 L.mt.alpha = a;
                                 const Orientation o =
                                     orientation(P.now[k * P.n_sat + s], P.next[k * P.n_sat + s], u, Rq);
                                 L.mt.beta = o.beta;
                                 L.mt.gamma = o.gamma;
                                 L.mt.delta = o.delta;
                                 L.distance_m = q.norm() * 1000.0;
                                 L.elevation = a;
                                 parts[j].push_back(L);
                             });
        }
    });

    std::vector<LinkSample> out;
    for (auto &p : parts)
        out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end(), [](const LinkSample &a, const LinkSample &b) {
        if (a.term_id != b.term_id)
            return a.term_id < b.term_id;
        if (a.sat_id != b.sat_id)
            return a.sat_id < b.sat_id;
        return a.t_s < b.t_s;
    });
    if (out.empty())
        log::warn("enumerate_links: no visible links");
    return out;
}
} // namespace ntn
