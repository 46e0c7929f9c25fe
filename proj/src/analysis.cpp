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

#include "ntn/analysis.hpp"
#include "ntn/log.hpp"
#include "ntn/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ntn
{
namespace
{
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double checked_total(const PathSet &ps)
{
    if (ps.paths.empty())
        throw std::invalid_argument("path set is empty");
    const double P = ps.total_power();
    if (!(P > 0.0))
        throw std::invalid_argument("path set has zero total power");
    return P;
}
} // namespace

// --- Extraction ---

double rms_delay_spread(const PathSet &ps)
{
    const double P = checked_total(ps);
    double t0 = ps.paths[0].delay_s;
    for (const auto &p : ps.paths)
        t0 = std::min(t0, p.delay_s);

    double m = 0.0;
    for (const auto &p : ps.paths)
        m += p.power * (p.delay_s - t0);
    m /= P;
    double v = 0.0;
    for (const auto &p : ps.paths)
    {
        const double d = p.delay_s - t0 - m;
        v += p.power * d * d;
    }
    return std::sqrt(v / P);
}

double angular_spread(std::span<const double> angles, std::span<const double> powers)
{
    if (angles.size() != powers.size() || angles.empty())
        throw std::invalid_argument("angular_spread: size mismatch or empty input");
    double P = 0.0, c = 0.0, s = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i)
    {
        P += powers[i];
        c += powers[i] * std::cos(angles[i]);
        s += powers[i] * std::sin(angles[i]);
    }
    if (!(P > 0.0))
        throw std::invalid_argument("angular_spread: zero total power");
    const double mean = std::atan2(s, c);
    double v = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i)
    {
        const double d = wrap_angle(angles[i] - mean);
        v += powers[i] * d * d;
    }
    return std::sqrt(v / P);
}

double angular_spread(const PathSet &ps, AngleKind which)
{
    checked_total(ps);
    std::vector<double> a, p;
    a.reserve(ps.paths.size());
    p.reserve(ps.paths.size());
    for (const auto &x : ps.paths)
    {
        switch (which)
        {
        case AngleKind::aoa_az: a.push_back(x.aoa_az); break;
        case AngleKind::aod_az: a.push_back(x.aod_az); break;
        case AngleKind::aoa_el: a.push_back(x.aoa_el); break;
        case AngleKind::aod_el: a.push_back(x.aod_el); break;
        }
        p.push_back(x.power);
    }
    return rad2deg(angular_spread(a, p));
}

double k_factor(const PathSet &ps)
{
    double plos = 0.0, pn = 0.0;
    bool found = false;
    for (const auto &p : ps.paths)
    {
        if (p.is_los)
        {
            plos += p.power;
            found = true;
        }
        else
            pn += p.power;
    }
    if (!found)
        throw std::invalid_argument("k_factor: path set has no LOS path");
    if (!(pn > 0.0))
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(plos / pn);
}

LspSample extract_link(const PathSet &ps, LosState state, std::size_t link_id)
{
    const double P = checked_total(ps);
    LspSample s;
    s.link_id = link_id;
    s.state = state;
    s.d_m = ps.d_m;
    s.f_ghz = ps.f_ghz;
    s.alpha = ps.alpha;
    s.v.fill(nan);

    s[Lsp::PL] = -10.0 * std::log10(P);
    if (state == LosState::LOS)
        s[Lsp::KF] = k_factor(ps);
    s[Lsp::DS] = std::log10(std::max(rms_delay_spread(ps), ds_floor_s));
    s[Lsp::ASA] = std::log10(std::max(angular_spread(ps, AngleKind::aoa_az), as_floor_deg));
    s[Lsp::ASD] = std::log10(std::max(angular_spread(ps, AngleKind::aod_az), as_floor_deg));
    s[Lsp::ESA] = std::log10(std::max(angular_spread(ps, AngleKind::aoa_el), as_floor_deg));
    s[Lsp::ESD] = std::log10(std::max(angular_spread(ps, AngleKind::aod_el), as_floor_deg));
    double x = 0.0;
    for (const auto &p : ps.paths)
        x += p.xpr_db;
    s[Lsp::XPR] = x / static_cast<double>(ps.paths.size());
    return s;
}

std::vector<LspSample> extract_all(std::span<const PathSet> sets, LosState state)
{
    if (sets.empty())
        throw std::invalid_argument("extract_all: no path sets");
    std::vector<LspSample> out;
    out.reserve(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i)
        out.push_back(extract_link(sets[i], state, i));
    return out;
}

// --- Regression ---

namespace
{
constexpr double decade_tol = 1e-9;

Range range_of(std::span<const double> v)
{
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double x : v)
    {
        r.min = std::min(r.min, x);
        r.max = std::max(r.max, x);
    }
    return r;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd &X, const Eigen::VectorXd &y)
{
    return X.colPivHouseholderQr().solve(y);
}
} // namespace

FitResult fit_multilinear(std::span<const LspSample> samples, Lsp lsp, const CoeffMask &mask)
{
    std::vector<const LspSample *> use;
    use.reserve(samples.size());
    for (const auto &s : samples)
        if (std::isfinite(s[lsp]) && s.d_m > 0.0 && s.f_ghz > 0.0 && s.alpha > 0.0)
            use.push_back(&s);

    std::size_t n_req = 0;
    for (bool b : mask)
        n_req += b ? 1 : 0;
    if (use.size() < 10 * std::max<std::size_t>(n_req, 1))
        throw std::invalid_argument("fit_multilinear(" + std::string(to_string(lsp)) + "): " +
                                    std::to_string(use.size()) + " samples, need at least 10 per regressor");

    const std::size_t n = use.size();
    std::vector<double> ld(n), lf(n), la(n);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
    {
        ld[i] = std::log10(use[i]->d_m);
        lf[i] = std::log10(use[i]->f_ghz);
        la[i] = std::log10(use[i]->alpha);
        y[static_cast<Eigen::Index>(i)] = (*use[i])[lsp];
    }

    FitResult r;
    r.lsp = lsp;
    r.n = n;
    r.d_m = range_of(ld);
    r.f_ghz = range_of(lf);
    r.alpha = range_of(la);
    const bool d_ok = r.d_m.max - r.d_m.min >= 1.0 - decade_tol;
    const bool f_ok = r.f_ghz.max - r.f_ghz.min >= 1.0 - decade_tol;
    const bool a_ok = r.alpha.max - r.alpha.min >= 0.1;
    r.d_m = {std::pow(10.0, r.d_m.min), std::pow(10.0, r.d_m.max)};
    r.f_ghz = {std::pow(10.0, r.f_ghz.min), std::pow(10.0, r.f_ghz.max)};
    r.alpha = {std::pow(10.0, r.alpha.min), std::pow(10.0, r.alpha.max)};

    CoeffMask use_mask = mask;
    auto drop = [&](Coeff c, bool ok) {
        if (has(use_mask, c) && !ok)
        {
            use_mask[static_cast<std::size_t>(c)] = false;
            r.degenerate.push_back(c);
        }
    };
    drop(Coeff::eps, d_ok);
    drop(Coeff::gam, f_ok);
    drop(Coeff::alp, a_ok);
    drop(Coeff::del, f_ok);
    drop(Coeff::bet, a_ok);
    if (!r.degenerate.empty())
        log::warn_once("fit_degenerate:" + std::string(to_string(lsp)),
                       "fit " + std::string(to_string(lsp)) +
                           ": covariate span too small, some coefficients fixed at zero");
    r.fitted = use_mask;

    auto column = [&](Coeff c, std::size_t i) -> double {
        switch (c)
        {
        case Coeff::mu:
        case Coeff::sig: return 1.0;
        case Coeff::eps: return ld[i];
        case Coeff::gam:
        case Coeff::del: return lf[i];
        case Coeff::alp:
        case Coeff::bet: return la[i];
        }
        return 0.0;
    };

    auto solve_part = [&](std::initializer_list<Coeff> part, const Eigen::VectorXd &target,
                          LspCoefficients &out) -> Eigen::VectorXd {
        std::vector<Coeff> cols;
        for (Coeff c : part)
            if (has(use_mask, c))
                cols.push_back(c);
        if (cols.empty())
            return target;
        Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < cols.size(); ++k)
                X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = column(cols[k], i);
        const Eigen::VectorXd beta = least_squares(X, target);
        for (std::size_t k = 0; k < cols.size(); ++k)
            out.ref(cols[k]) = beta[static_cast<Eigen::Index>(k)];
        return target - X * beta;
    };

    const Eigen::VectorXd res = solve_part({Coeff::mu, Coeff::eps, Coeff::gam, Coeff::alp}, y, r.coeffs);
    r.residual_rms = std::sqrt(res.squaredNorm() / static_cast<double>(n));

    const Eigen::VectorXd a = res.cwiseAbs() * std::sqrt(pi / 2.0);
    const Eigen::VectorXd res2 = solve_part({Coeff::sig, Coeff::del, Coeff::bet}, a, r.coeffs);
    r.std_residual_rms = std::sqrt(res2.squaredNorm() / static_cast<double>(n));
    return r;
}

void assign_shadow_fading(std::span<LspSample> samples, const FitResult &pl_fit)
{
    for (auto &s : samples)
        s[Lsp::SF] = s[Lsp::PL] - eval_mean(pl_fit.coeffs, s.d_m, s.f_ghz, s.alpha);
}

CoeffMask fit_mask(const StateParams &ref, Lsp lsp)
{
    CoeffMask m = ref.at(lsp).modeled;
    if (lsp == Lsp::PL && ref.has(Lsp::SF))
    {
        const CoeffMask &sf = ref.at(Lsp::SF).modeled;
        for (Coeff c : {Coeff::sig, Coeff::del, Coeff::bet})
            m[static_cast<std::size_t>(c)] = sf[static_cast<std::size_t>(c)];
    }
    return m;
}

SetFit fit_parameter_set(std::span<LspSample> los, std::span<LspSample> nlos, const ParameterSet &reference,
                         const std::string &name)
{
    SetFit out;
    out.params.name = name;
    out.params.scenario = reference.scenario;
    for (LosState st : all_states)
    {
        std::span<LspSample> smp = (st == LosState::LOS) ? los : nlos;
        const StateParams &ref = reference.state(st);
        StateParams &dst = out.params.state(st);
        dst.clusters = ref.clusters;
        if (smp.empty())
            continue;
        for (const auto &[lsp, entry] : ref.lsps)
        {
            if (lsp == Lsp::SF)
                continue;
            const FitResult fr = fit_multilinear(smp, lsp, fit_mask(ref, lsp));
            if (lsp == Lsp::PL)
            {
                LspEntry pl, sf;
                pl.c.mu = fr.coeffs.mu;
                pl.c.eps = fr.coeffs.eps;
                pl.c.gam = fr.coeffs.gam;
                pl.c.alp = fr.coeffs.alp;
                pl.c.lambda_m = entry.c.lambda_m;
                sf.c.sig = fr.coeffs.sig;
                sf.c.del = fr.coeffs.del;
                sf.c.bet = fr.coeffs.bet;
                for (Coeff c : {Coeff::mu, Coeff::eps, Coeff::gam, Coeff::alp})
                    pl.modeled[static_cast<std::size_t>(c)] = has(fr.fitted, c);
                for (Coeff c : {Coeff::sig, Coeff::del, Coeff::bet})
                    sf.modeled[static_cast<std::size_t>(c)] = has(fr.fitted, c);
                if (ref.has(Lsp::SF))
                    sf.c.lambda_m = ref.at(Lsp::SF).c.lambda_m;
                dst.lsps[Lsp::PL] = pl;
                dst.lsps[Lsp::SF] = sf;
                assign_shadow_fading(smp, fr);
            }
            else
            {
                LspEntry e;
                e.c = fr.coeffs;
                e.c.lambda_m = entry.c.lambda_m;
                e.modeled = fr.fitted;
                dst.lsps[lsp] = e;
            }
            out.results.emplace_back(st, fr);
        }
    }
    return out;
}

// --- Resimulation ---

namespace
{
// Scales NLOS angle offsets so that the spread hits the target. Returns false when the target is
// above what the offsets can produce; the angles are then left at the widest spread found.
// With a LOS path the azimuth offsets go through pi*tanh(s*z/pi), which tends to the antipode of the
// LOS direction, the widest spread a dominant LOS path allows.
bool fit_angles(std::vector<double> &angles, const std::vector<double> &powers, const std::vector<double> &z,
                const std::vector<bool> &is_los, double ref, double target_rad, bool elevation)
{
    const std::size_t n = angles.size();
    const bool compress = !elevation && std::find(is_los.begin(), is_los.end(), true) != is_los.end();
    auto place = [&](double s) {
        for (std::size_t i = 0; i < n; ++i)
        {
            const double o = is_los[i] ? 0.0 : compress ? pi * std::tanh(s * z[i] / pi) : s * z[i];
            angles[i] = elevation ? std::clamp(ref + o, -pi / 2, pi / 2) : wrap_angle(ref + o);
        }
        return angular_spread(angles, powers);
    };

    // The spread need not grow monotonically with s (wrapping), so bracket on a grid first
    constexpr int grid = 64;
    const double s_max = compress ? 8.0 * two_pi : elevation ? pi : two_pi;
    double lo = 0.0, hi = -1.0, best_s = 0.0, best = place(0.0);
    if (best >= target_rad)
        return true;
    for (int k = 1; k <= grid; ++k)
    {
        const double s = s_max * k / grid;
        const double v = place(s);
        if (v >= target_rad)
        {
            hi = s;
            break;
        }
        lo = s;
        if (v > best)
        {
            best = v;
            best_s = s;
        }
    }
    if (hi < 0.0)
    {
        place(best_s);
        return false;
    }
    for (int it = 0; it < 100 && hi - lo > 1e-14; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        if (place(mid) < target_rad)
            lo = mid;
        else
            hi = mid;
    }
    place(0.5 * (lo + hi));
    return true;
}
} // namespace

PathSet synth_paths(const LspSample &drawn, const ClusterParams &cp, LosState state, Rng &rng, ResimStats *stats)
{
    if (!cp.clusters || !cp.r_ds)
        throw std::invalid_argument("resimulate: cluster count or delay factor missing");
    const int L = *cp.clusters;
    const double r = *cp.r_ds;
    const bool los = (state == LosState::LOS);
    const int n_nlos = los ? L - 1 : L;
    if (n_nlos < 1)
        throw std::invalid_argument("resimulate: too few clusters");

    const double ds = std::pow(10.0, drawn[Lsp::DS]);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> nd(0.0, 1.0);

    std::vector<double> tau(static_cast<std::size_t>(n_nlos));
    for (auto &t : tau)
        t = -r * ds * std::log(1.0 - uni(rng)); // 1-u in (0, 1]
    std::sort(tau.begin(), tau.end());
    const double t0 = tau.front();
    for (auto &t : tau)
        t -= t0;

    PathSet ps;
    ps.d_m = drawn.d_m;
    ps.f_ghz = drawn.f_ghz;
    ps.alpha = drawn.alpha;
    double pn = 0.0;
    if (los)
    {
        Path p;
        p.is_los = true;
        ps.paths.push_back(p);
    }
    for (double t : tau)
    {
        Path p;
        p.delay_s = t;
        p.power = std::exp(-t * (r - 1.0) / (r * ds));
        pn += p.power;
        ps.paths.push_back(p);
    }
    if (los)
        ps.paths[0].power = std::pow(10.0, 0.1 * drawn[Lsp::KF]) * pn;

    // Delay scaling leaves powers and the K-factor unchanged
    const double cur = rms_delay_spread(ps);
    const double scale = cur > 0.0 ? ds / cur : 1.0;
    const double total = ps.total_power();
    const double gain = std::pow(10.0, -0.1 * drawn[Lsp::PL]);
    const double d_delay = drawn.d_m / speed_of_light;
    for (auto &p : ps.paths)
    {
        p.delay_s = d_delay + p.delay_s * scale;
        p.power *= gain / total;
        p.xpr_db = drawn[Lsp::XPR];
    }

    const std::size_t n = ps.paths.size();
    std::vector<double> powers(n), angles(n), z(n);
    std::vector<bool> is_los(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        powers[i] = ps.paths[i].power;
        is_los[i] = ps.paths[i].is_los;
    }

    struct Spec
    {
        Lsp lsp;
        double ref;
        bool elevation;
        double Path::*field;
    };
    const Spec specs[4] = {{Lsp::ASA, 0.0, false, &Path::aoa_az},
                           {Lsp::ASD, 0.0, false, &Path::aod_az},
                           {Lsp::ESA, drawn.alpha, true, &Path::aoa_el},
                           {Lsp::ESD, 0.0, true, &Path::aod_el}};
    for (const auto &sp : specs)
    {
        for (auto &x : z)
            x = nd(rng);
        const double target = deg2rad(std::pow(10.0, drawn[sp.lsp]));
        if (!fit_angles(angles, powers, z, is_los, sp.ref, target, sp.elevation) && stats)
            ++stats->angle_saturated;
        for (std::size_t i = 0; i < n; ++i)
            ps.paths[i].*sp.field = angles[i];
    }
    return ps;
}

std::vector<LspSample> resimulate(const ParameterSet &fitted, LosState state, const CorrelationMatrix &corr,
                                  std::span<const Covariates> links, const ResimOptions &opt,
                                  std::vector<LspSample> *drawn, ResimStats *stats)
{
    const StateParams &sp = fitted.state(state);
    const LspSampler sampler(sp, state, corr);
    std::vector<LspSample> out(links.size()), in(links.size());
    std::vector<ResimStats> part(std::max(1u, opt.jobs));

    parallel_for(links.size(), opt.jobs, [&](unsigned j, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
        {
            const Covariates &c = links[i];
            Rng rng = make_rng(opt.seed, {tag(Stream::resim), static_cast<std::uint64_t>(fitted.scenario),
                                          static_cast<std::uint64_t>(state), c.link_id,
                                          std::bit_cast<std::uint64_t>(c.f_ghz)});
            std::normal_distribution<double> nd(0.0, 1.0);
            std::array<double, 7> w{};
            for (auto &x : w)
                x = nd(rng);
            const double xw = nd(rng);
            LspSample s = sampler.sample(c.d_m, c.f_ghz, c.alpha, w, xw);
            s.link_id = c.link_id;
            const PathSet ps = synth_paths(s, sp.clusters, state, rng, &part[j]);
            out[i] = extract_link(ps, state, c.link_id);
            in[i] = s;
            ++part[j].links;
        }
    });

    if (stats)
        for (const auto &p : part)
        {
            stats->links += p.links;
            stats->angle_saturated += p.angle_saturated;
        }
    if (drawn)
        *drawn = std::move(in);
    return out;
}

// --- Comparison ---

std::size_t ComparisonReport::failures(bool gated_only) const
{
    std::size_t n = 0;
    for (const auto &r : rows)
        if (!r.pass && (!gated_only || r.gated))
            ++n;
    return n;
}

std::string ComparisonReport::to_csv() const
{
    std::ostringstream os;
    os << "scenario,state,lsp,coeff,fitted,reference,delta,pass\n";
    char buf[256];
    for (const auto &r : rows)
    {
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%.17g,%.17g,%.17g,%d\n", r.scenario.c_str(),
                      std::string(to_string(r.state)).c_str(), std::string(to_string(r.lsp)).c_str(),
                      std::string(to_string(r.coeff)).c_str(), r.fitted, r.reference, r.delta, r.pass ? 1 : 0);
        os << buf;
    }
    return os.str();
}

std::string ComparisonReport::to_table() const
{
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-16s %-5s %-4s %-5s %10s %10s %9s  %s\n", "scenario", "state", "lsp", "coeff",
                  "fitted", "reference", "delta", "");
    os << buf;
    for (const auto &r : rows)
    {
        std::snprintf(buf, sizeof buf, "%-16s %-5s %-4s %-5s %10.4f %10.4f %9.4f  %s%s\n", r.scenario.c_str(),
                      std::string(to_string(r.state)).c_str(), std::string(to_string(r.lsp)).c_str(),
                      std::string(to_string(r.coeff)).c_str(), r.fitted, r.reference, r.delta,
                      r.pass ? "ok" : "FAIL", r.gated ? " (gated)" : "");
        os << buf;
    }
    for (const auto &m : missing)
        os << "missing: " << m << "\n";
    return os.str();
}

ComparisonReport compare(const ParameterSet &fitted, const ParameterSet &reference, const Tolerances &tol,
                         const std::vector<std::string> &gate)
{
    ComparisonReport rep;
    for (LosState st : all_states)
    {
        const StateParams &ref = reference.state(st);
        const StateParams &fit = fitted.state(st);
        for (const auto &[lsp, entry] : ref.lsps)
        {
            if (!fit.has(lsp))
            {
                rep.missing.push_back(fitted.name + "/" + std::string(to_string(st)) + "/" +
                                      std::string(to_string(lsp)));
                continue;
            }
            for (Coeff c : all_coeffs)
            {
                if (!has(entry.modeled, c))
                    continue;
                ComparisonRow row;
                row.scenario = fitted.name;
                row.state = st;
                row.lsp = lsp;
                row.coeff = c;
                row.fitted = fit.at(lsp).c.get(c);
                row.reference = entry.c.get(c);
                row.delta = row.fitted - row.reference;
                row.pass = std::abs(row.delta) <= tol.for_lsp(lsp) + 1e-12;
                const std::string key = std::string(to_string(lsp)) + "." + std::string(to_string(c));
                row.gated = std::find(gate.begin(), gate.end(), key) != gate.end();
                rep.rows.push_back(row);
            }
        }
    }
    return rep;
}
} // namespace ntn
