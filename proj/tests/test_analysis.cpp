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
#include "oracles.hpp"
#include "synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ntn;

namespace
{
PathSet make_set(const std::vector<double> &delays, const std::vector<double> &powers)
{
    PathSet ps;
    ps.d_m = 1e6;
    ps.f_ghz = 2.0;
    ps.alpha = 0.5;
    for (std::size_t i = 0; i < delays.size(); ++i)
    {
        Path p;
        p.delay_s = delays[i];
        p.power = powers[i];
        ps.paths.push_back(p);
    }
    return ps;
}

double spread_deg(const std::vector<double> &angles, const std::vector<double> &powers)
{
    return rad2deg(angular_spread(angles, powers));
}
} // namespace

TEST_SUITE("analysis")
{
    TEST_CASE("delay spread")
    {
        CHECK(rms_delay_spread(make_set({3e-6}, {1.0})) == 0.0);
        CHECK(rms_delay_spread(make_set({1e-6, 1.4e-6}, {0.2, 0.2})) == doctest::Approx(0.2e-6).epsilon(1e-9));
        const auto three = make_set({0.0, 100e-9, 300e-9}, {0.5, 0.3, 0.2});
        CHECK(rms_delay_spread(three) * 1e9 == doctest::Approx(oracle::ds_three_path_ns).epsilon(1e-9));

        // Invariant under a delay shift and a power scale
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> t(0.0, 1e-5), p(1e-18, 1e-12), k(1e-3, 1e3);
        for (int i = 0; i < 1000; ++i)
        {
            std::vector<double> d(8), w(8);
            for (int j = 0; j < 8; ++j)
            {
                d[static_cast<std::size_t>(j)] = 0.07 + t(rng); // absolute propagation delay included
                w[static_cast<std::size_t>(j)] = p(rng);
            }
            const double ds = rms_delay_spread(make_set(d, w));
            auto d2 = d;
            auto w2 = w;
            const double shift = t(rng), scale = k(rng);
            for (int j = 0; j < 8; ++j)
            {
                d2[static_cast<std::size_t>(j)] -= shift;
                w2[static_cast<std::size_t>(j)] *= scale;
            }
            REQUIRE(rms_delay_spread(make_set(d2, w2)) == doctest::Approx(ds).epsilon(1e-6));
        }
        CHECK_THROWS_AS(rms_delay_spread(make_set({0.0}, {0.0})), std::invalid_argument);
    }

    TEST_CASE("angular spread")
    {
        CHECK(spread_deg({0.4, 0.4, 0.4}, {1.0, 2.0, 3.0}) == doctest::Approx(0.0));
        const double th = 1e-3;
        CHECK(angular_spread(std::vector<double>{th, -th}, std::vector<double>{1.0, 1.0}) == doctest::Approx(th).epsilon(1e-9));
        // Straddling the wrap point
        CHECK(angular_spread(std::vector<double>{pi - th, -pi + th}, std::vector<double>{1.0, 1.0}) ==
              doctest::Approx(th).epsilon(1e-6));

        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> a(-pi, pi), p(0.01, 1.0), k(1e-6, 1e6);
        for (int i = 0; i < 2000; ++i)
        {
            std::vector<double> x(10), w(10);
            for (int j = 0; j < 10; ++j)
            {
                x[static_cast<std::size_t>(j)] = a(rng);
                w[static_cast<std::size_t>(j)] = p(rng);
            }
            const double s = angular_spread(x, w);
            REQUIRE(s >= 0.0);
            REQUIRE(s <= pi);
            auto x2 = x;
            auto w2 = w;
            const double rot = a(rng), scale = k(rng);
            for (int j = 0; j < 10; ++j)
            {
                x2[static_cast<std::size_t>(j)] = wrap_angle(x2[static_cast<std::size_t>(j)] + rot);
                w2[static_cast<std::size_t>(j)] *= scale;
            }
            REQUIRE(angular_spread(x2, w2) == doctest::Approx(s).epsilon(1e-9));
        }

        // Ten equal-power uniform paths
        double sum = 0.0;
        const int drops = 20000;
        for (int i = 0; i < drops; ++i)
        {
            std::vector<double> x(10);
            for (auto &v : x)
                v = a(rng);
            sum += spread_deg(x, std::vector<double>(10, 1.0));
        }
        CHECK(sum / drops == doctest::Approx(oracle::asa_uniform_10).epsilon(0.01));
    }

    TEST_CASE("k-factor")
    {
        auto ps = make_set({0.0, 1e-7, 2e-7}, {0.5, 0.25, 0.25});
        ps.paths[0].is_los = true;
        CHECK(k_factor(ps) == doctest::Approx(0.0));
        ps.paths[0].power = std::pow(10.0, -oracle::fspl_1e6_2ghz / 10.0);
        ps.paths[1].power = ps.paths[2].power = 0.5 * std::pow(10.0, -oracle::rural_nlos_pl_1e6_2ghz_1rad / 10.0);
        CHECK(k_factor(ps) == doctest::Approx(oracle::kf_from_pl).epsilon(1e-10));
        ps.paths[0].is_los = false;
        CHECK_THROWS_AS(k_factor(ps), std::invalid_argument);
    }

    TEST_CASE("extraction of a single LOS path")
    {
        PathSet ps;
        ps.d_m = 1e6;
        ps.f_ghz = 2.0;
        ps.alpha = 0.8;
        Path p;
        p.is_los = true;
        p.delay_s = ps.d_m / speed_of_light;
        p.power = std::pow(10.0, -oracle::fspl_1e6_2ghz / 10.0);
        p.xpr_db = 9.0;
        ps.paths.push_back(p);
        const auto s = extract_link(ps, LosState::NLOS, 7);
        CHECK(s.link_id == 7);
        CHECK(s[Lsp::PL] == doctest::Approx(oracle::fspl_1e6_2ghz).epsilon(1e-12));
        CHECK(s[Lsp::DS] == std::log10(ds_floor_s));
        CHECK(s[Lsp::ASA] == std::log10(as_floor_deg));
        CHECK(s[Lsp::ESD] == std::log10(as_floor_deg));
        CHECK(s[Lsp::XPR] == 9.0);
        CHECK(std::isnan(s[Lsp::KF]));
        CHECK(std::isnan(s[Lsp::SF]));
        CHECK(s.d_m == ps.d_m);
        CHECK(s.alpha == ps.alpha);
        CHECK_THROWS(extract_all(std::span<const PathSet>{}, LosState::LOS));
    }

    TEST_CASE("regression: exact data")
    {
        Rng rng = make_rng(10, {});
        const auto truth = synthetic::random_truth(rng);
        const auto smp = synthetic::draw(truth, Lsp::DS, 200, rng, false);
        const auto r = fit_multilinear(smp, Lsp::DS);
        for (Coeff c : {Coeff::mu, Coeff::eps, Coeff::gam, Coeff::alp})
            CHECK(r.coeffs.get(c) == doctest::Approx(truth.get(c)).epsilon(1e-9));
        CHECK(r.residual_rms < 1e-9);
        CHECK(r.n == 200);
        CHECK(r.degenerate.empty());
    }

    TEST_CASE("regression: recovery from noisy data")
    {
        for (Lsp l : {Lsp::PL, Lsp::ASA, Lsp::XPR})
        {
            Rng rng = make_rng(20, {static_cast<std::uint64_t>(l)});
            const auto truth = synthetic::random_truth(rng);
            const auto smp = synthetic::draw(truth, l, 100000, rng);
            const auto r = fit_multilinear(smp, l);
            CAPTURE(to_string(l));
            for (Coeff c : {Coeff::mu, Coeff::eps, Coeff::gam, Coeff::alp})
                CHECK(std::abs(r.coeffs.get(c) - truth.get(c)) < 0.02);
            for (Coeff c : {Coeff::sig, Coeff::del, Coeff::bet})
                CHECK(std::abs(r.coeffs.get(c) / truth.get(c) - 1.0) < 0.05);
            CHECK(std::isfinite(r.residual_rms));
        }
    }

    TEST_CASE("regression: degenerate covariates and masks")
    {
        Rng rng = make_rng(11, {});
        auto truth = synthetic::random_truth(rng);
        auto smp = synthetic::draw(truth, Lsp::KF, 500, rng, false);
        for (auto &s : smp)
            s.f_ghz = 20.0;
        const auto r = fit_multilinear(smp, Lsp::KF);
        CHECK(r.coeffs.gam == 0.0);
        CHECK(r.coeffs.del == 0.0);
        CHECK_FALSE(has(r.fitted, Coeff::gam));
        REQUIRE(r.degenerate.size() == 2);

        CoeffMask m = mask_none;
        m[static_cast<std::size_t>(Coeff::mu)] = true;
        m[static_cast<std::size_t>(Coeff::sig)] = true;
        const auto c = fit_multilinear(smp, Lsp::KF, m);
        CHECK(c.coeffs.eps == 0.0);
        CHECK(c.coeffs.alp == 0.0);

        smp.resize(15);
        CHECK_THROWS_AS(fit_multilinear(smp, Lsp::KF), std::invalid_argument);
    }

    TEST_CASE("shadow fading is the PL residual")
    {
        Rng rng = make_rng(12, {});
        const auto truth = synthetic::random_truth(rng);
        auto smp = synthetic::draw(truth, Lsp::PL, 1000, rng);
        const auto r = fit_multilinear(smp, Lsp::PL);
        assign_shadow_fading(smp, r);
        double sum = 0.0;
        for (const auto &s : smp)
        {
            CHECK(s[Lsp::SF] == doctest::Approx(s[Lsp::PL] - eval_mean(r.coeffs, s.d_m, s.f_ghz, s.alpha)));
            sum += s[Lsp::SF];
        }
        CHECK(std::abs(sum / 1000.0) < 1e-9);
    }

    TEST_CASE("resimulated K-factor and delay spread follow the draws")
    {
        const auto &ref = ParameterDatabase::bundled();
        const auto &set = ref.base(Scenario::DenseUrban);
        std::vector<Covariates> cov;
        Rng rng = make_rng(13, {});
        std::uniform_real_distribution<double> el(deg2rad(10.0), deg2rad(90.0)), d(5e5, 2e7);
        for (std::size_t i = 0; i < 4000; ++i)
            cov.push_back({i, d(rng), i % 2 ? 2.0 : 20.0, el(rng)});
        std::vector<LspSample> drawn;
        ResimStats stats;
        const auto out = resimulate(set, LosState::LOS, ref.correlation(Scenario::DenseUrban, LosState::LOS), cov,
                                    {5, 2}, &drawn, &stats);
        REQUIRE(out.size() == cov.size());
        CHECK(stats.links == cov.size());
        double kd = 0.0, ke = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            kd += drawn[i][Lsp::KF];
            ke += out[i][Lsp::KF];
            REQUIRE(out[i][Lsp::DS] == doctest::Approx(drawn[i][Lsp::DS]).epsilon(1e-9));
            REQUIRE(out[i][Lsp::PL] == doctest::Approx(drawn[i][Lsp::PL]).epsilon(1e-9));
            REQUIRE(out[i][Lsp::XPR] == doctest::Approx(drawn[i][Lsp::XPR]).epsilon(1e-12));
        }
        CHECK(std::abs(kd - ke) / static_cast<double>(out.size()) < 1.0);

        // Same result with a different worker count
        const auto again = resimulate(set, LosState::LOS, ref.correlation(Scenario::DenseUrban, LosState::LOS), cov,
                                      {5, 1});
        for (std::size_t i = 0; i < out.size(); ++i)
            for (Lsp l : all_lsps)
                if (!std::isnan(out[i][l]))
                    REQUIRE(again[i][l] == out[i][l]);

        ClusterParams none;
        Rng r2 = make_rng(1, {});
        CHECK_THROWS_AS(synth_paths(drawn[0], none, LosState::LOS, r2), std::invalid_argument);
    }

    TEST_CASE("synthetic path sets")
    {
        const auto &ref = ParameterDatabase::bundled();
        const auto &sp = ref.base(Scenario::Rural).state(LosState::NLOS);
        LspSample s;
        s.d_m = 2e6;
        s.f_ghz = 2.0;
        s.alpha = 0.6;
        s.v.fill(0.0);
        s[Lsp::PL] = 170.0;
        s[Lsp::DS] = -6.5;
        s[Lsp::ASA] = 1.5;
        s[Lsp::ASD] = -2.0;
        s[Lsp::ESA] = 0.8;
        s[Lsp::ESD] = -2.5;
        s[Lsp::XPR] = 7.0;
        Rng rng = make_rng(3, {});
        const auto ps = synth_paths(s, sp.clusters, LosState::NLOS, rng);
        CHECK(ps.paths.size() == static_cast<std::size_t>(*sp.clusters.clusters));
        CHECK_FALSE(ps.has_los());
        const auto x = extract_link(ps, LosState::NLOS);
        CHECK(x[Lsp::PL] == doctest::Approx(170.0).epsilon(1e-12));
        CHECK(x[Lsp::DS] == doctest::Approx(-6.5).epsilon(1e-9));
        CHECK(x[Lsp::ASA] == doctest::Approx(1.5).epsilon(1e-6));
        CHECK(x[Lsp::ASD] == doctest::Approx(-2.0).epsilon(1e-6));
        CHECK(x[Lsp::ESA] == doctest::Approx(0.8).epsilon(1e-6));
        for (const auto &p : ps.paths)
            CHECK(p.delay_s >= s.d_m / speed_of_light);
    }

    TEST_CASE("comparison reports")
    {
        const auto &db = ParameterDatabase::bundled();
        const auto &du = db.base(Scenario::DenseUrban);
        const Tolerances tol;
        const auto same = compare(du, du, tol);
        CHECK(same.failures() == 0);
        CHECK_FALSE(same.rows.empty());
        for (const auto &r : same.rows)
            CHECK(r.delta == 0.0);

        auto bumped = du;
        bumped.state(LosState::NLOS).lsps.at(Lsp::DS).c.mu += 0.3;
        const auto one = compare(bumped, du, tol, {"DS.mu"});
        CHECK(one.failures() == 1);
        CHECK(one.failures(true) == 1);
        CHECK(compare(bumped, du, tol, {"KF.mu"}).failures(true) == 0);

        // The published resimulated DS means stay within tolerance of the base set
        const auto paper = compare(db.set("DenseUrbanResim"), du, tol, {"DS.mu"});
        CHECK(paper.failures(true) == 0);

        const std::string csv = same.to_csv();
        CHECK(csv.rfind("scenario,state,lsp,coeff,fitted,reference,delta,pass\n", 0) == 0);
        CHECK_FALSE(same.to_table().empty());

        auto partial = du;
        partial.state(LosState::LOS).lsps.erase(Lsp::XPR);
        CHECK_FALSE(compare(partial, du, tol).missing.empty());
    }
}
