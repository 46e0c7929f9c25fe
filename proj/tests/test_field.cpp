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


#include "ntn/correlated_field.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace ntn;

namespace
{
// Empirical correlation of the field at pairs separated by delta in random directions
double pair_correlation(double lambda, double delta, std::uint64_t seed, int n = 10000)
{
    const double L = 100.0 * lambda;
    std::mt19937_64 pick(seed);
    std::uniform_real_distribution<double> u(0.0, L), th(0.0, 6.283185307179586);
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(2 * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
    {
        const Eigen::Vector2d p(u(pick), u(pick));
        const double t = th(pick);
        pts.push_back(p);
        pts.push_back(p + delta * Eigen::Vector2d(std::cos(t), std::sin(t)));
    }
    Rng rng = make_rng(seed, {6});
    const auto v = correlated_field(pts, lambda, rng);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i)
    {
        const double a = v[2 * static_cast<std::size_t>(i)], b = v[2 * static_cast<std::size_t>(i) + 1];
        sx += a;
        sy += b;
        sxx += a * a;
        syy += b * b;
        sxy += a * b;
    }
    const double c = sxy / n - sx / n * sy / n;
    return c / std::sqrt((sxx / n - sx / n * sx / n) * (syy / n - sy / n * sy / n));
}
} // namespace

TEST_SUITE("field")
{
    TEST_CASE("zero separation gives identical values")
    {
        std::vector<Eigen::Vector2d> pts = {{3.0, 4.0}, {3.0, 4.0}, {17.5, -2.0}};
        Rng rng = make_rng(1, {});
        const auto v = correlated_field(pts, 20.0, rng);
        CHECK(v[0] == v[1]);
    }

    TEST_CASE("unit variance and zero mean")
    {
        Rng rng = make_rng(2, {});
        const auto g = GridField::generate({0.0, 0.0}, {5000.0, 5000.0}, 50.0, rng);
        double s = 0, ss = 0;
        const double n = static_cast<double>(g.nx() * g.ny());
        for (std::size_t i = 0; i < g.nx(); ++i)
            for (std::size_t j = 0; j < g.ny(); ++j)
            {
                s += g.value(i, j);
                ss += g.value(i, j) * g.value(i, j);
            }
        CHECK(std::abs(s / n) < 0.1);
        CHECK(ss / n == doctest::Approx(1.0).epsilon(0.1));
        CHECK(g.clipped_fraction() < 0.05);
        CHECK(g.lambda() == 50.0);
        CHECK_THROWS_AS(g.at({-1000.0, 0.0}), std::out_of_range);

        // Off-grid points keep unit variance after interpolation
        std::mt19937_64 pick(4);
        std::uniform_real_distribution<double> u(0.0, 5000.0);
        double q = 0;
        const int m = 20000;
        for (int i = 0; i < m; ++i)
        {
            const double x = g.at({u(pick), u(pick)});
            q += x * x;
        }
        CHECK(q / m == doctest::Approx(1.0).epsilon(0.1));
    }

    TEST_CASE("exponential autocorrelation")
    {
        const double lambda = 30.0;
        for (double k : {0.5, 1.0, 2.0})
        {
            const double r = pair_correlation(lambda, k * lambda, 10 + static_cast<std::uint64_t>(k * 4));
            CAPTURE(k);
            CHECK(std::abs(r - std::exp(-k)) < 0.1);
        }
        CHECK(std::abs(pair_correlation(lambda, 10.0 * lambda, 99)) < 0.1);
    }

    TEST_CASE("deterministic for a seed")
    {
        std::vector<Eigen::Vector2d> pts = {{0.0, 0.0}, {12.0, 7.0}, {100.0, 40.0}};
        Rng a = make_rng(3, {1}), b = make_rng(3, {1});
        CHECK(correlated_field(pts, 10.0, a) == correlated_field(pts, 10.0, b));
        CHECK_THROWS(correlated_field(pts, 0.0, a));
    }
}
