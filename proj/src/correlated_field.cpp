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
#include "ntn/log.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace ntn
{
namespace
{
// FFTW planning is not thread safe
std::mutex &plan_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwFree
{
    void operator()(void *p) const { fftw_free(p); }
};

template <typename T>
std::unique_ptr<T[], FftwFree> fftw_array(std::size_t n)
{
    auto *p = static_cast<T *>(fftw_malloc(sizeof(T) * n));
    if (!p)
        throw std::bad_alloc();
    return std::unique_ptr<T[], FftwFree>(p);
}

// Smallest 2^a 3^b 5^c 7^d >= n
std::size_t fft_size(std::size_t n)
{
    for (std::size_t m = std::max<std::size_t>(n, 2);; ++m)
    {
        std::size_t k = m;
        for (std::size_t p : {2, 3, 5, 7})
            while (k % p == 0)
                k /= p;
        if (k == 1)
            return m;
    }
}

void r2c(std::size_t nx, std::size_t ny, double *in, fftw_complex *out)
{
    fftw_plan p;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        p = fftw_plan_dft_r2c_2d(static_cast<int>(nx), static_cast<int>(ny), in, out, FFTW_ESTIMATE);
    }
    fftw_execute(p);
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(p);
}

void c2r(std::size_t nx, std::size_t ny, fftw_complex *in, double *out)
{
    fftw_plan p;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        p = fftw_plan_dft_c2r_2d(static_cast<int>(nx), static_cast<int>(ny), in, out, FFTW_ESTIMATE);
    }
    fftw_execute(p);
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(p);
}
} // namespace

GridField GridField::generate(const Eigen::Vector2d &lo, const Eigen::Vector2d &hi, double lambda, Rng &rng,
                              const FieldOptions &opt)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("correlated_field: decorrelation distance must be positive");
    if (!(hi.x() >= lo.x()) || !(hi.y() >= lo.y()))
        throw std::invalid_argument("correlated_field: empty bounding box");

    GridField g;
    g.lambda_ = lambda;
    g.h_ = opt.spacing * lambda;
    g.origin_ = lo;
    g.nx_ = static_cast<std::size_t>(std::ceil((hi.x() - lo.x()) / g.h_)) + 2;
    g.ny_ = static_cast<std::size_t>(std::ceil((hi.y() - lo.y()) / g.h_)) + 2;

    const auto pad = static_cast<std::size_t>(std::ceil(opt.padding * lambda / g.h_));
    const std::size_t Nx = fft_size(g.nx_ + pad);
    const std::size_t Ny = fft_size(g.ny_ + pad);
    if (static_cast<double>(Nx) * static_cast<double>(Ny) > static_cast<double>(opt.max_cells))
        throw std::invalid_argument("correlated_field: region too large for the decorrelation distance (" +
                                    std::to_string(Nx) + " x " + std::to_string(Ny) + " grid)");

    const std::size_t Nyc = Ny / 2 + 1;
    const std::size_t N = Nx * Ny;
    auto cov = fftw_array<double>(N);
    auto spec = fftw_array<fftw_complex>(Nx * Nyc);
    auto noise = fftw_array<double>(N);
    auto nspec = fftw_array<fftw_complex>(Nx * Nyc);

    // First row of the block-circulant covariance (minimum-image distances)
    for (std::size_t i = 0; i < Nx; ++i)
    {
        const double dx = static_cast<double>(std::min(i, Nx - i)) * g.h_;
        for (std::size_t j = 0; j < Ny; ++j)
        {
            const double dy = static_cast<double>(std::min(j, Ny - j)) * g.h_;
            cov[i * Ny + j] = std::exp(-std::hypot(dx, dy) / lambda);
        }
    }
    r2c(Nx, Ny, cov.get(), spec.get());

    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::size_t k = 0; k < N; ++k)
        noise[k] = nd(rng);
    r2c(Nx, Ny, noise.get(), nspec.get());

    double total = 0.0, removed = 0.0;
    for (std::size_t k = 0; k < Nx * Nyc; ++k)
    {
        const double ev = spec[k][0];
        total += std::abs(ev);
        double s = 0.0;
        if (ev > 0.0)
            s = std::sqrt(ev);
        else
            removed += -ev;
        nspec[k][0] *= s;
        nspec[k][1] *= s;
    }
    g.clipped_ = total > 0.0 ? removed / total : 0.0;
    if (g.clipped_ > 1e-3)
        log::warn_once("field_clip", "correlated_field: circulant embedding clipped " +
                                         std::to_string(g.clipped_) + " of the spectrum");

    c2r(Nx, Ny, nspec.get(), noise.get());
    g.values_.resize(g.nx_ * g.ny_);
    const double scale = 1.0 / static_cast<double>(N);
    for (std::size_t i = 0; i < g.nx_; ++i)
        for (std::size_t j = 0; j < g.ny_; ++j)
            g.values_[i * g.ny_ + j] = noise[i * Ny + j] * scale;
    return g;
}

double GridField::at(const Eigen::Vector2d &p) const
{
    const double u = (p.x() - origin_.x()) / h_;
    const double v = (p.y() - origin_.y()) / h_;
    if (u < 0.0 || v < 0.0 || u > static_cast<double>(nx_ - 1) || v > static_cast<double>(ny_ - 1))
        throw std::out_of_range("GridField::at: position outside the generated region");
    const auto i = std::min(static_cast<std::size_t>(u), nx_ - 2);
    const auto j = std::min(static_cast<std::size_t>(v), ny_ - 2);
    const double fx = u - static_cast<double>(i);
    const double fy = v - static_cast<double>(j);

    const double w[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    const double z[4] = {value(i, j), value(i + 1, j), value(i, j + 1), value(i + 1, j + 1)};
    const double cx[4] = {0, 1, 0, 1};
    const double cy[4] = {0, 0, 1, 1};

    double val = 0.0, var = 0.0;
    for (int a = 0; a < 4; ++a)
    {
        val += w[a] * z[a];
        for (int b = 0; b < 4; ++b)
            var += w[a] * w[b] * std::exp(-h_ * std::hypot(cx[a] - cx[b], cy[a] - cy[b]) / lambda_);
    }
    return val / std::sqrt(var);
}

std::vector<double> correlated_field(std::span<const Eigen::Vector2d> positions, double lambda, Rng &rng,
                                     const FieldOptions &opt)
{
    if (positions.empty())
        return {};
    Eigen::Vector2d lo = positions[0], hi = positions[0];
    for (const auto &p : positions)
    {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const GridField g = GridField::generate(lo, hi, lambda, rng, opt);
    std::vector<double> out;
    out.reserve(positions.size());
    for (const auto &p : positions)
        out.push_back(g.at(p));
    return out;
}
} // namespace ntn
