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

#include "ntn/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace ntn
{
struct FieldOptions
{
    double spacing = 1.0 / 8.0;  // grid spacing in units of lambda
    double padding = 10.0;       // extra period length in units of lambda
    std::size_t max_cells = std::size_t{1} << 24;
};

// Zero-mean, unit-variance Gaussian field on a regular grid with covariance exp(-r/lambda).
// The grid sample is exact up to clipped negative eigenvalues of the circulant embedding; queries
// between nodes are interpolated bilinearly and rescaled to unit variance.
class GridField
{
  public:
    static GridField generate(const Eigen::Vector2d &lo, const Eigen::Vector2d &hi, double lambda, Rng &rng,
                              const FieldOptions &opt = {});

    double at(const Eigen::Vector2d &p) const;

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double spacing() const { return h_; }
    double lambda() const { return lambda_; }
    double value(std::size_t i, std::size_t j) const { return values_[i * ny_ + j]; }
    // Fraction of the spectral power removed by eigenvalue clipping
    double clipped_fraction() const { return clipped_; }

  private:
    Eigen::Vector2d origin_ = Eigen::Vector2d::Zero();
    double h_ = 1.0;
    double lambda_ = 1.0;
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<double> values_;
    double clipped_ = 0.0;
};

std::vector<double> correlated_field(std::span<const Eigen::Vector2d> positions, double lambda, Rng &rng,
                                     const FieldOptions &opt = {});
} // namespace ntn
