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

#include "ntn/environment.hpp"
#include "ntn/lsp.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ntn
{
enum class AngleKind
{
    aoa_az,
    aod_az,
    aoa_el,
    aod_el,
};

double rms_delay_spread(const PathSet &ps); // s

// Power-weighted RMS of wrapped deviations from the circular mean [rad]
double angular_spread(std::span<const double> angles, std::span<const double> powers);
double angular_spread(const PathSet &ps, AngleKind which); // deg
double k_factor(const PathSet &ps);                        // dB

// Floors keep the log-domain LSPs finite for degenerate path sets
inline constexpr double ds_floor_s = 1e-12;
inline constexpr double as_floor_deg = 1e-9;

// Extracts PL, KF, DS, the four angular spreads and XPR. SF is left NaN, it is assigned once the
// path-loss mean is fitted.
LspSample extract_link(const PathSet &ps, LosState state, std::size_t link_id = 0);
std::vector<LspSample> extract_all(std::span<const PathSet> sets, LosState state);

struct Range
{
    double min = 0.0, max = 0.0;
};

struct FitResult
{
    Lsp lsp = Lsp::DS;
    LspCoefficients coeffs;
    CoeffMask fitted = mask_none;
    std::vector<Coeff> degenerate; // requested but dropped for lack of covariate spread
    double residual_rms = 0.0;
    double std_residual_rms = 0.0;
    std::size_t n = 0;
    Range d_m, f_ghz, alpha;
};

// Ordinary least squares for the mean part, then least squares of |residual|*sqrt(pi/2) for the
// STD part. Coefficients outside the mask are held at zero.
FitResult fit_multilinear(std::span<const LspSample> samples, Lsp lsp, const CoeffMask &mask = mask_all);

// Sets sample.sf to the residual of PL around the fitted mean
void assign_shadow_fading(std::span<LspSample> samples, const FitResult &pl_fit);

// Fit mask for an LSP taken from a reference entry; PL also carries the SF STD terms.
CoeffMask fit_mask(const StateParams &ref, Lsp lsp);

struct SetFit
{
    ParameterSet params;
    std::vector<std::pair<LosState, FitResult>> results;
};

// Fits every LSP present in the reference set. Decorrelation distances and cluster settings are
// copied from the reference. Samples are modified in place (SF).
SetFit fit_parameter_set(std::span<LspSample> los, std::span<LspSample> nlos, const ParameterSet &reference,
                         const std::string &name);

struct Covariates
{
    std::size_t link_id = 0;
    double d_m = 0.0;
    double f_ghz = 0.0;
    double alpha = 0.0;
};

struct ResimOptions
{
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

struct ResimStats
{
    std::size_t links = 0;
    std::size_t angle_saturated = 0; // drawn spread above the attainable maximum
};

// Synthetic cluster path set for one drawn LSP realisation
PathSet synth_paths(const LspSample &drawn, const ClusterParams &cp, LosState state, Rng &rng,
                    ResimStats *stats = nullptr);

// Draws LSPs from a fitted set, synthesises cluster path sets and extracts them again
std::vector<LspSample> resimulate(const ParameterSet &fitted, LosState state, const CorrelationMatrix &corr,
                                  std::span<const Covariates> links, const ResimOptions &opt,
                                  std::vector<LspSample> *drawn = nullptr, ResimStats *stats = nullptr);

struct Tolerances
{
    double db = 1.5;
    double dex = 0.15;
    double for_lsp(Lsp l) const { return is_log_domain(l) ? dex : db; }
};

struct ComparisonRow
{
    std::string scenario;
    LosState state = LosState::LOS;
    Lsp lsp = Lsp::PL;
    Coeff coeff = Coeff::mu;
    double fitted = 0.0;
    double reference = 0.0;
    double delta = 0.0;
    bool pass = true;
    bool gated = false;
};

struct ComparisonReport
{
    std::vector<ComparisonRow> rows;
    std::vector<std::string> missing;

    std::size_t failures(bool gated_only = false) const;
    std::string to_csv() const;
    std::string to_table() const;
};

// Gate keys look like "DS.mu"
ComparisonReport compare(const ParameterSet &fitted, const ParameterSet &reference, const Tolerances &tol,
                         const std::vector<std::string> &gate = {});
} // namespace ntn
