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

#include "ntn/constants.hpp"
#include "ntn/scenario.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ntn
{
enum class Lsp
{
    PL = 0,
    SF,
    KF,
    DS,
    ASA,
    ASD,
    ESA,
    ESD,
    XPR,
};
inline constexpr std::size_t n_lsp = 9;
inline constexpr std::array<Lsp, n_lsp> all_lsps = {Lsp::PL, Lsp::SF, Lsp::KF, Lsp::DS, Lsp::ASA,
                                                     Lsp::ASD, Lsp::ESA, Lsp::ESD, Lsp::XPR};

enum class Coeff
{
    mu = 0,
    eps,
    gam,
    alp,
    sig,
    del,
    bet,
};
inline constexpr std::size_t n_coeff = 7;
inline constexpr std::array<Coeff, n_coeff> all_coeffs = {Coeff::mu, Coeff::eps, Coeff::gam, Coeff::alp,
                                                          Coeff::sig, Coeff::del, Coeff::bet};

std::string_view to_string(Lsp l);
std::string_view to_string(Coeff c);
Lsp parse_lsp(std::string_view s);
Coeff parse_coeff(std::string_view s);

// Spreads are stored as log10(s) or log10(deg), the rest in dB
bool is_log_domain(Lsp l);

struct LspCoefficients
{
    double mu = 0.0, eps = 0.0, gam = 0.0, alp = 0.0;
    double sig = 0.0, del = 0.0, bet = 0.0;
    std::optional<double> lambda_m;

    double get(Coeff c) const;
    double &ref(Coeff c);
};

using CoeffMask = std::array<bool, n_coeff>;
inline constexpr CoeffMask mask_all = {true, true, true, true, true, true, true};
inline constexpr CoeffMask mask_none = {false, false, false, false, false, false, false};
inline bool has(const CoeffMask &m, Coeff c) { return m[static_cast<std::size_t>(c)]; }

struct LspEntry
{
    LspCoefficients c;
    CoeffMask modeled = mask_none; // coefficient is part of the model, not N/A or fixed at zero
};

struct ClusterParams
{
    std::optional<int> clusters;
    std::optional<double> r_ds;
    std::optional<double> cds_mu; // log10(ns)
    std::optional<double> cds_gam;
    std::optional<double> casa; // deg
    std::optional<double> cesa; // deg
};

struct StateParams
{
    std::map<Lsp, LspEntry> lsps;
    ClusterParams clusters;

    bool has(Lsp l) const { return lsps.count(l) != 0; }
    const LspEntry &at(Lsp l) const;
};

struct ParameterSet
{
    std::string name;
    Scenario scenario = Scenario::DenseUrban;
    std::array<StateParams, 2> states;

    const StateParams &state(LosState s) const { return states[static_cast<std::size_t>(s)]; }
    StateParams &state(LosState s) { return states[static_cast<std::size_t>(s)]; }
};

// Correlation order of the 7x7 matrices
inline constexpr std::array<Lsp, 7> corr_order = {Lsp::DS, Lsp::KF, Lsp::SF, Lsp::ASD,
                                                  Lsp::ASA, Lsp::ESD, Lsp::ESA};
std::optional<std::size_t> corr_index(Lsp l);

using CorrelationMatrix = Eigen::Matrix<double, 7, 7>;

class ParameterDatabase
{
  public:
    int version = 0;
    std::vector<ParameterSet> sets;
    std::map<std::pair<Scenario, LosState>, CorrelationMatrix> correlations;

    bool contains(std::string_view name) const;
    const ParameterSet &set(std::string_view name) const;
    const ParameterSet &base(Scenario s) const { return set(to_string(s)); }
    const CorrelationMatrix &correlation(Scenario s, LosState st) const;

    static ParameterDatabase from_json(const nlohmann::json &j);
    static ParameterDatabase load(const std::filesystem::path &file);
    static const ParameterDatabase &bundled();
    static const char *bundled_text();
};

// Linear model evaluation; d in m, f in GHz, alpha in rad
double eval_mean(const LspCoefficients &c, double d_m, double f_ghz, double alpha);
double eval_std_raw(const LspCoefficients &c, double f_ghz, double alpha);
double eval_std(const LspCoefficients &c, double f_ghz, double alpha); // clamped at 0

struct PsdRepair
{
    CorrelationMatrix matrix;
    bool clipped = false;
    double min_eigenvalue = 0.0;
};

// Negative eigenvalues are clipped to zero and the diagonal renormalized to one
PsdRepair repair_psd(const CorrelationMatrix &C);
CorrelationMatrix matrix_sqrt(const CorrelationMatrix &C);

struct LspSample
{
    std::size_t link_id = 0;
    LosState state = LosState::NLOS;
    std::array<double, n_lsp> v{}; // indexed by Lsp; KF is NaN without a LOS path
    double d_m = 1.0;
    double f_ghz = 1.0;
    double alpha = pi / 2;

    double operator[](Lsp l) const { return v[static_cast<std::size_t>(l)]; }
    double &operator[](Lsp l) { return v[static_cast<std::size_t>(l)]; }
};

// Draws LSP values for one link. field_normals are unit-variance values in corr_order, xpr_normal is
// independent of them.
class LspSampler
{
  public:
    LspSampler(const StateParams &params, LosState state, const CorrelationMatrix &corr);

    LspSample sample(double d_m, double f_ghz, double alpha, const std::array<double, 7> &field_normals,
                     double xpr_normal) const;

    const CorrelationMatrix &sqrt_corr() const { return sqrt_; }
    bool repaired() const { return repaired_; }

  private:
    const StateParams *params_;
    LosState state_;
    CorrelationMatrix sqrt_;
    bool repaired_ = false;
};

LspSample sample_lsps(const StateParams &params, LosState state, const CorrelationMatrix &corr, double d_m,
                      double f_ghz, double alpha, const std::array<double, 7> &field_normals, double xpr_normal);

nlohmann::json coefficients_to_json(const LspCoefficients &c);
} // namespace ntn
