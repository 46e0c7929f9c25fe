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

#include "ntn/lsp.hpp"
#include "ntn/log.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ntn
{
namespace detail
{
extern const char *const bundled_params_json;
}

using nlohmann::json;

std::string_view to_string(Lsp l)
{
    static constexpr std::array<std::string_view, n_lsp> names = {"PL", "SF", "KF", "DS", "ASA",
                                                                   "ASD", "ESA", "ESD", "XPR"};
    return names[static_cast<std::size_t>(l)];
}

std::string_view to_string(Coeff c)
{
    static constexpr std::array<std::string_view, n_coeff> names = {"mu", "eps", "gam", "alp",
                                                                     "sig", "del", "bet"};
    return names[static_cast<std::size_t>(c)];
}

Lsp parse_lsp(std::string_view s)
{
    for (Lsp l : all_lsps)
        if (to_string(l) == s)
            return l;
    throw std::invalid_argument("unknown LSP '" + std::string(s) + "'");
}

Coeff parse_coeff(std::string_view s)
{
    for (Coeff c : all_coeffs)
        if (to_string(c) == s)
            return c;
    throw std::invalid_argument("unknown coefficient '" + std::string(s) + "'");
}

bool is_log_domain(Lsp l)
{
    return l == Lsp::DS || l == Lsp::ASA || l == Lsp::ASD || l == Lsp::ESA || l == Lsp::ESD;
}

double LspCoefficients::get(Coeff c) const
{
    return const_cast<LspCoefficients *>(this)->ref(c);
}

double &LspCoefficients::ref(Coeff c)
{
    switch (c)
    {
    case Coeff::mu: return mu;
    case Coeff::eps: return eps;
    case Coeff::gam: return gam;
    case Coeff::alp: return alp;
    case Coeff::sig: return sig;
    case Coeff::del: return del;
    case Coeff::bet: return bet;
    }
    throw std::logic_error("bad coefficient");
}

const LspEntry &StateParams::at(Lsp l) const
{
    auto it = lsps.find(l);
    if (it == lsps.end())
        throw std::out_of_range("no coefficients for LSP " + std::string(to_string(l)));
    return it->second;
}

std::optional<std::size_t> corr_index(Lsp l)
{
    for (std::size_t i = 0; i < corr_order.size(); ++i)
        if (corr_order[i] == l)
            return i;
    return std::nullopt;
}

// --- Model evaluation ---

namespace
{
void check_covariates(double f_ghz, double alpha)
{
    if (!(f_ghz > 0.0))
        throw std::invalid_argument("LSP model: frequency must be positive");
    if (!(alpha > 0.0) || alpha > pi / 2 + 1e-12)
        throw std::invalid_argument("LSP model: elevation must be in (0, pi/2]");
}
} // namespace

double eval_mean(const LspCoefficients &c, double d_m, double f_ghz, double alpha)
{
    if (!(d_m > 0.0))
        throw std::invalid_argument("LSP model: distance must be positive");
    check_covariates(f_ghz, alpha);
    return c.mu + c.eps * std::log10(d_m) + c.gam * std::log10(f_ghz) + c.alp * std::log10(alpha);
}

double eval_std_raw(const LspCoefficients &c, double f_ghz, double alpha)
{
    check_covariates(f_ghz, alpha);
    return c.sig + c.del * std::log10(f_ghz) + c.bet * std::log10(alpha);
}

double eval_std(const LspCoefficients &c, double f_ghz, double alpha)
{
    const double s = eval_std_raw(c, f_ghz, alpha);
    if (s < 0.0)
    {
        log::warn_once("eval_std_clamp", "LSP model: negative STD clamped to zero");
        return 0.0;
    }
    return s;
}

// --- Correlation matrices ---

PsdRepair repair_psd(const CorrelationMatrix &C)
{
    Eigen::SelfAdjointEigenSolver<CorrelationMatrix> es(0.5 * (C + C.transpose()));
    PsdRepair r;
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    if (r.min_eigenvalue >= 0.0)
    {
        r.matrix = 0.5 * (C + C.transpose());
        return r;
    }
    r.clipped = true;
    const Eigen::Matrix<double, 7, 1> ev = es.eigenvalues().cwiseMax(0.0);
    CorrelationMatrix M = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    const Eigen::Matrix<double, 7, 1> d = M.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    M = d.asDiagonal() * M * d.asDiagonal();
    r.matrix = 0.5 * (M + M.transpose());
    log::warn_once("psd_clip", "correlation matrix is not positive semi-definite, eigenvalues clipped");
    return r;
}

CorrelationMatrix matrix_sqrt(const CorrelationMatrix &C)
{
    Eigen::SelfAdjointEigenSolver<CorrelationMatrix> es(C);
    const Eigen::Matrix<double, 7, 1> ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// --- Sampling ---

LspSampler::LspSampler(const StateParams &params, LosState state, const CorrelationMatrix &corr)
    : params_(&params), state_(state)
{
    const PsdRepair r = repair_psd(corr);
    repaired_ = r.clipped;
    sqrt_ = matrix_sqrt(r.matrix);
}

LspSample LspSampler::sample(double d_m, double f_ghz, double alpha, const std::array<double, 7> &field_normals,
                             double xpr_normal) const
{
    Eigen::Matrix<double, 7, 1> w;
    for (std::size_t i = 0; i < 7; ++i)
        w[static_cast<Eigen::Index>(i)] = field_normals[i];
    const Eigen::Matrix<double, 7, 1> X = sqrt_ * w;

    LspSample s;
    s.state = state_;
    s.d_m = d_m;
    s.f_ghz = f_ghz;
    s.alpha = alpha;
    s.v.fill(std::numeric_limits<double>::quiet_NaN());

    const StateParams &P = *params_;
    for (Lsp l : corr_order)
    {
        if (!P.has(l))
            continue;
        const auto &c = P.at(l).c;
        const double x = X[static_cast<Eigen::Index>(*corr_index(l))];
        s[l] = eval_mean(c, d_m, f_ghz, alpha) + eval_std(c, f_ghz, alpha) * x;
    }
    if (P.has(Lsp::PL))
    {
        const double sf = std::isnan(s[Lsp::SF]) ? 0.0 : s[Lsp::SF];
        s[Lsp::PL] = eval_mean(P.at(Lsp::PL).c, d_m, f_ghz, alpha) + sf;
    }
    if (P.has(Lsp::XPR))
    {
        const auto &c = P.at(Lsp::XPR).c;
        s[Lsp::XPR] = eval_mean(c, d_m, f_ghz, alpha) + eval_std(c, f_ghz, alpha) * xpr_normal;
    }
    if (state_ == LosState::NLOS)
        s[Lsp::KF] = std::numeric_limits<double>::quiet_NaN();
    return s;
}

LspSample sample_lsps(const StateParams &params, LosState state, const CorrelationMatrix &corr, double d_m,
                      double f_ghz, double alpha, const std::array<double, 7> &field_normals, double xpr_normal)
{
    return LspSampler(params, state, corr).sample(d_m, f_ghz, alpha, field_normals, xpr_normal);
}

json coefficients_to_json(const LspCoefficients &c)
{
    json j;
    for (Coeff k : all_coeffs)
        j[std::string(to_string(k))] = c.get(k);
    j["lambda"] = c.lambda_m ? json(*c.lambda_m) : json(nullptr);
    return j;
}

// --- Database loading ---

namespace
{
struct ColumnRef
{
    std::string set;
    Scenario scenario;
    LosState state;
};

ParameterSet &find_or_add(std::vector<ParameterSet> &sets, const std::string &name, Scenario sc)
{
    for (auto &s : sets)
        if (s.name == name)
        {
            if (s.scenario != sc)
                throw std::invalid_argument("parameter set '" + name + "' mapped to two scenarios");
            return s;
        }
    ParameterSet p;
    p.name = name;
    p.scenario = sc;
    sets.push_back(std::move(p));
    return sets.back();
}

void set_cluster_value(ClusterParams &cp, const std::string &lsp, const std::string &coeff, double v)
{
    if (lsp == "meta" && coeff == "clusters")
        cp.clusters = static_cast<int>(std::lround(v));
    else if (lsp == "DS" && coeff == "r_ds")
        cp.r_ds = v;
    else if (lsp == "DS" && coeff == "cds_mu")
        cp.cds_mu = v;
    else if (lsp == "DS" && coeff == "cds_gam")
        cp.cds_gam = v;
    else if (lsp == "ASA" && coeff == "c_cluster")
        cp.casa = v;
    else if (lsp == "ESA" && coeff == "c_cluster")
        cp.cesa = v;
    else
        throw std::invalid_argument("unknown parameter row " + lsp + "." + coeff);
}
} // namespace

ParameterDatabase ParameterDatabase::from_json(const json &j)
{
    ParameterDatabase db;
    if (j.value("format", std::string()) != "ntn-gscm-parameters")
        throw std::invalid_argument("parameter file: unexpected format tag");
    db.version = j.at("version").get<int>();
    if (db.version != 1)
        throw std::invalid_argument("parameter file: unsupported version " + std::to_string(db.version));

    std::vector<ColumnRef> cols;
    for (const auto &c : j.at("columns"))
    {
        ColumnRef r{c.at("set").get<std::string>(), parse_scenario(c.at("scenario").get<std::string>()),
                    parse_state(c.at("state").get<std::string>())};
        find_or_add(db.sets, r.set, r.scenario);
        cols.push_back(std::move(r));
    }

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto &row : j.at("coefficients"))
    {
        const auto lsp = row.at("lsp").get<std::string>();
        const auto coeff = row.at("coeff").get<std::string>();
        if (!seen.emplace(lsp, coeff).second)
            throw std::invalid_argument("parameter file: duplicate row " + lsp + "." + coeff);
        const auto &vals = row.at("values");
        if (vals.size() != cols.size())
            throw std::invalid_argument("parameter file: row " + lsp + "." + coeff + " has wrong length");
        std::set<std::size_t> fixed;
        if (row.contains("fixed_zero"))
            for (const auto &k : row.at("fixed_zero"))
                fixed.insert(k.get<std::size_t>());

        for (std::size_t i = 0; i < cols.size(); ++i)
        {
            if (vals[i].is_null())
                continue;
            const double v = vals[i].get<double>();
            ParameterSet &ps = find_or_add(db.sets, cols[i].set, cols[i].scenario);
            StateParams &st = ps.state(cols[i].state);

            const bool is_model_coeff = (coeff == "mu" || coeff == "eps" || coeff == "gam" || coeff == "alp" ||
                                         coeff == "sig" || coeff == "del" || coeff == "bet");
            if (is_model_coeff)
            {
                const Lsp l = parse_lsp(lsp);
                const Coeff k = parse_coeff(coeff);
                LspEntry &e = st.lsps[l];
                e.c.ref(k) = fixed.count(i) ? 0.0 : v;
                e.modeled[static_cast<std::size_t>(k)] = fixed.count(i) == 0;
            }
            else if (coeff == "lambda")
            {
                if (!(v > 0.0))
                    throw std::invalid_argument("parameter file: decorrelation distance must be positive");
                st.lsps[parse_lsp(lsp)].c.lambda_m = v;
            }
            else
                set_cluster_value(st.clusters, lsp, coeff, v);
        }
    }

    for (auto &ps : db.sets)
        for (LosState s : all_states)
            for (auto &[l, e] : ps.state(s).lsps)
                if (e.c.sig < 0.0)
                    throw std::invalid_argument("parameter file: negative reference STD for " +
                                                std::string(to_string(l)));

    // Decorrelation distances missing in derived sets fall back to the base scenario
    for (auto &ps : db.sets)
    {
        const ParameterSet *base = nullptr;
        for (const auto &b : db.sets)
            if (b.name == to_string(ps.scenario))
                base = &b;
        if (!base || base == &ps)
            continue;
        for (LosState s : all_states)
            for (auto &[l, e] : ps.state(s).lsps)
                if (!e.c.lambda_m && base->state(s).has(l) && base->state(s).at(l).c.lambda_m)
                {
                    e.c.lambda_m = base->state(s).at(l).c.lambda_m;
                    log::warn_once("lambda_fallback:" + ps.name,
                                   "parameter set '" + ps.name +
                                       "': missing decorrelation distances taken from base scenario");
                }
    }

    // Correlations: upper triangle LOS, lower triangle NLOS
    const auto &cj = j.at("correlations");
    std::vector<Lsp> order;
    for (const auto &o : cj.at("order"))
        order.push_back(parse_lsp(o.get<std::string>()));
    if (order.size() != 7)
        throw std::invalid_argument("parameter file: correlation order must list 7 LSPs");
    for (std::size_t i = 0; i < 7; ++i)
        if (order[i] != corr_order[i])
            throw std::invalid_argument("parameter file: unsupported correlation order");

    for (Scenario sc : all_scenarios)
        for (LosState st : all_states)
            db.correlations[{sc, st}] = CorrelationMatrix::Identity();
    for (const auto &row : cj.at("rows"))
    {
        const Lsp l = parse_lsp(row.at("row").get<std::string>());
        const Scenario sc = parse_scenario(row.at("scenario").get<std::string>());
        const std::size_t r = *corr_index(l);
        const auto &vals = row.at("values");
        if (vals.size() != 7)
            throw std::invalid_argument("parameter file: correlation row must have 7 values");
        for (std::size_t c = 0; c < 7; ++c)
        {
            if (c == r)
                continue;
            const double v = vals[c].is_null() ? 0.0 : vals[c].get<double>();
            if (std::abs(v) > 1.0)
                throw std::invalid_argument("parameter file: correlation outside [-1, 1]");
            const LosState st = (c > r) ? LosState::LOS : LosState::NLOS;
            auto &M = db.correlations[{sc, st}];
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
            M(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
        }
    }
    return db;
}

ParameterDatabase ParameterDatabase::load(const std::filesystem::path &file)
{
    std::ifstream in(file);
    if (!in)
        throw std::invalid_argument("cannot open parameter file " + file.string());
    json j;
    try
    {
        in >> j;
    }
    catch (const json::exception &e)
    {
        throw std::invalid_argument("parameter file " + file.string() + ": " + e.what());
    }
    return from_json(j);
}

const char *ParameterDatabase::bundled_text()
{
    return detail::bundled_params_json;
}

const ParameterDatabase &ParameterDatabase::bundled()
{
    static const ParameterDatabase db = from_json(json::parse(detail::bundled_params_json));
    return db;
}

bool ParameterDatabase::contains(std::string_view name) const
{
    for (const auto &s : sets)
        if (s.name == name)
            return true;
    return false;
}

const ParameterSet &ParameterDatabase::set(std::string_view name) const
{
    for (const auto &s : sets)
        if (s.name == name)
            return s;
    throw std::invalid_argument("no parameter set named '" + std::string(name) + "'");
}

const CorrelationMatrix &ParameterDatabase::correlation(Scenario s, LosState st) const
{
    return correlations.at({s, st});
}
} // namespace ntn
