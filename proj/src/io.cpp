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

#include "ntn/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ntn::io
{
using nlohmann::json;

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::filesystem::path &file, std::string_view text)
{
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw std::runtime_error("write failed for " + file.string());
}

json read_json(const std::filesystem::path &file)
{
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    try
    {
        return json::parse(in);
    }
    catch (const json::exception &e)
    {
        throw std::runtime_error(file.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path &file, const json &j)
{
    write_text(file, j.dump(1) + "\n");
}

namespace
{
void split(std::string_view line, std::vector<std::string_view> &out)
{
    out.clear();
    std::size_t start = 0;
    while (true)
    {
        const std::size_t p = line.find(',', start);
        if (p == std::string_view::npos)
        {
            out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, p - start));
        start = p + 1;
    }
}
} // namespace

void for_each_csv_row(const std::filesystem::path &file, const std::vector<std::string> &required,
                      const std::function<void(const std::vector<std::string_view> &,
                                               const std::vector<std::size_t> &)> &fn)
{
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(file.string() + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    std::vector<std::string_view> fields;
    split(line, fields);
    std::vector<std::size_t> cols;
    for (const auto &name : required)
    {
        std::size_t k = 0;
        while (k < fields.size() && fields[k] != name)
            ++k;
        if (k == fields.size())
            throw std::runtime_error(file.string() + ": missing column '" + name + "'");
        cols.push_back(k);
    }
    const std::size_t width = fields.size();
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        split(line, fields);
        if (fields.size() != width)
            throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": wrong field count");
        fn(fields, cols);
    }
}

double to_double(std::string_view s)
{
    const std::string tmp(s);
    char *end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size())
        throw std::runtime_error("not a number: '" + tmp + "'");
    return v;
}

std::size_t to_size(std::string_view s)
{
    std::size_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw std::runtime_error("not an index: '" + std::string(s) + "'");
    return v;
}

std::vector<Satellite> read_elements(const std::filesystem::path &file)
{
    const json j = read_json(file);
    if (!j.is_array())
        throw std::invalid_argument(file.string() + ": element file must be a JSON array");
    std::vector<Satellite> out;
    for (const auto &r : j)
    {
        Satellite s;
        try
        {
            s.name = r.at("name").get<std::string>();
            s.elements.a_km = r.at("a_km").get<double>();
            s.elements.e = r.at("e").get<double>();
            s.elements.inc = deg2rad(r.at("inc_deg").get<double>());
            s.elements.raan0 = wrap_positive(deg2rad(r.at("raan_deg").get<double>()));
            s.elements.argp0 = wrap_positive(deg2rad(r.at("argp_deg").get<double>()));
            s.elements.nu0 = wrap_positive(deg2rad(r.at("nu_deg").get<double>()));
            s.elements.epoch_s = r.value("epoch_s", 0.0);
            s.shell = r.value("shell", 0);
        }
        catch (const json::exception &e)
        {
            throw std::invalid_argument(file.string() + ": bad element record: " + e.what());
        }
        s.elements.validate();
        out.push_back(std::move(s));
    }
    return out;
}

json elements_to_json(const std::vector<Satellite> &sats)
{
    json j = json::array();
    for (const auto &s : sats)
    {
        json r;
        r["name"] = s.name;
        r["a_km"] = s.elements.a_km;
        r["e"] = s.elements.e;
        r["inc_deg"] = rad2deg(s.elements.inc);
        r["raan_deg"] = rad2deg(s.elements.raan0);
        r["argp_deg"] = rad2deg(s.elements.argp0);
        r["nu_deg"] = rad2deg(s.elements.nu0);
        r["epoch_s"] = s.elements.epoch_s;
        r["shell"] = s.shell;
        j.push_back(r);
    }
    return j;
}

json database_to_json(const ParameterDatabase &db)
{
    json j;
    j["format"] = "ntn-gscm-parameters";
    j["version"] = 1;
    struct Col
    {
        const ParameterSet *set;
        LosState st;
    };
    std::vector<Col> cols;
    json jc = json::array();
    for (const auto &s : db.sets)
        for (LosState st : all_states)
        {
            cols.push_back({&s, st});
            jc.push_back({{"set", s.name}, {"scenario", std::string(to_string(s.scenario))},
                          {"state", std::string(to_string(st))}});
        }
    j["columns"] = jc;

    json rows = json::array();
    auto add_cluster_row = [&](const char *lsp, const char *coeff, const char *unit, auto getter) {
        json vals = json::array();
        bool any = false;
        for (const auto &c : cols)
        {
            const auto v = getter(c.set->state(c.st).clusters);
            if (v)
            {
                vals.push_back(*v);
                any = true;
            }
            else
                vals.push_back(nullptr);
        }
        if (any)
            rows.push_back({{"lsp", lsp}, {"coeff", coeff}, {"unit", unit}, {"values", vals}});
    };
    add_cluster_row("meta", "clusters", "-", [](const ClusterParams &c) { return c.clusters; });

    for (Lsp l : all_lsps)
    {
        const char *unit = is_log_domain(l) ? (l == Lsp::DS ? "log10(s)" : "log10(deg)") : "dB";
        for (Coeff k : all_coeffs)
        {
            json vals = json::array(), fixed = json::array();
            bool any = false;
            for (std::size_t i = 0; i < cols.size(); ++i)
            {
                const StateParams &sp = cols[i].set->state(cols[i].st);
                if (!sp.has(l))
                {
                    vals.push_back(nullptr);
                    continue;
                }
                const LspEntry &e = sp.at(l);
                if (has(e.modeled, k))
                {
                    vals.push_back(e.c.get(k));
                    any = true;
                }
                else
                {
                    vals.push_back(0.0);
                    fixed.push_back(i);
                }
            }
            if (!any)
                continue;
            json r = {{"lsp", std::string(to_string(l))}, {"coeff", std::string(to_string(k))}, {"unit", unit},
                      {"values", vals}};
            if (!fixed.empty())
                r["fixed_zero"] = fixed;
            rows.push_back(r);
        }
        if (l == Lsp::DS)
        {
            add_cluster_row("DS", "r_ds", "-", [](const ClusterParams &c) { return c.r_ds; });
            add_cluster_row("DS", "cds_mu", "log10(ns)", [](const ClusterParams &c) { return c.cds_mu; });
            add_cluster_row("DS", "cds_gam", "log10(ns)", [](const ClusterParams &c) { return c.cds_gam; });
        }
        if (l == Lsp::ASA)
            add_cluster_row("ASA", "c_cluster", "deg", [](const ClusterParams &c) { return c.casa; });
        if (l == Lsp::ESA)
            add_cluster_row("ESA", "c_cluster", "deg", [](const ClusterParams &c) { return c.cesa; });

        json lam = json::array();
        bool any = false;
        for (const auto &c : cols)
        {
            const StateParams &sp = c.set->state(c.st);
            if (sp.has(l) && sp.at(l).c.lambda_m)
            {
                lam.push_back(*sp.at(l).c.lambda_m);
                any = true;
            }
            else
                lam.push_back(nullptr);
        }
        if (any)
            rows.push_back({{"lsp", std::string(to_string(l))}, {"coeff", "lambda"}, {"unit", "m"}, {"values", lam}});
    }
    j["coefficients"] = rows;

    json corr;
    json order = json::array();
    for (Lsp l : corr_order)
        order.push_back(std::string(to_string(l)));
    corr["order"] = order;
    corr["layout"] = "upper triangle LOS, lower triangle NLOS";
    json crow = json::array();
    for (std::size_t r = 0; r < 7; ++r)
        for (Scenario sc : all_scenarios)
        {
            if (!db.correlations.count({sc, LosState::LOS}))
                continue;
            const auto &L = db.correlation(sc, LosState::LOS);
            const auto &N = db.correlation(sc, LosState::NLOS);
            json vals = json::array();
            for (std::size_t c = 0; c < 7; ++c)
            {
                const auto ri = static_cast<Eigen::Index>(r), ci = static_cast<Eigen::Index>(c);
                vals.push_back(c == r ? 1.0 : (c > r ? L(ri, ci) : N(ri, ci)));
            }
            crow.push_back({{"row", std::string(to_string(corr_order[r]))},
                            {"scenario", std::string(to_string(sc))},
                            {"values", vals}});
        }
    corr["rows"] = crow;
    j["correlations"] = corr;
    return j;
}

std::string track_csv(const std::vector<TrackPoint> &track)
{
    std::string s = "t_s,lat_deg,lon_deg,radius_km,x_i_km,y_i_km,z_i_km\n";
    for (const auto &p : track)
    {
        s += num(p.t) + "," + num(rad2deg(p.geo.lat)) + "," + num(rad2deg(p.geo.lon)) + "," + num(p.geo.radius_km) +
             "," + num(p.inertial.x_km) + "," + num(p.inertial.y_km) + "," + num(p.inertial.z_km) + "\n";
    }
    return s;
}

std::string pass_csv(const std::vector<LinkSample> &links)
{
    std::string s = "t_s,x_q_km,y_q_km,z_q_km,elev_deg,bank_deg,heading_deg,tilt_deg\n";
    for (const auto &l : links)
    {
        s += num(l.t_s) + "," + num(l.mt.q_km.x()) + "," + num(l.mt.q_km.y()) + "," + num(l.mt.q_km.z()) + "," +
             num(rad2deg(l.mt.alpha)) + "," + num(rad2deg(l.mt.beta)) + "," + num(rad2deg(l.mt.gamma)) + "," +
             num(rad2deg(l.mt.delta)) + "\n";
    }
    return s;
}
} // namespace ntn::io
