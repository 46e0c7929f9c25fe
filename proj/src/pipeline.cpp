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

#include "ntn/pipeline.hpp"
#include "ntn/environment.hpp"
#include "ntn/io.hpp"
#include "ntn/log.hpp"
#include "ntn/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace ntn
{
using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Stage s)
{
    static constexpr std::array<std::string_view, 7> names = {"propagate", "links",      "environment", "extract",
                                                              "fit",       "resimulate", "compare"};
    return names[static_cast<std::size_t>(s)];
}

Stage parse_stage(std::string_view s)
{
    for (Stage st : all_stages)
        if (to_string(st) == s)
            return st;
    throw ConfigError("unknown stage '" + std::string(s) + "'");
}

// --- Configuration ---

RunConfig RunConfig::defaults()
{
    RunConfig c;
    c.shells = {{60, 6, 1, 550.0, deg2rad(53.0)}, {60, 6, 1, 2000.0, deg2rad(61.0)}, {60, 6, 1, 20200.0, deg2rad(63.0)}};
    c.scenarios = {all_scenarios.begin(), all_scenarios.end()};
    c.frequencies_ghz = {2.0, 20.0};
    c.stages = {all_stages.begin(), all_stages.end()};
    return c;
}

namespace
{
void check_keys(const json &j, const std::string &where, std::initializer_list<const char *> allowed)
{
    if (!j.is_object())
        throw ConfigError(where + " must be an object");
    for (const auto &[k, v] : j.items())
    {
        bool ok = false;
        for (const char *a : allowed)
            ok = ok || k == a;
        if (!ok)
            throw ConfigError("unknown config key '" + where + (where.empty() ? "" : ".") + k + "'");
    }
}

WalkerSpec walker_from_json(const json &w)
{
    check_keys(w, "walker", {"total", "planes", "phasing", "altitude_km", "inc_deg"});
    WalkerSpec s;
    s.total_sats = w.value("total", s.total_sats);
    s.planes = w.value("planes", s.planes);
    s.phasing = w.value("phasing", s.phasing);
    s.altitude_km = w.at("altitude_km").get<double>();
    s.inc = deg2rad(w.at("inc_deg").get<double>());
    return s;
}
} // namespace

RunConfig RunConfig::from_json(const json &j)
{
    RunConfig c = defaults();
    try
    {
        check_keys(j, "", {"seed", "walker", "shells", "elements_file", "terminals", "links", "tracks", "scenarios",
                           "frequencies_ghz", "output_dir", "params_file", "stages", "jobs", "emit_plotdata",
                           "compare"});
        c.seed = j.value("seed", c.seed);
        for (const char *key : {"walker", "shells"})
        {
            if (!j.contains(key))
                continue;
            const json &w = j.at(key);
            c.shells.clear();
            if (w.is_array())
                for (const auto &x : w)
                    c.shells.push_back(walker_from_json(x));
            else
                c.shells.push_back(walker_from_json(w));
        }
        c.elements_file = j.value("elements_file", c.elements_file);
        if (j.contains("terminals"))
        {
            const json &t = j.at("terminals");
            check_keys(t, "terminals", {"count", "lat_limit_deg", "seed"});
            c.terminal_count = t.value("count", c.terminal_count);
            c.lat_limit_deg = t.value("lat_limit_deg", c.lat_limit_deg);
            if (t.contains("seed") && !t.at("seed").is_null())
                c.terminal_seed = t.at("seed").get<std::uint64_t>();
        }
        if (j.contains("links"))
        {
            const json &l = j.at("links");
            check_keys(l, "links", {"min_elev_deg", "t_start_s", "t_end_s", "t_step_s", "max_links"});
            c.min_elev_deg = l.value("min_elev_deg", c.min_elev_deg);
            c.t_start_s = l.value("t_start_s", c.t_start_s);
            c.t_end_s = l.value("t_end_s", c.t_end_s);
            c.t_step_s = l.value("t_step_s", c.t_step_s);
            c.max_links = l.value("max_links", c.max_links);
        }
        if (j.contains("tracks"))
        {
            const json &t = j.at("tracks");
            check_keys(t, "tracks", {"enabled", "t_step_s"});
            c.write_tracks = t.value("enabled", c.write_tracks);
            c.track_step_s = t.value("t_step_s", c.track_step_s);
        }
        if (j.contains("scenarios"))
        {
            c.scenarios.clear();
            for (const auto &s : j.at("scenarios"))
                c.scenarios.push_back(parse_scenario(s.get<std::string>()));
        }
        if (j.contains("frequencies_ghz"))
            c.frequencies_ghz = j.at("frequencies_ghz").get<std::vector<double>>();
        c.output_dir = j.value("output_dir", c.output_dir.string());
        c.params_file = j.value("params_file", c.params_file);
        if (j.contains("stages"))
        {
            c.stages.clear();
            for (const auto &s : j.at("stages"))
                c.stages.push_back(parse_stage(s.get<std::string>()));
        }
        c.jobs = j.value("jobs", c.jobs);
        c.emit_plotdata = j.value("emit_plotdata", c.emit_plotdata);
        if (j.contains("compare"))
        {
            const json &k = j.at("compare");
            check_keys(k, "compare", {"tol_db", "tol_dex", "gate", "closure_gate"});
            c.tolerances.db = k.value("tol_db", c.tolerances.db);
            c.tolerances.dex = k.value("tol_dex", c.tolerances.dex);
            if (k.contains("gate"))
                c.gate = k.at("gate").get<std::vector<std::string>>();
            if (k.contains("closure_gate"))
                c.closure_gate = k.at("closure_gate").get<std::vector<std::string>>();
        }
    }
    catch (const json::exception &e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

json RunConfig::to_json() const
{
    // Execution settings (jobs, output_dir) are left out so the echo does not depend on them
    json j;
    j["seed"] = seed;
    json w = json::array();
    for (const auto &s : shells)
        w.push_back({{"total", s.total_sats},
                     {"planes", s.planes},
                     {"phasing", s.phasing},
                     {"altitude_km", s.altitude_km},
                     {"inc_deg", rad2deg(s.inc)}});
    j["walker"] = w;
    j["elements_file"] = elements_file;
    j["terminals"] = {{"count", terminal_count},
                      {"lat_limit_deg", lat_limit_deg},
                      {"seed", terminal_seed ? json(*terminal_seed) : json(seed)}};
    j["links"] = {{"min_elev_deg", min_elev_deg},
                  {"t_start_s", t_start_s},
                  {"t_end_s", t_end_s},
                  {"t_step_s", t_step_s},
                  {"max_links", max_links}};
    j["tracks"] = {{"enabled", write_tracks}, {"t_step_s", track_step_s}};
    json sc = json::array();
    for (Scenario s : scenarios)
        sc.push_back(std::string(to_string(s)));
    j["scenarios"] = sc;
    j["frequencies_ghz"] = frequencies_ghz;
    j["params_file"] = params_file;
    json st = json::array();
    for (Stage s : stages)
        st.push_back(std::string(to_string(s)));
    j["stages"] = st;
    j["emit_plotdata"] = emit_plotdata;
    j["compare"] = {{"tol_db", tolerances.db},
                    {"tol_dex", tolerances.dex},
                    {"gate", gate},
                    {"closure_gate", closure_gate}};
    return j;
}

void RunConfig::validate() const
{
    if (elements_file.empty())
    {
        if (shells.empty())
            throw ConfigError("config: no Walker shells and no elements file");
        for (const auto &s : shells)
        {
            try
            {
                s.validate();
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(std::string("config: ") + e.what());
            }
        }
    }
    if (terminal_count == 0)
        throw ConfigError("config: terminals.count must be positive");
    if (!(lat_limit_deg > 0.0 && lat_limit_deg <= 90.0))
        throw ConfigError("config: terminals.lat_limit_deg must be in (0, 90]");
    if (!(min_elev_deg >= 0.0 && min_elev_deg < 90.0))
        throw ConfigError("config: links.min_elev_deg must be in [0, 90)");
    if (!(t_step_s > 0.0) || !(t_end_s > t_start_s))
        throw ConfigError("config: time grid needs t_step_s > 0 and t_end_s > t_start_s");
    if (write_tracks && !(track_step_s > 0.0))
        throw ConfigError("config: tracks.t_step_s must be positive");
    if (scenarios.empty())
        throw ConfigError("config: no scenarios");
    if (std::set<Scenario>(scenarios.begin(), scenarios.end()).size() != scenarios.size())
        throw ConfigError("config: duplicate scenario");
    if (frequencies_ghz.empty())
        throw ConfigError("config: no frequencies");
    for (double f : frequencies_ghz)
    {
        if (!(f > 0.0) || !std::isfinite(f))
            throw ConfigError("config: frequencies must be positive");
        if (f < 2.0 || f > 40.0)
            log::warn_once("freq_range", "frequency " + io::num(f) +
                                             " GHz is outside the 2-40 GHz range the parameters cover");
    }
    if (std::set<double>(frequencies_ghz.begin(), frequencies_ghz.end()).size() != frequencies_ghz.size())
        throw ConfigError("config: duplicate frequency");
    if (!(tolerances.db > 0.0) || !(tolerances.dex > 0.0))
        throw ConfigError("config: tolerances must be positive");
    for (const auto *g : {&gate, &closure_gate})
        for (const auto &key : *g)
        {
            const auto dot = key.find('.');
            try
            {
                if (dot == std::string::npos)
                    throw std::invalid_argument("missing '.'");
                parse_lsp(key.substr(0, dot));
                parse_coeff(key.substr(dot + 1));
            }
            catch (const std::invalid_argument &)
            {
                throw ConfigError("config: bad gate key '" + key + "', expected e.g. DS.mu");
            }
        }
}

unsigned RunConfig::effective_jobs() const
{
    return jobs == 0 ? default_jobs() : jobs;
}

const ParameterDatabase &RunConfig::reference() const
{
    if (params_file.empty())
        return ParameterDatabase::bundled();
    if (!db_)
    {
        try
        {
            db_ = std::make_shared<ParameterDatabase>(ParameterDatabase::load(params_file));
        }
        catch (const std::exception &e)
        {
            throw ConfigError(e.what());
        }
    }
    return *db_;
}

// --- Shared helpers ---

double link_distance_m(const Eigen::Vector3d &q_km)
{
    return (q_km * 1000.0 - Eigen::Vector3d(0.0, 0.0, terminal_height_m)).norm();
}

namespace
{
fs::path out_path(const RunConfig &cfg, const fs::path &rel)
{
    return cfg.output_dir / rel;
}

fs::path require_input(const RunConfig &cfg, const fs::path &rel, Stage producer)
{
    const fs::path p = out_path(cfg, rel);
    if (!fs::exists(p))
        throw std::runtime_error("missing input " + p.string() + " (run the '" + std::string(to_string(producer)) +
                                 "' stage first)");
    return p;
}

std::string freq_label(double f)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", f);
    return buf;
}

fs::path path_file(Scenario sc, LosState st, double f)
{
    return fs::path("paths") /
           (std::string(to_string(sc)) + "_" + std::string(to_string(st)) + "_f" + freq_label(f) + ".csv");
}

std::string fit_name(Scenario sc) { return std::string(to_string(sc)) + "Fit"; }
std::string resim_name(Scenario sc) { return std::string(to_string(sc)) + "Resim"; }

std::vector<Satellite> configured_constellation(const RunConfig &cfg)
{
    if (!cfg.elements_file.empty())
    {
        try
        {
            return io::read_elements(cfg.elements_file);
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(e.what());
        }
    }
    return make_constellation(cfg.shells);
}

// --- Samples table ---

const std::vector<std::string> sample_columns = {"scenario",     "state",        "link_id",      "f_ghz",
                                                 "d_m",          "alpha_rad",    "pl_db",        "sf_db",
                                                 "kf_db",        "ds_log10s",    "asa_log10deg", "asd_log10deg",
                                                 "esa_log10deg", "esd_log10deg", "xpr_db"};
constexpr std::array<Lsp, n_lsp> sample_lsp_order = {Lsp::PL,  Lsp::SF,  Lsp::KF,  Lsp::DS, Lsp::ASA,
                                                     Lsp::ASD, Lsp::ESA, Lsp::ESD, Lsp::XPR};

struct Group
{
    std::vector<LspSample> los, nlos;
    std::vector<LspSample> &of(LosState s) { return s == LosState::LOS ? los : nlos; }
};

std::string samples_csv(const std::map<Scenario, Group> &groups)
{
    std::string out;
    for (std::size_t i = 0; i < sample_columns.size(); ++i)
        out += (i ? "," : "") + sample_columns[i];
    out += "\n";
    for (const auto &[sc, g] : groups)
        for (LosState st : all_states)
            for (const auto &s : (st == LosState::LOS ? g.los : g.nlos))
            {
                out += std::string(to_string(sc)) + "," + std::string(to_string(st)) + "," +
                       std::to_string(s.link_id) + "," + io::num(s.f_ghz) + "," + io::num(s.d_m) + "," +
                       io::num(s.alpha);
                for (Lsp l : sample_lsp_order)
                    out += "," + io::num(s[l]);
                out += "\n";
            }
    return out;
}

std::map<Scenario, Group> read_samples(const fs::path &file)
{
    std::map<Scenario, Group> groups;
    io::for_each_csv_row(file, sample_columns, [&](const auto &f, const auto &c) {
        LspSample s;
        const Scenario sc = parse_scenario(f[c[0]]);
        s.state = parse_state(f[c[1]]);
        s.link_id = io::to_size(f[c[2]]);
        s.f_ghz = io::to_double(f[c[3]]);
        s.d_m = io::to_double(f[c[4]]);
        s.alpha = io::to_double(f[c[5]]);
        for (std::size_t k = 0; k < sample_lsp_order.size(); ++k)
            s[sample_lsp_order[k]] = io::to_double(f[c[6 + k]]);
        groups[sc].of(s.state).push_back(s);
    });
    return groups;
}

json fit_report(const std::string &name, const SetFit &fit)
{
    json arr = json::array();
    for (const auto &[st, r] : fit.results)
    {
        json rec;
        rec["scenario"] = name;
        rec["state"] = std::string(to_string(st));
        rec["lsp"] = std::string(to_string(r.lsp));
        json coeffs;
        for (Coeff k : all_coeffs)
            coeffs[std::string(to_string(k))] = has(r.fitted, k) ? json(r.coeffs.get(k)) : json(nullptr);
        rec["coeffs"] = coeffs;
        json deg = json::array();
        for (Coeff k : r.degenerate)
            deg.push_back(std::string(to_string(k)));
        rec["degenerate"] = deg;
        rec["residual_rms"] = r.residual_rms;
        rec["std_residual_rms"] = r.std_residual_rms;
        rec["n"] = r.n;
        rec["ranges"] = {{"d_m", {r.d_m.min, r.d_m.max}},
                         {"f_ghz", {r.f_ghz.min, r.f_ghz.max}},
                         {"alpha_deg", {rad2deg(r.alpha.min), rad2deg(r.alpha.max)}}};
        arr.push_back(rec);
    }
    return arr;
}

std::string plotdata_csv(const std::vector<LspSample> &samples, const std::vector<double> &freqs)
{
    std::string out = "f_ghz,elev_lo_deg,elev_hi_deg,n";
    for (std::size_t k = 0; k < sample_lsp_order.size(); ++k)
        out += "," + sample_columns[6 + k];
    out += "\n";
    for (double f : freqs)
        for (int b = 0; b < 9; ++b)
        {
            const double lo = 10.0 * b, hi = lo + 10.0;
            std::array<double, n_lsp> sum{};
            std::array<std::size_t, n_lsp> cnt{};
            std::size_t n = 0;
            for (const auto &s : samples)
            {
                const double e = rad2deg(s.alpha);
                if (s.f_ghz != f || e < lo || e >= hi + (b == 8 ? 1e-9 : 0.0))
                    continue;
                ++n;
                for (std::size_t k = 0; k < n_lsp; ++k)
                {
                    const double v = s[sample_lsp_order[k]];
                    if (std::isfinite(v))
                    {
                        sum[k] += v;
                        ++cnt[k];
                    }
                }
            }
            if (n == 0)
                continue;
            out += io::num(f) + "," + io::num(lo) + "," + io::num(hi) + "," + std::to_string(n);
            for (std::size_t k = 0; k < n_lsp; ++k)
                out += "," + (cnt[k] ? io::num(sum[k] / static_cast<double>(cnt[k])) : std::string("nan"));
            out += "\n";
        }
    return out;
}

// --- Stages ---

void stage_propagate(const RunConfig &cfg)
{
    const auto sats = configured_constellation(cfg);
    io::write_json(out_path(cfg, "constellation.json"), io::elements_to_json(sats));
    if (cfg.write_tracks)
    {
        const auto times = time_grid(cfg.t_start_s, cfg.t_end_s, cfg.track_step_s);
        std::vector<std::string> text(sats.size());
        parallel_for(sats.size(), cfg.effective_jobs(), [&](unsigned, std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i)
                text[i] = io::track_csv(propagate_track(sats[i].elements, times));
        });
        for (std::size_t i = 0; i < sats.size(); ++i)
            io::write_text(out_path(cfg, fs::path("tracks") / (sats[i].name + ".csv")), text[i]);
    }
    log::info("propagate: " + std::to_string(sats.size()) + " satellites");
}

void stage_links(const RunConfig &cfg)
{
    const auto sats = io::read_elements(require_input(cfg, "constellation.json", Stage::propagate));
    Rng trng = make_rng(cfg.terminal_seed.value_or(cfg.seed), {tag(Stream::terminals)});
    const auto terminals = sample_terminals(cfg.terminal_count, trng, deg2rad(cfg.lat_limit_deg));
    const auto times = time_grid(cfg.t_start_s, cfg.t_end_s, cfg.t_step_s);

    int n_shells = 0;
    for (const auto &s : sats)
        n_shells = std::max(n_shells, s.shell + 1);
    LinkOptions opt;
    opt.min_elevation = deg2rad(cfg.min_elev_deg);
    opt.max_links_per_shell =
        cfg.max_links == 0 ? 0 : (cfg.max_links + static_cast<std::size_t>(n_shells) - 1) / static_cast<std::size_t>(n_shells);
    opt.seed = cfg.seed;
    opt.jobs = cfg.effective_jobs();
    const auto links = enumerate_links(sats, terminals, times, opt);

    std::string t = "term_id,lat_deg,lon_deg\n";
    for (std::size_t i = 0; i < terminals.size(); ++i)
        t += std::to_string(i) + "," + io::num(rad2deg(terminals[i].lat)) + "," + io::num(rad2deg(terminals[i].lon)) +
             "\n";
    io::write_text(out_path(cfg, "terminals.csv"), t);

    std::string s = "term_id,sat_id,t_s,elev_deg,dist_m,heading_deg,shell,x_q_km,y_q_km,z_q_km,bank_deg,tilt_deg\n";
    for (const auto &l : links)
        s += std::to_string(l.term_id) + "," + std::to_string(l.sat_id) + "," + io::num(l.t_s) + "," +
             io::num(rad2deg(l.elevation)) + "," + io::num(l.distance_m) + "," + io::num(rad2deg(l.mt.gamma)) + "," +
             std::to_string(l.shell) + "," + io::num(l.mt.q_km.x()) + "," + io::num(l.mt.q_km.y()) + "," +
             io::num(l.mt.q_km.z()) + "," + io::num(rad2deg(l.mt.beta)) + "," + io::num(rad2deg(l.mt.delta)) + "\n";
    io::write_text(out_path(cfg, "links.csv"), s);
    log::info("links: " + std::to_string(links.size()) + " links from " + std::to_string(terminals.size()) +
              " terminals");
}

std::string path_rows(const LinkSample &l, const PathSet &ps)
{
    std::string s;
    const std::string key = std::to_string(l.term_id) + "," + std::to_string(l.sat_id) + "," + io::num(l.t_s) + ",";
    for (std::size_t i = 0; i < ps.paths.size(); ++i)
    {
        const Path &p = ps.paths[i];
        s += key + std::to_string(i) + "," + (p.is_los ? "1" : "0") + "," + io::num(p.delay_s) + "," +
             io::num(10.0 * std::log10(p.power)) + "," + io::num(rad2deg(p.aoa_az)) + "," +
             io::num(rad2deg(p.aoa_el)) + "," + io::num(rad2deg(p.aod_az)) + "," + io::num(rad2deg(p.aod_el)) + "," +
             io::num(p.xpr_db) + "\n";
    }
    return s;
}

const char *path_header =
    "term_id,sat_id,t_s,path_idx,is_los,delay_s,power_db,aoa_az_deg,aoa_el_deg,aod_az_deg,aod_el_deg,xpr_db\n";

void stage_environment(const RunConfig &cfg)
{
    const auto links = read_links(require_input(cfg, "links.csv", Stage::links));
    const ParameterDatabase &db = cfg.reference();
    const std::size_t nf = cfg.frequencies_ghz.size();
    for (Scenario sc : cfg.scenarios)
    {
        const ParameterSet &params = db.base(sc);
        const ScenarioParams &sp = scenario_params(sc);
        // [link][freq][state]
        std::vector<std::string> chunks(links.size() * nf * 2);
        parallel_for(links.size(), cfg.effective_jobs(), [&](unsigned, std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i)
            {
                Rng g = make_rng(cfg.seed, {tag(Stream::scatterers), static_cast<std::uint64_t>(sc), i});
                const DropDraws draws = draw_drop(sp, g);
                for (std::size_t k = 0; k < nf; ++k)
                {
                    Rng x = make_rng(cfg.seed, {tag(Stream::xpr), static_cast<std::uint64_t>(sc), i, k});
                    const Drop d = make_drop(links[i], draws, params, cfg.frequencies_ghz[k], x);
                    chunks[(i * nf + k) * 2 + 0] = path_rows(links[i], d.los);
                    chunks[(i * nf + k) * 2 + 1] = path_rows(links[i], d.nlos);
                }
            }
        });
        for (std::size_t k = 0; k < nf; ++k)
            for (LosState st : all_states)
            {
                std::string text = path_header;
                for (std::size_t i = 0; i < links.size(); ++i)
                    text += chunks[(i * nf + k) * 2 + static_cast<std::size_t>(st)];
                io::write_text(out_path(cfg, path_file(sc, st, cfg.frequencies_ghz[k])), text);
            }
        log::info("environment: " + std::string(to_string(sc)) + " done");
    }
}

std::vector<PathSet> read_path_file(const fs::path &file, const std::vector<LinkSample> &links, double f_ghz)
{
    std::vector<PathSet> sets(links.size());
    std::vector<bool> seen(links.size(), false);
    std::size_t cursor = 0;
    bool started = false;
    io::for_each_csv_row(file,
                         {"term_id", "sat_id", "t_s", "path_idx", "is_los", "delay_s", "power_db", "aoa_az_deg",
                          "aoa_el_deg", "aod_az_deg", "aod_el_deg", "xpr_db"},
                         [&](const auto &f, const auto &c) {
                             const std::size_t term = io::to_size(f[c[0]]);
                             const std::size_t sat = io::to_size(f[c[1]]);
                             const double t = io::to_double(f[c[2]]);
                             const std::size_t idx = io::to_size(f[c[3]]);
                             if (idx == 0)
                             {
                                 if (started)
                                     ++cursor;
                                 started = true;
                                 while (cursor < links.size() &&
                                        !(links[cursor].term_id == term && links[cursor].sat_id == sat &&
                                          links[cursor].t_s == t))
                                     ++cursor;
                                 if (cursor == links.size())
                                     throw std::runtime_error(file.string() + ": path rows do not match links.csv");
                                 seen[cursor] = true;
                                 PathSet &ps = sets[cursor];
                                 ps.d_m = link_distance_m(links[cursor].mt.q_km);
                                 ps.alpha = links[cursor].elevation;
                                 ps.f_ghz = f_ghz;
                             }
                             else if (!started || links[cursor].term_id != term || links[cursor].sat_id != sat ||
                                      links[cursor].t_s != t)
                                 throw std::runtime_error(file.string() + ": path block out of order");
                             Path p;
                             p.is_los = f[c[4]] == "1";
                             p.delay_s = io::to_double(f[c[5]]);
                             p.power = std::pow(10.0, 0.1 * io::to_double(f[c[6]]));
                             p.aoa_az = deg2rad(io::to_double(f[c[7]]));
                             p.aoa_el = deg2rad(io::to_double(f[c[8]]));
                             p.aod_az = deg2rad(io::to_double(f[c[9]]));
                             p.aod_el = deg2rad(io::to_double(f[c[10]]));
                             p.xpr_db = io::to_double(f[c[11]]);
                             sets[cursor].paths.push_back(p);
                         });
    for (std::size_t i = 0; i < links.size(); ++i)
        if (!seen[i])
            throw std::runtime_error(file.string() + ": no paths for link " + std::to_string(i));
    return sets;
}

void stage_extract(const RunConfig &cfg)
{
    const auto links = read_links(require_input(cfg, "links.csv", Stage::links));
    std::map<Scenario, Group> groups;
    for (Scenario sc : cfg.scenarios)
        for (LosState st : all_states)
            for (double f : cfg.frequencies_ghz)
            {
                const auto sets = read_path_file(require_input(cfg, path_file(sc, st, f), Stage::environment), links, f);
                auto &dst = groups[sc].of(st);
                const std::size_t base = dst.size();
                dst.resize(base + sets.size());
                parallel_for(sets.size(), cfg.effective_jobs(), [&](unsigned, std::size_t lo, std::size_t hi) {
                    for (std::size_t i = lo; i < hi; ++i)
                        dst[base + i] = extract_link(sets[i], st, i);
                });
            }
    io::write_text(out_path(cfg, "samples.csv"), samples_csv(groups));
    if (cfg.emit_plotdata)
        for (const auto &[sc, g] : groups)
            for (LosState st : all_states)
                io::write_text(out_path(cfg, fs::path("plotdata") / (std::string(to_string(sc)) + "_" +
                                                                    std::string(to_string(st)) + ".csv")),
                               plotdata_csv(st == LosState::LOS ? g.los : g.nlos, cfg.frequencies_ghz));
    log::info("extract: samples.csv written");
}

ParameterDatabase fitted_database(const ParameterDatabase &ref)
{
    ParameterDatabase db;
    db.version = 1;
    db.correlations = ref.correlations;
    return db;
}

void stage_fit(const RunConfig &cfg)
{
    auto groups = read_samples(require_input(cfg, "samples.csv", Stage::extract));
    const ParameterDatabase &ref = cfg.reference();
    ParameterDatabase out = fitted_database(ref);
    json report = json::array();
    for (Scenario sc : cfg.scenarios)
    {
        auto it = groups.find(sc);
        if (it == groups.end())
            throw std::runtime_error("fit: no samples for scenario " + std::string(to_string(sc)));
        const SetFit fit = fit_parameter_set(it->second.los, it->second.nlos, ref.base(sc), fit_name(sc));
        for (const auto &r : fit_report(fit_name(sc), fit))
            report.push_back(r);
        out.sets.push_back(fit.params);
    }
    io::write_json(out_path(cfg, "fit-report.json"), report);
    io::write_json(out_path(cfg, "fitted_params.json"), io::database_to_json(out));
    io::write_text(out_path(cfg, "samples_fitted.csv"), samples_csv(groups));
    log::info("fit: fitted " + std::to_string(out.sets.size()) + " parameter sets");
}

void stage_resimulate(const RunConfig &cfg)
{
    const auto fitted = ParameterDatabase::load(require_input(cfg, "fitted_params.json", Stage::fit));
    const auto groups = read_samples(require_input(cfg, "samples.csv", Stage::extract));
    const ParameterDatabase &ref = cfg.reference();
    ParameterDatabase out = fitted_database(ref);
    std::map<Scenario, Group> resim;
    json report = json::array();
    std::size_t saturated = 0;
    for (Scenario sc : cfg.scenarios)
    {
        const ParameterSet &set = fitted.set(fit_name(sc));
        auto it = groups.find(sc);
        if (it == groups.end())
            throw std::runtime_error("resimulate: no samples for scenario " + std::string(to_string(sc)));
        for (LosState st : all_states)
        {
            const auto &src = st == LosState::LOS ? it->second.los : it->second.nlos;
            std::vector<Covariates> cov;
            cov.reserve(src.size());
            for (const auto &s : src)
                cov.push_back({s.link_id, s.d_m, s.f_ghz, s.alpha});
            ResimOptions opt{cfg.seed, cfg.effective_jobs()};
            ResimStats stats;
            resim[sc].of(st) = resimulate(set, st, fitted.correlation(sc, st), cov, opt, nullptr, &stats);
            saturated += stats.angle_saturated;
        }
        const SetFit fit = fit_parameter_set(resim[sc].los, resim[sc].nlos, ref.base(sc), resim_name(sc));
        for (const auto &r : fit_report(resim_name(sc), fit))
            report.push_back(r);
        out.sets.push_back(fit.params);
    }
    if (saturated > 0)
        log::info("resimulate: " + std::to_string(saturated) +
                  " angular spreads above the attainable maximum were capped");
    io::write_text(out_path(cfg, "resim_samples.csv"), samples_csv(resim));
    io::write_json(out_path(cfg, "resim-fit-report.json"), report);
    io::write_json(out_path(cfg, "resim_params.json"), io::database_to_json(out));
}

int stage_compare(const RunConfig &cfg)
{
    const auto fitted = ParameterDatabase::load(require_input(cfg, "fitted_params.json", Stage::fit));
    const ParameterDatabase &ref = cfg.reference();

    ComparisonReport all;
    for (Scenario sc : cfg.scenarios)
    {
        auto r = compare(fitted.set(fit_name(sc)), ref.base(sc), cfg.tolerances, cfg.gate);
        all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
        all.missing.insert(all.missing.end(), r.missing.begin(), r.missing.end());
    }
    io::write_text(out_path(cfg, "comparison.csv"), all.to_csv());
    const bool tables = log::level() <= log::Level::info;
    if (tables)
        std::printf("Fitted parameters vs reference\n%s\n", all.to_table().c_str());
    std::size_t gated = all.failures(true);

    const fs::path resim_file = out_path(cfg, "resim_params.json");
    if (fs::exists(resim_file))
    {
        const auto resim = ParameterDatabase::load(resim_file);
        ComparisonReport closure;
        for (Scenario sc : cfg.scenarios)
        {
            auto r = compare(resim.set(resim_name(sc)), fitted.set(fit_name(sc)), cfg.tolerances, cfg.closure_gate);
            closure.rows.insert(closure.rows.end(), r.rows.begin(), r.rows.end());
        }
        io::write_text(out_path(cfg, "comparison_resim.csv"), closure.to_csv());
        if (tables)
            std::printf("Resimulated vs fitted parameters\n%s\n", closure.to_table().c_str());
        gated += closure.failures(true);
    }
    if (gated > 0)
    {
        log::error("compare: " + std::to_string(gated) + " gated coefficients outside tolerance");
        return 3;
    }
    return 0;
}
} // namespace

std::vector<LinkSample> read_links(const fs::path &file)
{
    std::vector<LinkSample> links;
    io::for_each_csv_row(file,
                         {"term_id", "sat_id", "t_s", "shell", "x_q_km", "y_q_km", "z_q_km", "bank_deg",
                          "heading_deg", "tilt_deg"},
                         [&](const auto &f, const auto &c) {
                             LinkSample l;
                             l.term_id = io::to_size(f[c[0]]);
                             l.sat_id = io::to_size(f[c[1]]);
                             l.t_s = io::to_double(f[c[2]]);
                             l.shell = static_cast<int>(io::to_size(f[c[3]]));
                             l.mt.q_km = {io::to_double(f[c[4]]), io::to_double(f[c[5]]), io::to_double(f[c[6]])};
                             l.mt.alpha = elevation(l.mt.q_km);
                             l.mt.beta = deg2rad(io::to_double(f[c[7]]));
                             l.mt.gamma = deg2rad(io::to_double(f[c[8]]));
                             l.mt.delta = deg2rad(io::to_double(f[c[9]]));
                             l.elevation = l.mt.alpha;
                             l.distance_m = l.mt.q_km.norm() * 1000.0;
                             links.push_back(l);
                         });
    return links;
}

int run_stage(Stage s, const RunConfig &cfg)
{
    switch (s)
    {
    case Stage::propagate: stage_propagate(cfg); return 0;
    case Stage::links: stage_links(cfg); return 0;
    case Stage::environment: stage_environment(cfg); return 0;
    case Stage::extract: stage_extract(cfg); return 0;
    case Stage::fit: stage_fit(cfg); return 0;
    case Stage::resimulate: stage_resimulate(cfg); return 0;
    case Stage::compare: return stage_compare(cfg);
    }
    return 0;
}

int run_pipeline(const RunConfig &cfg)
{
    cfg.validate();
    io::write_json(cfg.output_dir / "config.resolved.json", cfg.to_json());
    int status = 0;
    for (Stage s : all_stages)
        if (std::find(cfg.stages.begin(), cfg.stages.end(), s) != cfg.stages.end())
            status = std::max(status, run_stage(s, cfg));
    return status;
}
} // namespace ntn
