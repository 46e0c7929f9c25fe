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

//
// ntn-gscm command line driver.
//
//   ntn-gscm run --config cfg.json [--seed N] [--out DIR] [--stages a,b] [--jobs N]
//   ntn-gscm fit --config cfg.json --out DIR
//
// Exit status: 0 ok, 1 configuration error, 2 runtime fault, 3 gated comparison failures.

#include "ntn/io.hpp"
#include "ntn/log.hpp"
#include "ntn/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace
{
struct Overrides
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string params;
    std::string out;
    std::string stages;
    std::optional<unsigned> jobs;
    bool plotdata = false;
    bool quiet = false;
    bool verbose = false;
};

void add_common(CLI::App *sub, Overrides &o, bool with_stages)
{
    sub->add_option("-c,--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed (overrides config and NTN_GSCM_SEED)");
    sub->add_option("--params", o.params, "parameter database JSON (default: bundled tables)");
    sub->add_option("-o,--out", o.out, "output directory");
    if (with_stages)
        sub->add_option("--stages", o.stages, "comma separated stage list");
    sub->add_option("-j,--jobs", o.jobs, "worker threads (default: all cores)");
    sub->add_flag("--emit-plotdata", o.plotdata, "write elevation-binned LSP means under plotdata/");
    sub->add_flag("-q,--quiet", o.quiet, "errors only");
    sub->add_flag("-v,--verbose", o.verbose, "debug output");
}

ntn::RunConfig resolve(const Overrides &o)
{
    nlohmann::json j = nlohmann::json::object();
    if (!o.config.empty())
    {
        try
        {
            j = ntn::io::read_json(o.config);
        }
        catch (const std::exception &e)
        {
            throw ntn::ConfigError(e.what());
        }
    }
    if (const char *env = std::getenv("NTN_GSCM_SEED"))
    {
        try
        {
            std::size_t pos = 0;
            j["seed"] = std::stoull(env, &pos);
            if (env[pos] != '\0')
                throw std::invalid_argument(env);
        }
        catch (const std::exception &)
        {
            throw ntn::ConfigError(std::string("NTN_GSCM_SEED is not an unsigned integer: ") + env);
        }
    }
    if (o.seed)
        j["seed"] = *o.seed;
    if (!o.params.empty())
        j["params_file"] = o.params;
    if (!o.out.empty())
        j["output_dir"] = o.out;
    if (o.jobs)
        j["jobs"] = *o.jobs;
    if (o.plotdata)
        j["emit_plotdata"] = true;
    if (!o.stages.empty())
    {
        nlohmann::json st = nlohmann::json::array();
        std::stringstream ss(o.stages);
        for (std::string s; std::getline(ss, s, ',');)
            if (!s.empty())
                st.push_back(s);
        j["stages"] = st;
    }
    return ntn::RunConfig::from_json(j);
}
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"ntn-gscm: satellite channel large-scale parameter pipeline"};
    app.require_subcommand(1);
    Overrides o;

    CLI::App *run = app.add_subcommand("run", "run the configured stages in order");
    add_common(run, o, true);
    std::vector<std::pair<CLI::App *, ntn::Stage>> single;
    for (ntn::Stage s : ntn::all_stages)
    {
        const std::string name(ntn::to_string(s));
        CLI::App *sub = app.add_subcommand(name, "run the " + name + " stage only");
        add_common(sub, o, false);
        single.emplace_back(sub, s);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    ntn::log::set_level(o.quiet ? ntn::log::Level::error : o.verbose ? ntn::log::Level::debug : ntn::log::Level::info);
    try
    {
        ntn::RunConfig cfg = resolve(o);
        if (run->parsed())
            return ntn::run_pipeline(cfg);
        for (const auto &[sub, stage] : single)
            if (sub->parsed())
                return ntn::run_stage(stage, cfg);
    }
    catch (const ntn::ConfigError &e)
    {
        std::cerr << "ntn-gscm: configuration error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "ntn-gscm: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
