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
#include "ntn/log.hpp"
#include "ntn/pipeline.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

using namespace ntn;
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{
struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string &tag)
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("ntn_test_" + tag + "_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path &p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

json tiny_config(const fs::path &out)
{
    return json{{"seed", 11},
                {"walker", json::array({{{"total", 24}, {"planes", 4}, {"phasing", 1}, {"altitude_km", 550},
                                         {"inc_deg", 53}},
                                        {{"total", 12}, {"planes", 3}, {"phasing", 1}, {"altitude_km", 20200},
                                         {"inc_deg", 55}}})},
                {"terminals", {{"count", 20}, {"lat_limit_deg", 50}}},
                {"links", {{"t_start_s", 0}, {"t_end_s", 43200}, {"t_step_s", 120}, {"max_links", 300}}},
                {"scenarios", {"Rural"}},
                {"frequencies_ghz", {2, 20}},
                {"compare", {{"gate", json::array()}, {"closure_gate", json::array()}}},
                {"output_dir", out.string()},
                {"jobs", 2}};
}

int cli(const std::string &args)
{
    const std::string cmd = std::string(NTN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
} // namespace

TEST_SUITE("pipeline")
{
    TEST_CASE("configuration defaults and parsing")
    {
        const auto d = RunConfig::defaults();
        CHECK(d.shells.size() == 3);
        CHECK(d.scenarios.size() == 4);
        CHECK(d.frequencies_ghz == std::vector<double>{2.0, 20.0});
        CHECK(d.stages.size() == all_stages.size());
        CHECK_NOTHROW(d.validate());

        const auto c = RunConfig::from_json(json{{"seed", 5}, {"scenarios", {"Urban"}}});
        CHECK(c.seed == 5);
        CHECK(c.scenarios == std::vector<Scenario>{Scenario::Urban});
        CHECK(c.shells.size() == 3);

        CHECK_THROWS_AS(RunConfig::from_json(json{{"sed", 5}}), ConfigError);
        CHECK_THROWS_AS(RunConfig::from_json(json{{"links", {{"min_elev", 5}}}}), ConfigError);
        CHECK_THROWS_AS(RunConfig::from_json(json{{"stages", {"propagate", "bogus"}}}), ConfigError);
        CHECK_THROWS_AS(RunConfig::from_json(json{{"scenarios", {"Downtown"}}}), ConfigError);
        CHECK_THROWS_AS(RunConfig::from_json(json{{"seed", "x"}}), ConfigError);
        CHECK_THROWS_AS(RunConfig::from_json(json{{"compare", {{"gate", {"DS"}}}}}).validate(), ConfigError);
        CHECK_THROWS_AS(RunConfig::from_json(json{{"frequencies_ghz", {2, 2}}}).validate(), ConfigError);

        CHECK(parse_stage("fit") == Stage::fit);
        CHECK_THROWS(parse_stage("fitting"));
    }

    TEST_CASE("resolved configuration round trip")
    {
        const auto a = RunConfig::from_json(tiny_config("x"));
        const json echo = a.to_json();
        CHECK_FALSE(echo.contains("jobs"));
        CHECK_FALSE(echo.contains("output_dir"));
        const auto b = RunConfig::from_json(echo);
        CHECK(b.to_json() == echo);
        CHECK(b.seed == 11);
        CHECK(b.shells.size() == 2);
        CHECK(b.max_links == 300);
    }

    TEST_CASE("elements file round trip")
    {
        TempDir tmp("elements");
        const std::vector<WalkerSpec> shells = {{6, 2, 1, 550.0, deg2rad(53.0)}, {4, 1, 0, 1200.0, deg2rad(87.0)}};
        const auto sats = make_constellation(shells);
        io::write_json(tmp.path / "el.json", io::elements_to_json(sats));
        const auto back = io::read_elements(tmp.path / "el.json");
        REQUIRE(back.size() == sats.size());
        for (std::size_t i = 0; i < sats.size(); ++i)
        {
            CHECK(back[i].name == sats[i].name);
            CHECK(back[i].shell == sats[i].shell);
            CHECK(back[i].elements.a_km == sats[i].elements.a_km);
            CHECK(back[i].elements.e == doctest::Approx(sats[i].elements.e).epsilon(1e-12));
            CHECK(back[i].elements.inc == doctest::Approx(sats[i].elements.inc).epsilon(1e-12));
            CHECK(back[i].elements.raan0 == doctest::Approx(sats[i].elements.raan0).epsilon(1e-12));
            CHECK(back[i].elements.argp0 == doctest::Approx(sats[i].elements.argp0).epsilon(1e-12));
            CHECK(back[i].elements.nu0 == doctest::Approx(sats[i].elements.nu0).epsilon(1e-12));
        }
        CHECK(io::num(0.1) == "0.10000000000000001");
    }

    TEST_CASE("end-to-end run on a tiny constellation")
    {
        log::set_level(log::Level::error);
        TempDir tmp("run");
        const auto cfg = RunConfig::from_json(tiny_config(tmp.path));
        REQUIRE(run_pipeline(cfg) == 0);

        const fs::path o = tmp.path;
        for (const char *f : {"config.resolved.json", "constellation.json", "terminals.csv", "links.csv",
                              "samples.csv", "fit-report.json", "fitted_params.json", "samples_fitted.csv",
                              "resim_samples.csv", "resim-fit-report.json", "resim_params.json", "comparison.csv",
                              "comparison_resim.csv"})
            CHECK_MESSAGE(fs::exists(o / f), f);
        CHECK(fs::exists(o / "tracks" / "S0-P0-0.csv"));
        CHECK(fs::exists(o / "paths" / "Rural_LOS_f2.csv"));
        CHECK(fs::exists(o / "paths" / "Rural_NLOS_f20.csv"));

        CHECK(first_line(o / "links.csv") ==
              "term_id,sat_id,t_s,elev_deg,dist_m,heading_deg,shell,x_q_km,y_q_km,z_q_km,bank_deg,tilt_deg");
        CHECK(first_line(o / "comparison.csv") == "scenario,state,lsp,coeff,fitted,reference,delta,pass");
        CHECK(first_line(o / "samples.csv").rfind("scenario,state,link_id,f_ghz,d_m,alpha_rad,pl_db", 0) == 0);

        const auto links = read_links(o / "links.csv");
        CHECK_FALSE(links.empty());
        CHECK(links.size() <= 300);
        for (const auto &l : links)
            REQUIRE(l.elevation >= deg2rad(10.0) - 1e-9);

        const json fitted = io::read_json(o / "fitted_params.json");
        CHECK(fitted.dump().find("RuralFit") != std::string::npos);

        // Stages read their inputs from disk, so rerunning a later stage reproduces its outputs
        const std::string samples = slurp(o / "samples.csv");
        const std::string report = slurp(o / "fit-report.json");
        fs::remove(o / "samples.csv");
        fs::remove(o / "fit-report.json");
        CHECK(run_stage(Stage::extract, cfg) == 0);
        CHECK(run_stage(Stage::fit, cfg) == 0);
        CHECK(slurp(o / "samples.csv") == samples);
        CHECK(slurp(o / "fit-report.json") == report);

        // A stage with a missing input fails instead of producing partial output
        TempDir empty("empty");
        auto j = tiny_config(empty.path);
        CHECK_THROWS(run_stage(Stage::extract, RunConfig::from_json(j)));
        log::set_level(log::Level::info);
    }

    TEST_CASE("command-line exit codes")
    {
        TempDir tmp("cli");
        const fs::path good = tmp.path / "good.json";
        auto j = tiny_config(tmp.path / "out");
        j["stages"] = {"propagate"};
        io::write_json(good, j);
        const fs::path bad = tmp.path / "bad.json";
        io::write_json(bad, json{{"seeds", 1}});

        CHECK(cli("--help") == 0);
        CHECK(cli("") == 1);
        CHECK(cli("run --no-such-flag") == 1);
        CHECK(cli("run -c " + (tmp.path / "missing.json").string()) == 1);
        CHECK(cli("run -q -c " + bad.string()) == 1);
        CHECK(cli("run -q -c " + good.string()) == 0);
        CHECK(fs::exists(tmp.path / "out" / "constellation.json"));
        CHECK(cli("fit -q -c " + good.string() + " -o " + (tmp.path / "nothing").string()) == 2);
        CHECK(cli("run -q -c " + good.string() + " --stages propagate,bogus") == 1);

        // Environment seed sits between the config file and --seed
        CHECK(std::system(("NTN_GSCM_SEED=abc " + std::string(NTN_CLI_PATH) + " run -q -c " + good.string() +
                           " > /dev/null 2>&1")
                              .c_str()) != 0);
        CHECK(std::system(("NTN_GSCM_SEED=99 " + std::string(NTN_CLI_PATH) + " run -q -c " + good.string() +
                           " > /dev/null 2>&1")
                              .c_str()) == 0);
        CHECK(io::read_json(tmp.path / "out" / "config.resolved.json").at("seed") == 99);
        CHECK(std::system(("NTN_GSCM_SEED=99 " + std::string(NTN_CLI_PATH) + " run -q --seed 5 -c " +
                           good.string() + " > /dev/null 2>&1")
                              .c_str()) == 0);
        CHECK(io::read_json(tmp.path / "out" / "config.resolved.json").at("seed") == 5);
    }
}
