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

#include "ntn/analysis.hpp"
#include "ntn/constellation.hpp"
#include "ntn/lsp.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ntn
{
enum class Stage
{
    propagate = 0,
    links,
    environment,
    extract,
    fit,
    resimulate,
    compare,
};
inline constexpr std::array<Stage, 7> all_stages = {Stage::propagate, Stage::links,      Stage::environment,
                                                    Stage::extract,   Stage::fit,        Stage::resimulate,
                                                    Stage::compare};
std::string_view to_string(Stage s);
Stage parse_stage(std::string_view s);

// Invalid or inconsistent configuration (CLI exit status 1)
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig
{
    std::uint64_t seed = 1;
    std::vector<WalkerSpec> shells;
    std::string elements_file; // replaces the Walker shells when set

    std::size_t terminal_count = 100;
    double lat_limit_deg = 53.0;
    std::optional<std::uint64_t> terminal_seed;

    double min_elev_deg = 10.0;
    double t_start_s = 0.0;
    double t_end_s = 86400.0;
    double t_step_s = 30.0;
    std::size_t max_links = 3000; // total, split evenly over shells; 0 keeps all

    bool write_tracks = true;
    double track_step_s = 600.0;

    std::vector<Scenario> scenarios;
    std::vector<double> frequencies_ghz;

    std::filesystem::path output_dir = "out";
    std::string params_file; // empty: bundled parameters
    std::vector<Stage> stages;
    unsigned jobs = 0; // 0: all cores
    bool emit_plotdata = false;

    Tolerances tolerances;
    std::vector<std::string> gate = {"DS.mu", "KF.mu", "PL.gam"};
    std::vector<std::string> closure_gate = {"DS.mu", "ASA.mu", "KF.mu"};

    static RunConfig defaults();
    static RunConfig from_json(const nlohmann::json &j); // throws ConfigError
    nlohmann::json to_json() const;
    void validate() const;

    unsigned effective_jobs() const;
    const ParameterDatabase &reference() const;

  private:
    mutable std::shared_ptr<ParameterDatabase> db_;
};

// Runs one stage; returns 0, or 3 when the compare stage finds gated failures
int run_stage(Stage s, const RunConfig &cfg);
// Runs the configured stages in order
int run_pipeline(const RunConfig &cfg);

// Distance and elevation used as covariates for a link, from its MT-frame position
double link_distance_m(const Eigen::Vector3d &q_km);

std::vector<LinkSample> read_links(const std::filesystem::path &file);
} // namespace ntn
