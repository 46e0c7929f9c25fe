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

#include "ntn/constellation.hpp"
#include "ntn/lsp.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ntn::io
{
// Round-trip exact text form of a double
std::string num(double x);

void write_text(const std::filesystem::path &file, std::string_view text);
nlohmann::json read_json(const std::filesystem::path &file);
void write_json(const std::filesystem::path &file, const nlohmann::json &j);

// Streams a CSV file row by row. The header must contain every name in `required`; fn receives
// the fields of each data row and the column index of each required name, in order.
void for_each_csv_row(const std::filesystem::path &file, const std::vector<std::string> &required,
                      const std::function<void(const std::vector<std::string_view> &fields,
                                               const std::vector<std::size_t> &cols)> &fn);

double to_double(std::string_view s);
std::size_t to_size(std::string_view s);

// Element records: {name, a_km, e, inc_deg, raan_deg, argp_deg, nu_deg, epoch_s[, shell]}
std::vector<Satellite> read_elements(const std::filesystem::path &file);
nlohmann::json elements_to_json(const std::vector<Satellite> &sats);

nlohmann::json database_to_json(const ParameterDatabase &db);

std::string track_csv(const std::vector<TrackPoint> &track);
std::string pass_csv(const std::vector<LinkSample> &links);
} // namespace ntn::io
