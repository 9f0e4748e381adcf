// SPDX-License-Identifier: Apache-2.0
//
// patternbf: pattern-driven beamformer synthesis for planar arrays
// Copyright (C) 2026 The patternbf authors
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

#ifndef PATTERNBF_IO_HPP
#define PATTERNBF_IO_HPP

#include "patternbf/pattern.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace patternbf
{

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, std::string_view text);

nlohmann::json read_json_file(const std::filesystem::path &path);

/// Two-space indented, trailing newline.
void write_json_file(const std::filesystem::path &path, const nlohmann::json &j);

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

/// Whole-field parse; `where` is prepended to the error message.
double parse_double(std::string_view text, const std::string &where);

/// Comma-separated fields of one line (no quoting).
std::vector<std::string_view> split_csv_line(std::string_view line);

/// H rows x W columns of dB values with 6 decimals.
std::string pattern_to_csv(const BeamPattern &pattern);
void write_pattern_csv(const std::filesystem::path &path, const BeamPattern &pattern);

/// Reads a dB grid; the result is re-normalized to peak 0 dB and floored at -60 dB.
BeamPattern read_pattern_csv(const std::filesystem::path &path, const AngleGrid &grid);

/// 8-bit binary PGM heatmap, -60 dB -> 0 and 0 dB -> 255, rows = zenith.
std::string pattern_to_pgm(const BeamPattern &pattern);
void write_pattern_pgm(const std::filesystem::path &path, const BeamPattern &pattern);

nlohmann::json to_json(const ArrayConfig &cfg);
ArrayConfig array_config_from_json(const nlohmann::json &j, ArrayConfig base = ArrayConfig::standard());

nlohmann::json to_json(const AngleGrid &grid);

/// {"zenith": [first, last, step], "azimuth": ...}; an axis may also be {"values": [...]}.
AngleGrid angle_grid_from_json(const nlohmann::json &j);

nlohmann::json to_json(const TargetSpec &spec);
TargetSpec target_spec_from_json(const nlohmann::json &j, TargetSpec base = {});

} // namespace patternbf

#endif
