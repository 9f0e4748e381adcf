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

#include "patternbf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace patternbf
{

std::string read_text_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path &path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

nlohmann::json read_json_file(const std::filesystem::path &path)
{
    const std::string text = read_text_file(path);
    try
    {
        return nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        fail(ErrorKind::Parse, "'" + path.string() + "': " + e.what());
    }
}

void write_json_file(const std::filesystem::path &path, const nlohmann::json &j)
{
    write_text_file(path, j.dump(2) + "\n");
}

std::string format_double(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string &where)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
        fail(ErrorKind::Parse, where + ": '" + std::string(text) + "' is not a number");
    return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos)
        {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string pattern_to_csv(const BeamPattern &pattern)
{
    std::string out;
    out.reserve(static_cast<std::size_t>(pattern.cells()) * 11);
    char buf[32];
    for (Index i = 0; i < pattern.rows(); ++i)
    {
        for (Index j = 0; j < pattern.cols(); ++j)
        {
            if (j > 0)
                out += ',';
            std::snprintf(buf, sizeof(buf), "%.6f", pattern.values(i, j));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void write_pattern_csv(const std::filesystem::path &path, const BeamPattern &pattern)
{
    write_text_file(path, pattern_to_csv(pattern));
}

BeamPattern read_pattern_csv(const std::filesystem::path &path, const AngleGrid &grid)
{
    const std::string text = read_text_file(path);
    PatternMatrix values(grid.rows(), grid.cols());
    std::istringstream lines(text);
    std::string line;
    Index row = 0;
    while (std::getline(lines, line))
    {
        if (line.empty() || line == "\r")
            continue;
        if (row >= grid.rows())
            fail(ErrorKind::GridMismatch, "'" + path.string() + "' has more rows than the grid");
        const auto fields = split_csv_line(line);
        if (static_cast<Index>(fields.size()) != grid.cols())
            fail(ErrorKind::GridMismatch, "'" + path.string() + "' row " + std::to_string(row + 1) + " has " +
                                              std::to_string(fields.size()) + " columns, expected " +
                                              std::to_string(grid.cols()));
        for (Index j = 0; j < grid.cols(); ++j)
            values(row, j) = parse_double(fields[static_cast<std::size_t>(j)],
                                          path.string() + " row " + std::to_string(row + 1) + " column " +
                                              std::to_string(j + 1));
        ++row;
    }
    if (row != grid.rows())
        fail(ErrorKind::GridMismatch, "'" + path.string() + "' has " + std::to_string(row) + " rows, expected " +
                                          std::to_string(grid.rows()));
    return renormalize_pattern(std::move(values), grid);
}

std::string pattern_to_pgm(const BeamPattern &pattern)
{
    std::string out = "P5\n" + std::to_string(pattern.cols()) + " " + std::to_string(pattern.rows()) + "\n255\n";
    out.reserve(out.size() + static_cast<std::size_t>(pattern.cells()));
    for (Index i = 0; i < pattern.rows(); ++i)
        for (Index j = 0; j < pattern.cols(); ++j)
        {
            const double level = (pattern.values(i, j) - kPatternFloorDb) / -kPatternFloorDb;
            const long pixel = std::lround(std::clamp(level, 0.0, 1.0) * 255.0);
            out += static_cast<char>(static_cast<unsigned char>(pixel));
        }
    return out;
}

void write_pattern_pgm(const std::filesystem::path &path, const BeamPattern &pattern)
{
    write_text_file(path, pattern_to_pgm(pattern));
}

nlohmann::json to_json(const ArrayConfig &cfg)
{
    return {{"n_y", cfg.n_y},
            {"n_z", cfg.n_z},
            {"spacing", cfg.spacing},
            {"wavelength", cfg.wavelength},
            {"n_rf", cfg.n_rf}};
}

ArrayConfig array_config_from_json(const nlohmann::json &j, ArrayConfig base)
{
    if (!j.is_object())
        fail(ErrorKind::Parse, "array config must be a JSON object");
    try
    {
        base.n_y = j.value("n_y", base.n_y);
        base.n_z = j.value("n_z", base.n_z);
        const double ratio = j.value("spacing_wavelengths", base.spacing / base.wavelength);
        base.wavelength = j.value("wavelength", base.wavelength);
        base.spacing = j.contains("spacing") ? j.at("spacing").get<double>() : ratio * base.wavelength;
        base.n_rf = j.value("n_rf", base.n_rf);
    }
    catch (const nlohmann::json::exception &e)
    {
        fail(ErrorKind::Parse, std::string("array config: ") + e.what());
    }
    base.validate();
    return base;
}

namespace
{
std::vector<double> regular_axis(double first, double last, double step, bool zenith)
{
    return zenith ? AngleGrid::uniform(first, last, step, 0.0, 0.0, 1.0).zeniths
                  : AngleGrid::uniform(0.0, 0.0, 1.0, first, last, step).azimuths;
}

// [first, last, step] when that regenerates the axis exactly, else {"values": [...]}.
nlohmann::json axis_to_json(const std::vector<double> &axis, bool zenith)
{
    if (axis.size() >= 2)
    {
        const double step = axis[1] - axis[0];
        try
        {
            if (regular_axis(axis.front(), axis.back(), step, zenith) == axis)
                return nlohmann::json::array({axis.front(), axis.back(), step});
        }
        catch (const Error &)
        {
        }
    }
    return {{"values", axis}};
}

std::vector<double> axis_from_json(const nlohmann::json &j, bool zenith)
{
    if (j.is_object())
        return j.at("values").get<std::vector<double>>();
    const auto r = j.get<std::vector<double>>();
    if (r.size() != 3)
        fail(ErrorKind::Parse, "grid axes must be [first, last, step]");
    return regular_axis(r[0], r[1], r[2], zenith);
}
} // namespace

nlohmann::json to_json(const AngleGrid &grid)
{
    return {{"zenith", axis_to_json(grid.zeniths, true)}, {"azimuth", axis_to_json(grid.azimuths, false)}};
}

AngleGrid angle_grid_from_json(const nlohmann::json &j)
{
    AngleGrid grid;
    try
    {
        grid.zeniths = axis_from_json(j.at("zenith"), true);
        grid.azimuths = axis_from_json(j.at("azimuth"), false);
    }
    catch (const nlohmann::json::exception &e)
    {
        fail(ErrorKind::Parse, std::string("grid config: ") + e.what());
    }
    grid.validate();
    return grid;
}

nlohmann::json to_json(const TargetSpec &spec)
{
    return {{"shape", to_string(spec.shape)},
            {"center_zenith", spec.center_zenith},
            {"center_azimuth", spec.center_azimuth},
            {"base_deg", spec.base_deg},
            {"height_deg", spec.height_deg},
            {"side_lobe_db", spec.side_lobe_db}};
}

TargetSpec target_spec_from_json(const nlohmann::json &j, TargetSpec base)
{
    if (!j.is_object())
        fail(ErrorKind::Parse, "target parameters must be a JSON object");
    try
    {
        if (j.contains("shape"))
            base.shape = target_shape_from_string(j.at("shape").get<std::string>());
        base.center_zenith = j.value("center_zenith", base.center_zenith);
        base.center_azimuth = j.value("center_azimuth", base.center_azimuth);
        base.base_deg = j.value("base_deg", base.base_deg);
        base.height_deg = j.value("height_deg", base.height_deg);
        base.side_lobe_db = j.value("side_lobe_db", base.side_lobe_db);
    }
    catch (const nlohmann::json::exception &e)
    {
        fail(ErrorKind::Parse, std::string("target parameters: ") + e.what());
    }
    base.validate();
    return base;
}

} // namespace patternbf
