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

#include "patternbf/channel.hpp"

#include "patternbf/io.hpp"
#include "patternbf/synthesis.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace patternbf
{

CVectorXd channel_from_paths(const ArrayConfig &cfg, const std::vector<PathParams> &paths)
{
    CVectorXd h = CVectorXd::Zero(cfg.n_t());
    for (const auto &p : paths)
        h += p.gain * steering_vector(cfg, p.zenith_deg, p.azimuth_deg).conjugate();
    return h;
}

void ChannelModelConfig::validate() const
{
    if (min_paths < 1 || max_paths < min_paths)
        fail(ErrorKind::InvalidArgument, "path count range must satisfy 1 <= min <= max");
    if (max_clusters < 1)
        fail(ErrorKind::InvalidArgument, "cluster count must be at least 1");
    if (!(los_probability >= 0.0 && los_probability <= 1.0))
        fail(ErrorKind::InvalidArgument, "LOS probability must lie in [0, 1]");
    if (!(decay_db_per_path >= 0.0) || !(angle_spread_deg >= 0.0))
        fail(ErrorKind::InvalidArgument, "decay and angle spread must be non-negative");
    if (!(zenith_max >= zenith_min) || !(azimuth_max >= azimuth_min))
        fail(ErrorKind::InvalidArgument, "angular sector is empty");
}

nlohmann::json to_json(const ChannelModelConfig &model)
{
    return {{"min_paths", model.min_paths},
            {"max_paths", model.max_paths},
            {"max_clusters", model.max_clusters},
            {"los_probability", model.los_probability},
            {"decay_db_per_path", model.decay_db_per_path},
            {"angle_spread_deg", model.angle_spread_deg},
            {"zenith_min", model.zenith_min},
            {"zenith_max", model.zenith_max},
            {"azimuth_min", model.azimuth_min},
            {"azimuth_max", model.azimuth_max},
            {"seed", model.seed}};
}

ChannelModelConfig channel_model_from_json(const nlohmann::json &j, ChannelModelConfig base)
{
    if (!j.is_object())
        fail(ErrorKind::Parse, "channel model config must be a JSON object");
    try
    {
        base.min_paths = j.value("min_paths", base.min_paths);
        base.max_paths = j.value("max_paths", base.max_paths);
        base.max_clusters = j.value("max_clusters", base.max_clusters);
        base.los_probability = j.value("los_probability", base.los_probability);
        base.decay_db_per_path = j.value("decay_db_per_path", base.decay_db_per_path);
        base.angle_spread_deg = j.value("angle_spread_deg", base.angle_spread_deg);
        base.zenith_min = j.value("zenith_min", base.zenith_min);
        base.zenith_max = j.value("zenith_max", base.zenith_max);
        base.azimuth_min = j.value("azimuth_min", base.azimuth_min);
        base.azimuth_max = j.value("azimuth_max", base.azimuth_max);
        base.seed = j.value("seed", base.seed);
    }
    catch (const nlohmann::json::exception &e)
    {
        fail(ErrorKind::Parse, std::string("channel model config: ") + e.what());
    }
    base.validate();
    return base;
}

namespace
{
Channel draw_channel(const ArrayConfig &cfg, const ChannelModelConfig &model, std::mt19937_64 &rng)
{
    std::uniform_int_distribution<int> path_count(model.min_paths, model.max_paths);
    const int paths = path_count(rng);
    std::uniform_int_distribution<int> cluster_count(1, std::min(paths, model.max_clusters));
    const int clusters = cluster_count(rng);

    std::uniform_real_distribution<double> zenith(model.zenith_min, model.zenith_max);
    std::uniform_real_distribution<double> azimuth(model.azimuth_min, model.azimuth_max);
    std::vector<std::pair<double, double>> centers;
    for (int c = 0; c < clusters; ++c)
    {
        const double z = zenith(rng);
        const double a = azimuth(rng);
        centers.emplace_back(z, a);
    }

    // Laplacian with standard deviation `spread`: scale spread / sqrt(2).
    const double scale = model.angle_spread_deg / std::sqrt(2.0);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    auto laplace = [&]() {
        if (scale == 0.0)
            return 0.0;
        const double u = unit(rng);
        return -scale * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
    };

    std::bernoulli_distribution los(model.los_probability);
    const bool line_of_sight = los(rng);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);

    Channel ch;
    for (int p = 0; p < paths; ++p)
    {
        const auto [cz, ca] = centers[static_cast<std::size_t>(p % clusters)];
        PathParams path;
        path.zenith_deg = cz;
        path.azimuth_deg = ca;
        if (p >= clusters)
        {
            const double dz = laplace();
            const double da = laplace();
            path.zenith_deg = std::clamp(cz + dz, model.zenith_min, model.zenith_max);
            path.azimuth_deg = std::clamp(ca + da, model.azimuth_min, model.azimuth_max);
        }
        const double amplitude = std::pow(10.0, -model.decay_db_per_path * p / 20.0);
        if (p == 0 && line_of_sight)
        {
            path.gain = std::polar(amplitude, phase(rng));
        }
        else
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            path.gain = amplitude * cd(re, im);
        }
        if (path.gain == cd(0.0, 0.0))
            path.gain = cd(amplitude * 1e-12, 0.0);
        ch.paths.push_back(path);
    }
    ch.h = channel_from_paths(cfg, ch.paths);
    return ch;
}
} // namespace

std::vector<Channel> generate_channels(const ArrayConfig &cfg, const ChannelModelConfig &model, std::size_t count)
{
    cfg.validate();
    model.validate();
    std::vector<Channel> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
    {
        std::mt19937_64 rng(derive_seed(model.seed, k));
        out.push_back(draw_channel(cfg, model, rng));
    }
    return out;
}

void save_channels(const std::filesystem::path &csv, const std::vector<Channel> &channels,
                   const std::optional<std::filesystem::path> &sidecar)
{
    std::string text;
    for (const auto &ch : channels)
    {
        for (Index l = 0; l < ch.h.size(); ++l)
        {
            if (l > 0)
                text += ',';
            text += format_double(ch.h(l).real());
            text += ',';
            text += format_double(ch.h(l).imag());
        }
        text += '\n';
    }
    write_text_file(csv, text);

    if (sidecar)
    {
        nlohmann::json all = nlohmann::json::array();
        for (const auto &ch : channels)
        {
            nlohmann::json paths = nlohmann::json::array();
            for (const auto &p : ch.paths)
                paths.push_back({{"gain_re", p.gain.real()},
                                 {"gain_im", p.gain.imag()},
                                 {"zenith_deg", p.zenith_deg},
                                 {"azimuth_deg", p.azimuth_deg}});
            all.push_back(paths);
        }
        write_json_file(*sidecar, all);
    }
}

std::vector<Channel> load_channels(const std::filesystem::path &csv, const std::optional<std::filesystem::path> &sidecar,
                                   std::optional<Index> expected_n_t)
{
    const std::string text = read_text_file(csv);
    std::vector<Channel> out;
    std::istringstream lines(text);
    std::string line;
    std::size_t row = 0;
    while (std::getline(lines, line))
    {
        ++row;
        if (line.empty() || line == "\r")
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() % 2 != 0)
            fail(ErrorKind::Parse, csv.string() + " row " + std::to_string(row) +
                                       ": odd number of columns; expected Re/Im pairs");
        const auto n_t = static_cast<Index>(fields.size() / 2);
        if (expected_n_t && n_t != *expected_n_t)
            fail(ErrorKind::InvalidArgument, csv.string() + " row " + std::to_string(row) + " has " +
                                                 std::to_string(n_t) + " antennas, expected " +
                                                 std::to_string(*expected_n_t));
        if (!out.empty() && out.front().h.size() != n_t)
            fail(ErrorKind::Parse, csv.string() + " row " + std::to_string(row) + ": inconsistent column count");
        Channel ch;
        ch.h.resize(n_t);
        for (Index l = 0; l < n_t; ++l)
        {
            const auto where = [&](Index col) {
                return csv.string() + " row " + std::to_string(row) + " column " + std::to_string(col + 1);
            };
            const double re = parse_double(fields[static_cast<std::size_t>(2 * l)], where(2 * l));
            const double im = parse_double(fields[static_cast<std::size_t>(2 * l + 1)], where(2 * l + 1));
            ch.h(l) = cd(re, im);
        }
        if (!ch.h.allFinite())
            fail(ErrorKind::Parse, csv.string() + " row " + std::to_string(row) + " has non-finite entries");
        if (ch.h.isZero(0.0))
            fail(ErrorKind::DegenerateInput, csv.string() + " row " + std::to_string(row) + " is an all-zero channel");
        out.push_back(std::move(ch));
    }

    if (sidecar)
    {
        const nlohmann::json meta = read_json_file(*sidecar);
        if (!meta.is_array() || meta.size() != out.size())
            fail(ErrorKind::Parse, "path sidecar must list one path array per channel row");
        try
        {
            for (std::size_t k = 0; k < out.size(); ++k)
                for (const auto &p : meta[k])
                    out[k].paths.push_back({cd(p.at("gain_re").get<double>(), p.at("gain_im").get<double>()),
                                            p.at("zenith_deg").get<double>(), p.at("azimuth_deg").get<double>()});
        }
        catch (const nlohmann::json::exception &e)
        {
            fail(ErrorKind::Parse, "path sidecar: " + std::string(e.what()));
        }
    }
    return out;
}

} // namespace patternbf
