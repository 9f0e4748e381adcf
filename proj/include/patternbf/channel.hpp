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

#ifndef PATTERNBF_CHANNEL_HPP
#define PATTERNBF_CHANNEL_HPP

#include "patternbf/array_engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace patternbf
{

/// One propagation path: complex gain and angle of departure in degrees.
struct PathParams
{
    cd gain;
    double zenith_deg = 90.0;
    double azimuth_deg = 0.0;
};

/// Downlink MISO channel h; when paths are known, h = sum_p gain_p conj(a(zenith_p, azimuth_p)).
struct Channel
{
    CVectorXd h;
    std::vector<PathParams> paths;
};

/// h assembled from path parameters.
CVectorXd channel_from_paths(const ArrayConfig &cfg, const std::vector<PathParams> &paths);

/*!
 * Clustered geometric mmWave channel model.
 *
 * Each channel draws a path count uniformly from [min_paths, max_paths] and a
 * cluster count uniformly from [1, min(paths, max_clusters)]. Cluster centres
 * are uniform over the angular sector; path p joins cluster p mod C and, unless
 * it is the cluster's first path, is offset by a Laplacian with standard
 * deviation `angle_spread_deg` on each axis. Path p carries mean power
 * 10^(-decay_db_per_path p / 10) with a circular complex Gaussian gain; with
 * probability `los_probability` path 0 is a line-of-sight path of fixed
 * amplitude and uniform phase.
 */
struct ChannelModelConfig
{
    int min_paths = 3;
    int max_paths = 5;
    int max_clusters = 3;
    double los_probability = 0.0;
    double decay_db_per_path = 8.0;
    double angle_spread_deg = 5.0;
    double zenith_min = 1.0;
    double zenith_max = 180.0;
    double azimuth_min = -89.0;
    double azimuth_max = 90.0;
    std::uint64_t seed = 0;

    void validate() const;
};

nlohmann::json to_json(const ChannelModelConfig &model);
ChannelModelConfig channel_model_from_json(const nlohmann::json &j, ChannelModelConfig base = {});

/// Deterministic under `model.seed`; channel k uses its own derived stream.
std::vector<Channel> generate_channels(const ArrayConfig &cfg, const ChannelModelConfig &model, std::size_t count);

/// One row per channel, 2 n_t columns with Re/Im interleaved, shortest round-trip decimals.
void save_channels(const std::filesystem::path &csv, const std::vector<Channel> &channels,
                   const std::optional<std::filesystem::path> &sidecar = std::nullopt);

/*!
 * Reads a channel CSV and, when given, its JSON path sidecar
 * ([[{gain_re, gain_im, zenith_deg, azimuth_deg}, ...], ...], one list per row).
 * Throws Parse with the row and column of a bad value, InvalidArgument when
 * `expected_n_t` is set and differs, DegenerateInput for an all-zero row.
 */
std::vector<Channel> load_channels(const std::filesystem::path &csv,
                                   const std::optional<std::filesystem::path> &sidecar = std::nullopt,
                                   std::optional<Index> expected_n_t = std::nullopt);

} // namespace patternbf

#endif
