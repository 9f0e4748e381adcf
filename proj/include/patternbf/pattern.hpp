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

#ifndef PATTERNBF_PATTERN_HPP
#define PATTERNBF_PATTERN_HPP

#include "patternbf/array_engine.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace patternbf
{

inline constexpr double kMainLobeThresholdDb = -10.0;
inline constexpr double kSideLobeThresholdDb = -20.0;

/// Width, in grid cells, of the linear-in-dB edge taper on synthetic targets.
inline constexpr double kTargetTaperCells = 3.0;

enum class Region : std::uint8_t
{
    MainLobe,
    Moderate,
    SideLobe,
};

/// Partition of the grid cells (flat index i * W + j) into the three loss regions.
struct RegionMask
{
    std::vector<Region> labels;
    std::vector<Index> main_lobe;
    std::vector<Index> moderate;
    std::vector<Index> side_lobe;

    Index n_ml() const { return static_cast<Index>(main_lobe.size()); }
    Index n_md() const { return static_cast<Index>(moderate.size()); }
    Index n_sl() const { return static_cast<Index>(side_lobe.size()); }
    Index cells() const { return static_cast<Index>(labels.size()); }

    bool operator==(const RegionMask &) const = default;
};

/// Main lobe >= -10 dB, side lobe < -20 dB, moderate in between.
RegionMask segment_regions(const BeamPattern &target);

enum class TargetShape
{
    Pencil,
    Triangular,
    FlatTop,
    FromBeamformer,
    FromFile,
};

std::string to_string(TargetShape shape);
TargetShape target_shape_from_string(const std::string &name);

/*!
 * Synthetic target description.
 *
 * The main lobe is centred on (center_zenith, center_azimuth). For a triangle,
 * `base_deg` spans azimuth at the low-zenith edge and the apex lies `height_deg`
 * further along zenith; the centre is the middle of the bounding box. A
 * flat-top uses `base_deg` x `height_deg` as its azimuth x zenith extent.
 */
struct TargetSpec
{
    TargetShape shape = TargetShape::Pencil;
    double center_zenith = 90.0;
    double center_azimuth = 0.0;
    double base_deg = 0.0;
    double height_deg = 0.0;
    double side_lobe_db = -25.0;

    void validate() const;
};

/// Cells inside the nominal main-lobe shape (no taper), as a flat boolean mask.
std::vector<bool> shape_mask(const TargetSpec &spec, const AngleGrid &grid);

/// Builds a synthetic target; throws InvalidArgument when the geometry leaves the grid.
BeamPattern make_target(const TargetSpec &spec, const AngleGrid &grid);

/// Target equal to the pattern a given excitation produces.
BeamPattern target_from_beamformer(const ArrayConfig &cfg, const AngleGrid &grid, const CVectorXd &f);

/// Re-normalizes arbitrary dB values to peak 0 dB and applies the -60 dB floor.
BeamPattern renormalize_pattern(PatternMatrix values, const AngleGrid &grid);

} // namespace patternbf

#endif
