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

#include "patternbf/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace patternbf
{

RegionMask segment_regions(const BeamPattern &target)
{
    RegionMask mask;
    const auto values = target.flat();
    mask.labels.resize(static_cast<std::size_t>(values.size()));
    for (Index c = 0; c < values.size(); ++c)
    {
        const double v = values(c);
        if (v >= kMainLobeThresholdDb)
        {
            mask.labels[c] = Region::MainLobe;
            mask.main_lobe.push_back(c);
        }
        else if (v < kSideLobeThresholdDb)
        {
            mask.labels[c] = Region::SideLobe;
            mask.side_lobe.push_back(c);
        }
        else
        {
            mask.labels[c] = Region::Moderate;
            mask.moderate.push_back(c);
        }
    }
    return mask;
}

std::string to_string(TargetShape shape)
{
    switch (shape)
    {
    case TargetShape::Pencil: return "pencil";
    case TargetShape::Triangular: return "triangular";
    case TargetShape::FlatTop: return "flattop";
    case TargetShape::FromBeamformer: return "from-beamformer";
    case TargetShape::FromFile: return "from-file";
    }
    return "unknown";
}

TargetShape target_shape_from_string(const std::string &name)
{
    if (name == "pencil") return TargetShape::Pencil;
    if (name == "triangular") return TargetShape::Triangular;
    if (name == "flattop" || name == "flat-top") return TargetShape::FlatTop;
    if (name == "from-beamformer") return TargetShape::FromBeamformer;
    if (name == "from-file") return TargetShape::FromFile;
    fail(ErrorKind::InvalidArgument, "unknown target shape '" + name + "'");
}

void TargetSpec::validate() const
{
    if (!std::isfinite(center_zenith) || !std::isfinite(center_azimuth))
        fail(ErrorKind::InvalidArgument, "target centre must be finite");
    if (!(side_lobe_db < kMainLobeThresholdDb) || side_lobe_db < kPatternFloorDb)
        fail(ErrorKind::InvalidArgument, "side-lobe level must lie in [-60, -10) dB");
    if (shape == TargetShape::Triangular || shape == TargetShape::FlatTop)
    {
        if (!(base_deg > 0.0) || !(height_deg > 0.0))
            fail(ErrorKind::InvalidArgument, "main-lobe base and height must be positive");
    }
}

namespace
{
bool inside(double lo, double hi, double first, double last)
{
    constexpr double kSlack = 1e-9;
    return lo >= first - kSlack && hi <= last + kSlack;
}

void check_geometry(const TargetSpec &spec, const AngleGrid &grid)
{
    double half_az = 0.0, half_zen = 0.0;
    if (spec.shape == TargetShape::Triangular || spec.shape == TargetShape::FlatTop)
    {
        half_az = spec.base_deg / 2.0;
        half_zen = spec.height_deg / 2.0;
    }
    if (!inside(spec.center_zenith - half_zen, spec.center_zenith + half_zen, grid.zeniths.front(),
                grid.zeniths.back()) ||
        !inside(spec.center_azimuth - half_az, spec.center_azimuth + half_az, grid.azimuths.front(),
                grid.azimuths.back()))
        fail(ErrorKind::InvalidArgument, "target main lobe does not fit inside the angle grid");
}

Index nearest(const std::vector<double> &axis, double value)
{
    const auto it = std::min_element(axis.begin(), axis.end(), [value](double a, double b) {
        return std::abs(a - value) < std::abs(b - value);
    });
    return static_cast<Index>(it - axis.begin());
}
} // namespace

std::vector<bool> shape_mask(const TargetSpec &spec, const AngleGrid &grid)
{
    spec.validate();
    grid.validate();
    check_geometry(spec, grid);

    const Index rows = grid.rows(), cols = grid.cols();
    std::vector<bool> mask(static_cast<std::size_t>(rows * cols), false);
    constexpr double kSlack = 1e-9;

    switch (spec.shape)
    {
    case TargetShape::Pencil:
        mask[nearest(grid.zeniths, spec.center_zenith) * cols + nearest(grid.azimuths, spec.center_azimuth)] =
            true;
        break;
    case TargetShape::Triangular: {
        const double base_zenith = spec.center_zenith - spec.height_deg / 2.0;
        for (Index i = 0; i < rows; ++i)
        {
            const double t = (grid.zeniths[i] - base_zenith) / spec.height_deg;
            if (t < -kSlack || t > 1.0 + kSlack)
                continue;
            const double half_width = spec.base_deg / 2.0 * (1.0 - t);
            for (Index j = 0; j < cols; ++j)
                if (std::abs(grid.azimuths[j] - spec.center_azimuth) <= half_width + kSlack)
                    mask[i * cols + j] = true;
        }
        break;
    }
    case TargetShape::FlatTop:
        for (Index i = 0; i < rows; ++i)
        {
            if (std::abs(grid.zeniths[i] - spec.center_zenith) > spec.height_deg / 2.0 + kSlack)
                continue;
            for (Index j = 0; j < cols; ++j)
                if (std::abs(grid.azimuths[j] - spec.center_azimuth) <= spec.base_deg / 2.0 + kSlack)
                    mask[i * cols + j] = true;
        }
        break;
    default:
        fail(ErrorKind::Unsupported, "shape '" + to_string(spec.shape) + "' has no geometric definition");
    }
    if (std::find(mask.begin(), mask.end(), true) == mask.end())
        fail(ErrorKind::InvalidArgument, "target main lobe covers no grid cell");
    return mask;
}

BeamPattern make_target(const TargetSpec &spec, const AngleGrid &grid)
{
    const std::vector<bool> core = shape_mask(spec, grid);
    const Index rows = grid.rows(), cols = grid.cols();

    BeamPattern target;
    target.grid = grid;
    target.values = PatternMatrix::Constant(rows, cols, spec.side_lobe_db);

    // Distance (grid cells) from each cell to the nearest core cell, searched
    // only within the taper radius.
    const auto reach = static_cast<Index>(std::ceil(kTargetTaperCells));
    PatternMatrix distance = PatternMatrix::Constant(rows, cols, std::numeric_limits<double>::infinity());
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
        {
            if (!core[i * cols + j])
                continue;
            distance(i, j) = 0.0;
            if (spec.shape == TargetShape::Pencil)
                continue;
            for (Index di = -reach; di <= reach; ++di)
                for (Index dj = -reach; dj <= reach; ++dj)
                {
                    const Index r = i + di, c = j + dj;
                    if (r < 0 || r >= rows || c < 0 || c >= cols)
                        continue;
                    const double d = std::hypot(double(di), double(dj));
                    distance(r, c) = std::min(distance(r, c), d);
                }
        }

    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
        {
            const double d = distance(i, j);
            if (d == 0.0)
                target.values(i, j) = 0.0;
            else if (d <= kTargetTaperCells + 1e-12)
                target.values(i, j) = kMainLobeThresholdDb * d / kTargetTaperCells;
        }
    return target;
}

BeamPattern target_from_beamformer(const ArrayConfig &cfg, const AngleGrid &grid, const CVectorXd &f)
{
    return compute_pattern(cfg, grid, f);
}

BeamPattern renormalize_pattern(PatternMatrix values, const AngleGrid &grid)
{
    grid.validate();
    if (values.rows() != grid.rows() || values.cols() != grid.cols())
        fail(ErrorKind::GridMismatch, "pattern shape does not match the grid");
    if (!values.allFinite())
        fail(ErrorKind::NonFinite, "pattern has non-finite entries");
    const double peak = values.maxCoeff();
    BeamPattern pattern;
    pattern.grid = grid;
    pattern.values = (values.array() - peak).max(kPatternFloorDb).matrix();
    return pattern;
}

} // namespace patternbf
