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

#include "patternbf/array_engine.hpp"

#include <algorithm>

namespace patternbf
{

namespace
{
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kStandardCarrierHz = 28e9;

void check_axis(const std::vector<double> &axis, const char *name)
{
    if (axis.empty())
        fail(ErrorKind::InvalidArgument, std::string(name) + " axis is empty");
    for (std::size_t k = 0; k < axis.size(); ++k)
    {
        if (!std::isfinite(axis[k]))
            fail(ErrorKind::InvalidArgument, std::string(name) + " axis has a non-finite angle");
        if (k > 0 && !(axis[k] > axis[k - 1]))
            fail(ErrorKind::InvalidArgument, std::string(name) + " axis must be strictly increasing");
    }
}

std::vector<double> linear_axis(double first, double last, double step, const char *name)
{
    if (!(step > 0.0) || !(last >= first))
        fail(ErrorKind::InvalidArgument, std::string(name) + " range is empty or step is not positive");
    const double span = (last - first) / step;
    const auto count = static_cast<std::size_t>(std::llround(span)) + 1;
    if (std::abs(span - std::round(span)) > 1e-9)
        fail(ErrorKind::InvalidArgument, std::string(name) + " range is not a whole number of steps");
    std::vector<double> axis(count);
    for (std::size_t k = 0; k < count; ++k)
        axis[k] = first + static_cast<double>(k) * step;
    return axis;
}
} // namespace

void ArrayConfig::validate() const
{
    if (n_y < 1 || n_z < 1)
        fail(ErrorKind::InvalidArgument, "array needs at least one element per axis");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        fail(ErrorKind::InvalidArgument, "element spacing must be positive");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
        fail(ErrorKind::InvalidArgument, "wavelength must be positive");
    if (n_rf < 1 || n_rf > n_t())
        fail(ErrorKind::InvalidArgument, "RF chain count must lie in [1, n_t]");
}

ArrayConfig ArrayConfig::ura(Index n_y, Index n_z, Index n_rf)
{
    ArrayConfig cfg;
    cfg.n_y = n_y;
    cfg.n_z = n_z;
    cfg.wavelength = kSpeedOfLight / kStandardCarrierHz;
    cfg.spacing = cfg.wavelength / 2.0;
    cfg.n_rf = n_rf;
    cfg.validate();
    return cfg;
}

void AngleGrid::validate() const
{
    check_axis(zeniths, "zenith");
    check_axis(azimuths, "azimuth");
}

AngleGrid AngleGrid::uniform(double zenith_first, double zenith_last, double zenith_step,
                             double azimuth_first, double azimuth_last, double azimuth_step)
{
    AngleGrid grid;
    grid.zeniths = linear_axis(zenith_first, zenith_last, zenith_step, "zenith");
    grid.azimuths = linear_axis(azimuth_first, azimuth_last, azimuth_step, "azimuth");
    return grid;
}

AngleGrid AngleGrid::standard()
{
    return uniform(1.0, 180.0, 1.0, -89.0, 90.0, 1.0);
}

void BeamPattern::validate() const
{
    grid.validate();
    if (values.rows() != grid.rows() || values.cols() != grid.cols())
        fail(ErrorKind::GridMismatch, "pattern shape does not match its grid");
    if (!values.allFinite())
        fail(ErrorKind::NonFinite, "pattern has non-finite entries");
    if (values.maxCoeff() != 0.0 || values.minCoeff() < kPatternFloorDb)
        fail(ErrorKind::InvalidArgument, "pattern must peak at 0 dB and stay above the -60 dB floor");
}

void require_same_grid(const BeamPattern &a, const BeamPattern &b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols() || !(a.grid == b.grid))
        fail(ErrorKind::GridMismatch, "patterns are sampled on different grids");
}

BeamPattern magnitudes_to_pattern(const VectorXd &magnitudes, const AngleGrid &grid)
{
    if (magnitudes.size() != grid.cells())
        fail(ErrorKind::GridMismatch, "magnitude count does not match the grid");
    if (!magnitudes.allFinite())
        fail(ErrorKind::NonFinite, "pattern has non-finite magnitudes");
    const double peak = magnitudes.maxCoeff();
    if (!(peak > 0.0))
        fail(ErrorKind::DegenerateInput, "pattern has no radiated power");

    BeamPattern pattern;
    pattern.grid = grid;
    pattern.values.resize(grid.rows(), grid.cols());
    Eigen::Map<VectorXd> out(pattern.values.data(), pattern.values.size());
    for (Index c = 0; c < magnitudes.size(); ++c)
    {
        const double db = 20.0 * std::log10(magnitudes(c) / peak);
        out(c) = std::max(db, kPatternFloorDb);
    }
    return pattern;
}

BeamPattern compute_pattern(const PatternOperator<double> &op, const AngleGrid &grid,
                            const CVectorXd &f)
{
    if (op.rows() != grid.rows() || op.cols() != grid.cols())
        fail(ErrorKind::GridMismatch, "pattern operator was built for another grid");
    if (f.size() != op.n_t())
        fail(ErrorKind::InvalidArgument, "beamforming vector length does not match the array");
    if (f.isZero(0.0))
        fail(ErrorKind::DegenerateInput, "beamforming vector is identically zero");
    return magnitudes_to_pattern(op.response(f).cwiseAbs(), grid);
}

BeamPattern compute_pattern(const ArrayConfig &cfg, const AngleGrid &grid, const CVectorXd &f)
{
    return compute_pattern(PatternOperator<double>(cfg, grid), grid, f);
}

} // namespace patternbf
