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

#ifndef PATTERNBF_ARRAY_ENGINE_HPP
#define PATTERNBF_ARRAY_ENGINE_HPP

#include "patternbf/common.hpp"

#include <cmath>
#include <new>
#include <vector>

namespace patternbf
{

/// Pattern values are clamped to this level (dB below the peak).
inline constexpr double kPatternFloorDb = -60.0;

/*!
 * Uniform rectangular array in the y-z plane.
 *
 * Element l = m * n_z + n (0-based) sits at horizontal index m and vertical
 * index n. All phases use the wavenumber 2 pi / wavelength and the common
 * spacing in both axes.
 */
struct ArrayConfig
{
    Index n_y = 16;
    Index n_z = 16;
    double spacing = 0.0;    // meters
    double wavelength = 0.0; // meters
    Index n_rf = 2;

    Index n_t() const { return n_y * n_z; }
    double wavenumber() const { return 2.0 * kPi / wavelength; }

    /// Throws InvalidArgument on any violated invariant.
    void validate() const;

    /// 28 GHz carrier, half-wavelength spacing.
    static ArrayConfig ura(Index n_y, Index n_z, Index n_rf = 1);

    /// 16 x 16 elements, two RF chains.
    static ArrayConfig standard() { return ura(16, 16, 2); }

    bool operator==(const ArrayConfig &) const = default;
};

/// Sampled zenith/azimuth directions in degrees. Rows index zenith, columns azimuth.
struct AngleGrid
{
    std::vector<double> zeniths;
    std::vector<double> azimuths;

    Index rows() const { return static_cast<Index>(zeniths.size()); }
    Index cols() const { return static_cast<Index>(azimuths.size()); }
    Index cells() const { return rows() * cols(); }

    void validate() const;

    /// Inclusive ranges; both must be exactly reachable from the start in whole steps.
    static AngleGrid uniform(double zenith_first, double zenith_last, double zenith_step,
                             double azimuth_first, double azimuth_last, double azimuth_step);

    /// Zenith 1..180 deg, azimuth -89..90 deg, 1 deg step (180 x 180).
    static AngleGrid standard();

    bool operator==(const AngleGrid &) const = default;
};

/// Peak-normalized dB pattern on an angle grid: max entry 0 dB, floor -60 dB.
struct BeamPattern
{
    PatternMatrix values;
    AngleGrid grid;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }
    Index cells() const { return values.size(); }

    /// Flat row-major view, cell c = i * W + j.
    Eigen::Map<const VectorXd> flat() const { return {values.data(), values.size()}; }

    void validate() const;
};

/// Throws GridMismatch unless both patterns share the same grid and shape.
void require_same_grid(const BeamPattern &a, const BeamPattern &b);

namespace detail
{
template <typename Scalar>
Scalar steering_phase(Scalar kd, Index m, Index n, Scalar sin_zen_sin_az, Scalar cos_zen)
{
    return kd * (Scalar(m) * sin_zen_sin_az + Scalar(n) * cos_zen);
}
} // namespace detail

/// Array response to direction (zenith, azimuth) in degrees; unit-modulus entries.
template <typename Scalar = double>
CVector<Scalar> steering_vector(const ArrayConfig &cfg, double zenith_deg, double azimuth_deg)
{
    const Scalar kd = Scalar(cfg.wavenumber() * cfg.spacing);
    const Scalar zen = Scalar(deg2rad(zenith_deg));
    const Scalar az = Scalar(deg2rad(azimuth_deg));
    const Scalar ss = std::sin(zen) * std::sin(az);
    const Scalar cz = std::cos(zen);

    CVector<Scalar> a(cfg.n_t());
    for (Index m = 0; m < cfg.n_y; ++m)
        for (Index n = 0; n < cfg.n_z; ++n)
            a(m * cfg.n_z + n) = std::polar(Scalar(1), detail::steering_phase(kd, m, n, ss, cz));
    return a;
}

/// n_t x (H*W) matrix whose column i * W + j is the steering vector of grid cell (i, j).
template <typename Scalar = double>
struct SteeringMatrix
{
    CMatrix<Scalar> entries;

    Index n_t() const { return entries.rows(); }
    Index cells() const { return entries.cols(); }
};

template <typename Scalar = double>
SteeringMatrix<Scalar> build_steering_matrix(const ArrayConfig &cfg, const AngleGrid &grid)
{
    cfg.validate();
    grid.validate();
    SteeringMatrix<Scalar> A;
    try
    {
        A.entries.resize(cfg.n_t(), grid.cells());
    }
    catch (const std::bad_alloc &)
    {
        fail(ErrorKind::Resource, "cannot allocate steering matrix");
    }
    for (Index i = 0; i < grid.rows(); ++i)
        for (Index j = 0; j < grid.cols(); ++j)
            A.entries.col(i * grid.cols() + j) =
                steering_vector<Scalar>(cfg, grid.zeniths[i], grid.azimuths[j]);
    return A;
}

/*!
 * Far-field response operator of a URA over an angle grid.
 *
 * The steering phase splits into a zenith-only part (vertical index n) and a
 * per-cell part (horizontal index m), so the response g = A^T f costs
 * O(n_t * H + n_y * H * W) instead of O(n_t * H * W). The adjoint applies
 * conj(A) and is used by the loss gradient.
 */
template <typename Scalar = double>
class PatternOperator
{
  public:
    PatternOperator(const ArrayConfig &cfg, const AngleGrid &grid)
        : n_y_(cfg.n_y), n_z_(cfg.n_z), rows_(grid.rows()), cols_(grid.cols())
    {
        cfg.validate();
        grid.validate();
        const Scalar kd = Scalar(cfg.wavenumber() * cfg.spacing);
        zenith_phase_.resize(n_z_, rows_);
        azimuth_phase_.resize(n_y_, rows_ * cols_);
        for (Index i = 0; i < rows_; ++i)
        {
            const Scalar zen = Scalar(deg2rad(grid.zeniths[i]));
            const Scalar cz = std::cos(zen);
            for (Index n = 0; n < n_z_; ++n)
                zenith_phase_(n, i) = std::polar(Scalar(1), kd * Scalar(n) * cz);
            for (Index j = 0; j < cols_; ++j)
            {
                const Scalar ss = std::sin(zen) * std::sin(Scalar(deg2rad(grid.azimuths[j])));
                for (Index m = 0; m < n_y_; ++m)
                    azimuth_phase_(m, i * cols_ + j) = std::polar(Scalar(1), kd * Scalar(m) * ss);
            }
        }
    }

    Index n_t() const { return n_y_ * n_z_; }
    Index cells() const { return rows_ * cols_; }
    Index rows() const { return rows_; }
    Index cols() const { return cols_; }

    /// g_c = sum_l f_l a_{c,l}.
    CVector<Scalar> response(const CVector<Scalar> &f) const
    {
        if (f.size() != n_t())
            fail(ErrorKind::InvalidArgument, "beamforming vector length does not match the array");
        Eigen::Map<const CMatrix<Scalar>> weights(f.data(), n_z_, n_y_);
        const CMatrix<Scalar> partial = weights.transpose() * zenith_phase_; // n_y x H
        CVector<Scalar> g(cells());
        for (Index i = 0; i < rows_; ++i)
            g.segment(i * cols_, cols_).noalias() =
                azimuth_phase_.middleCols(i * cols_, cols_).transpose() * partial.col(i);
        return g;
    }

    /// d_l = sum_c r_c conj(a_{c,l}).
    CVector<Scalar> adjoint(const CVector<Scalar> &r) const
    {
        if (r.size() != cells())
            fail(ErrorKind::InvalidArgument, "cell weight vector length does not match the grid");
        CMatrix<Scalar> partial(n_y_, rows_);
        for (Index i = 0; i < rows_; ++i)
            partial.col(i).noalias() =
                azimuth_phase_.middleCols(i * cols_, cols_).conjugate() * r.segment(i * cols_, cols_);
        const CMatrix<Scalar> d = zenith_phase_.conjugate() * partial.transpose(); // n_z x n_y
        return Eigen::Map<const CVector<Scalar>>(d.data(), d.size());
    }

  private:
    Index n_y_, n_z_, rows_, cols_;
    CMatrix<Scalar> zenith_phase_;  // n_z x H
    CMatrix<Scalar> azimuth_phase_; // n_y x (H*W)
};

/// Converts raw response magnitudes to a peak-normalized, floored dB pattern.
BeamPattern magnitudes_to_pattern(const VectorXd &magnitudes, const AngleGrid &grid);

/// Far-field pattern of excitation f: 20 log10(|g| / max |g|), floored at -60 dB.
BeamPattern compute_pattern(const ArrayConfig &cfg, const AngleGrid &grid, const CVectorXd &f);

/// Same as above with a prebuilt operator, for repeated evaluation on one grid.
BeamPattern compute_pattern(const PatternOperator<double> &op, const AngleGrid &grid,
                            const CVectorXd &f);

} // namespace patternbf

#endif
