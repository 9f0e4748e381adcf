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


// Helpers shared by the unit and acceptance tests: seeded generators,
// a naive pattern evaluation and central finite differences.

#ifndef PATTERNBF_TEST_SUPPORT_HPP
#define PATTERNBF_TEST_SUPPORT_HPP

#include "patternbf/objective.hpp"
#include "patternbf/pattern.hpp"
#include "patternbf/synthesis.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace patternbf::testing
{

inline CVectorXd random_complex(Index n, std::mt19937_64 &rng, bool unit = true)
{
    std::normal_distribution<double> g(0.0, 1.0);
    CVectorXd v(n);
    for (Index k = 0; k < n; ++k)
    {
        const double re = g(rng);
        const double im = g(rng);
        v(k) = cd(re, im);
    }
    return unit ? CVectorXd(v / v.norm()) : v;
}

inline double uniform(std::mt19937_64 &rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Coarse grid for small arrays: zenith 2..178, azimuth -88..88, 2 deg steps.
inline AngleGrid coarse_grid() { return AngleGrid::uniform(2.0, 178.0, 2.0, -88.0, 88.0, 2.0); }

/// The array factor summed term by term, then peak-normalized and floored.
inline PatternMatrix naive_pattern_db(const ArrayConfig &cfg, const AngleGrid &grid, const CVectorXd &f)
{
    const double k = 2.0 * kPi / cfg.wavelength;
    PatternMatrix mag(grid.rows(), grid.cols());
    for (Index i = 0; i < grid.rows(); ++i)
        for (Index j = 0; j < grid.cols(); ++j)
        {
            const double th = grid.zeniths[i] * kPi / 180.0;
            const double ph = grid.azimuths[j] * kPi / 180.0;
            cd sum = 0.0;
            for (Index m = 0; m < cfg.n_y; ++m)
                for (Index n = 0; n < cfg.n_z; ++n)
                {
                    const double phase = k * cfg.spacing *
                                         (static_cast<double>(m) * std::sin(th) * std::sin(ph) +
                                          static_cast<double>(n) * std::cos(th));
                    sum += f(m * cfg.n_z + n) * cd(std::cos(phase), std::sin(phase));
                }
            mag(i, j) = std::abs(sum);
        }
    const double peak = mag.maxCoeff();
    PatternMatrix db(grid.rows(), grid.cols());
    for (Index i = 0; i < grid.rows(); ++i)
        for (Index j = 0; j < grid.cols(); ++j)
            db(i, j) = std::max(-60.0, 20.0 * std::log10(mag(i, j) / peak));
    return db;
}

/// Central differences of `fn` at `x` with absolute step `h`.
inline VectorXd central_differences(const std::function<double(const VectorXd &)> &fn, const VectorXd &x,
                                    double h = 1e-5)
{
    VectorXd out(x.size());
    VectorXd probe = x;
    for (Index k = 0; k < x.size(); ++k)
    {
        probe(k) = x(k) + h;
        const double up = fn(probe);
        probe(k) = x(k) - h;
        const double down = fn(probe);
        probe(k) = x(k);
        out(k) = (up - down) / (2.0 * h);
    }
    return out;
}

/// Richardson extrapolation of central differences at h and h/2 (fourth-order accurate).
inline VectorXd richardson_differences(const std::function<double(const VectorXd &)> &fn, const VectorXd &x,
                                       double h = 1e-5)
{
    const VectorXd coarse = central_differences(fn, x, h);
    const VectorXd fine = central_differences(fn, x, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

/*!
 * Largest per-partial relative error. Partials far below the gradient's
 * scale are compared against 1e-3 of its largest entry, since their finite
 * difference carries only absolute accuracy.
 */
inline double max_relative_error(const VectorXd &analytic, const VectorXd &numeric)
{
    const double scale = 1e-3 * numeric.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (Index k = 0; k < numeric.size(); ++k)
    {
        const double denom = std::max(std::abs(numeric(k)), scale);
        if (denom > 0.0)
            worst = std::max(worst, std::abs(analytic(k) - numeric(k)) / denom);
    }
    return worst;
}

struct GradientInstance
{
    ArrayConfig cfg;
    std::shared_ptr<PatternObjective> objective;
    Beamformer bf;
};

// Instances that sit on a kink of the loss (a near-tied peak cell or a
// main-lobe/moderate cell at the floor) are redrawn and counted in `rejected`.
inline GradientInstance differentiable_instance(Architecture arch, Index n, const AngleGrid &grid,
                                               std::mt19937_64 &rng, int *rejected = nullptr)
{
    const ArrayConfig cfg = ArrayConfig::ura(n, n, 2);
    const auto op = std::make_shared<const PatternOperator<double>>(cfg, grid);
    while (true)
    {
        BeamPattern target;
        if (rng() % 2 == 0)
            target = target_from_beamformer(cfg, grid, random_complex(cfg.n_t(), rng));
        else
            target = make_target(TargetSpec{TargetShape::FlatTop, 90.0 + uniform(rng, -30, 30), uniform(rng, -30, 30),
                                            30.0, 20.0, -25.0},
                                 grid);
        auto objective = std::make_shared<PatternObjective>(op, target, segment_regions(target));
        Beamformer bf = random_beamformer(arch, cfg, rng);
        const CVectorXd g = op->response(realize(bf, cfg));
        const VectorXd mag = g.cwiseAbs();
        Index peak_cell = 0;
        const double peak = mag.maxCoeff(&peak_cell);
        bool kink = false;
        for (Index c = 0; c < mag.size() && !kink; ++c)
        {
            if (c != peak_cell && (peak - mag(c)) < 1e-4 * peak)
                kink = true;
            const double db = 20.0 * std::log10(mag(c) / peak);
            if (objective->mask().labels[c] != Region::SideLobe && std::abs(db - kPatternFloorDb) < 0.5)
                kink = true;
        }
        if (!kink)
            return {cfg, objective, bf};
        if (rejected)
            ++*rejected;
    }
}

/// Fourth-order finite-difference gradient of the objective in the beamformer's parameter layout.
inline VectorXd numeric_gradient(const PatternObjective &objective, const Beamformer &bf)
{
    const ParameterLayout layout = parameter_layout(bf);
    return richardson_differences(
        [&](const VectorXd &p) { return objective.evaluate(unpack_parameters(layout, p), nullptr).total; },
        pack_parameters(bf));
}

} // namespace patternbf::testing

#endif
