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

#ifndef PATTERNBF_OBJECTIVE_HPP
#define PATTERNBF_OBJECTIVE_HPP

#include "patternbf/beamformer.hpp"
#include "patternbf/pattern.hpp"

#include <memory>

namespace patternbf
{

/// Region-wise pattern discrepancy in dB^2; total = l_ml + l_sl + l_md.
struct LossBreakdown
{
    double l_ml = 0.0;
    double l_sl = 0.0;
    double l_md = 0.0;
    double total = 0.0;
};

/// Bit flags selecting loss components.
enum LossTerm : unsigned
{
    kMainLobeTerm = 1u,
    kSideLobeTerm = 2u,
    kModerateTerm = 4u,
    kAllTerms = 7u,
};

/// Mean squared dB difference over all cells.
double pattern_mse(const BeamPattern &a, const BeamPattern &b);

/*!
 * Composite pattern loss.
 *
 * Main lobe and moderate cells use the squared dB error, side-lobe cells only
 * the squared exceedance max(0, synth - target). Each term is averaged over
 * its own region; an empty region contributes zero.
 */
LossBreakdown composite_loss(const BeamPattern &target, const BeamPattern &synth, const RegionMask &mask);

/// Partial derivatives of the selected loss terms, one per beamformer parameter.
struct GradientVector
{
    VectorXd values;
    LossBreakdown loss;
};

/*!
 * Composite loss of a fixed target as a differentiable function of the excitation.
 *
 * The pattern is peak-normalized, so the loss depends on the peak cell as well
 * as on each cell; the gradient includes the peak's contribution (the argmax
 * is locally constant). Cells below the -60 dB floor have zero gradient.
 */
class PatternObjective
{
  public:
    PatternObjective(std::shared_ptr<const PatternOperator<double>> op, BeamPattern target, RegionMask mask,
                     unsigned terms = kAllTerms);
    PatternObjective(const ArrayConfig &cfg, BeamPattern target, unsigned terms = kAllTerms);

    LossBreakdown loss(const CVectorXd &f) const;

    /// Loss and dL/dRe f + j dL/dIm f at excitation f.
    LossBreakdown loss_and_gradient(const CVectorXd &f, CVectorXd &grad_f) const;

    /// Loss of a beamformer and, when `grad` is given, the gradient in its parameter layout.
    LossBreakdown evaluate(const Beamformer &bf, VectorXd *grad) const;

    /// Peak-normalized pattern of excitation f on the objective's grid.
    BeamPattern synthesize(const CVectorXd &f) const;

    const BeamPattern &target() const { return target_; }
    const RegionMask &mask() const { return mask_; }
    const PatternOperator<double> &op() const { return *op_; }
    std::shared_ptr<const PatternOperator<double>> shared_op() const { return op_; }

  private:
    LossBreakdown accumulate(const VectorXd &synth_db, VectorXd *dloss_ddb) const;

    std::shared_ptr<const PatternOperator<double>> op_;
    BeamPattern target_;
    RegionMask mask_;
    unsigned terms_;
};

GradientVector loss_gradient(const ArrayConfig &cfg, const AngleGrid &grid, const BeamPattern &target,
                             const RegionMask &mask, const Beamformer &bf, unsigned terms = kAllTerms);

} // namespace patternbf

#endif
