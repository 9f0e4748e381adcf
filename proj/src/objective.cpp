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

#include "patternbf/objective.hpp"

#include <cmath>

namespace patternbf
{

double pattern_mse(const BeamPattern &a, const BeamPattern &b)
{
    require_same_grid(a, b);
    return (a.values - b.values).squaredNorm() / static_cast<double>(a.cells());
}

namespace
{
void check_mask(const RegionMask &mask, Index cells)
{
    if (mask.cells() != cells)
        fail(ErrorKind::GridMismatch, "region mask was built for another grid");
}

// Shared by composite_loss and the objective so both report identical numbers.
LossBreakdown region_loss(const Eigen::Ref<const VectorXd> &target, const Eigen::Ref<const VectorXd> &synth,
                          const RegionMask &mask, unsigned terms, VectorXd *dloss)
{
    LossBreakdown out;
    if (dloss)
        dloss->setZero(target.size());

    auto squared_error = [&](const std::vector<Index> &cells, bool hinge) {
        if (cells.empty())
            return 0.0;
        const double inv = 1.0 / static_cast<double>(cells.size());
        double sum = 0.0;
        for (const Index c : cells)
        {
            double e = synth(c) - target(c);
            if (hinge && e < 0.0)
                e = 0.0;
            sum += e * e;
            if (dloss)
                (*dloss)(c) += 2.0 * inv * e;
        }
        return sum * inv;
    };

    if (terms & kMainLobeTerm)
        out.l_ml = squared_error(mask.main_lobe, false);
    if (terms & kSideLobeTerm)
        out.l_sl = squared_error(mask.side_lobe, true);
    if (terms & kModerateTerm)
        out.l_md = squared_error(mask.moderate, false);
    out.total = out.l_ml + out.l_sl + out.l_md;
    return out;
}
} // namespace

LossBreakdown composite_loss(const BeamPattern &target, const BeamPattern &synth, const RegionMask &mask)
{
    require_same_grid(target, synth);
    check_mask(mask, target.cells());
    return region_loss(target.flat(), synth.flat(), mask, kAllTerms, nullptr);
}

PatternObjective::PatternObjective(std::shared_ptr<const PatternOperator<double>> op, BeamPattern target,
                                   RegionMask mask, unsigned terms)
    : op_(std::move(op)), target_(std::move(target)), mask_(std::move(mask)), terms_(terms)
{
    if (!op_)
        fail(ErrorKind::InvalidArgument, "pattern operator is null");
    if (op_->rows() != target_.rows() || op_->cols() != target_.cols())
        fail(ErrorKind::GridMismatch, "target grid does not match the pattern operator");
    check_mask(mask_, target_.cells());
}

PatternObjective::PatternObjective(const ArrayConfig &cfg, BeamPattern target, unsigned terms)
    : PatternObjective(std::make_shared<const PatternOperator<double>>(cfg, target.grid), target,
                       segment_regions(target), terms)
{
}

LossBreakdown PatternObjective::accumulate(const VectorXd &synth_db, VectorXd *dloss_ddb) const
{
    return region_loss(target_.flat(), synth_db, mask_, terms_, dloss_ddb);
}

BeamPattern PatternObjective::synthesize(const CVectorXd &f) const
{
    return compute_pattern(*op_, target_.grid, f);
}

LossBreakdown PatternObjective::loss(const CVectorXd &f) const
{
    const BeamPattern synth = synthesize(f);
    const LossBreakdown out = accumulate(synth.flat(), nullptr);
    if (!std::isfinite(out.total))
        fail(ErrorKind::NonFinite, "pattern loss is not finite");
    return out;
}

LossBreakdown PatternObjective::loss_and_gradient(const CVectorXd &f, CVectorXd &grad_f) const
{
    if (f.size() != op_->n_t())
        fail(ErrorKind::InvalidArgument, "beamforming vector length does not match the array");
    const CVectorXd g = op_->response(f);
    const VectorXd mag = g.cwiseAbs();

    if (!mag.allFinite())
        fail(ErrorKind::NonFinite, "array response is not finite");
    Index peak_cell = 0;
    const double peak = mag.maxCoeff(&peak_cell);
    if (!(peak > 0.0))
        fail(ErrorKind::DegenerateInput, "beamformer radiates no power");

    const Index cells = mag.size();
    VectorXd raw_db(cells), synth_db(cells);
    for (Index c = 0; c < cells; ++c)
    {
        raw_db(c) = 20.0 * std::log10(mag(c) / peak);
        synth_db(c) = std::max(raw_db(c), kPatternFloorDb);
    }

    VectorXd dloss;
    const LossBreakdown out = accumulate(synth_db, &dloss);
    if (!std::isfinite(out.total))
        fail(ErrorKind::NonFinite, "pattern loss is not finite");

    // d(dB_c)/d|g_c| = k / |g_c| and d|g_c| maps to conj(a_c) g_c / |g_c| in the
    // excitation; the peak reference enters every unclamped cell with a minus sign.
    const double k = 20.0 / std::log(10.0);
    CVectorXd weights = CVectorXd::Zero(cells);
    double peak_weight = 0.0;
    for (Index c = 0; c < cells; ++c)
    {
        const double s = dloss(c);
        if (s == 0.0 || !(raw_db(c) > kPatternFloorDb))
            continue;
        weights(c) = (s * k / (mag(c) * mag(c))) * g(c);
        peak_weight += s;
    }
    weights(peak_cell) -= (peak_weight * k / (peak * peak)) * g(peak_cell);

    grad_f = op_->adjoint(weights);
    return out;
}

LossBreakdown PatternObjective::evaluate(const Beamformer &bf, VectorXd *grad) const
{
    const CVectorXd f = excitation(bf);
    if (!grad)
        return loss(f);
    CVectorXd grad_f;
    const LossBreakdown out = loss_and_gradient(f, grad_f);
    *grad = parameter_gradient(bf, grad_f);
    return out;
}

GradientVector loss_gradient(const ArrayConfig &cfg, const AngleGrid &grid, const BeamPattern &target,
                             const RegionMask &mask, const Beamformer &bf, unsigned terms)
{
    if (!(target.grid == grid))
        fail(ErrorKind::GridMismatch, "target is not sampled on the requested grid");
    realize(bf, cfg); // dimension and degeneracy checks
    const PatternObjective objective(std::make_shared<const PatternOperator<double>>(cfg, grid), target, mask,
                                     terms);
    GradientVector out;
    out.loss = objective.evaluate(bf, &out.values);
    return out;
}

} // namespace patternbf
