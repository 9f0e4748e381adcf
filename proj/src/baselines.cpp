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


#include "patternbf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace patternbf
{

Digital mrt(const CVectorXd &h)
{
    const double norm = h.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        fail(ErrorKind::DegenerateInput, "matched filter needs a nonzero finite channel");
    return Digital{h / norm};
}

Digital partial_csi_dbf(const std::vector<PathParams> &paths, const ArrayConfig &cfg)
{
    if (paths.empty())
        fail(ErrorKind::InvalidArgument, "partial-CSI beamformer needs path metadata");
    CVectorXd w = CVectorXd::Zero(cfg.n_t());
    for (const auto &p : paths)
        w += std::abs(p.gain) * steering_vector(cfg, p.zenith_deg, p.azimuth_deg).conjugate();
    const double norm = w.norm();
    if (!(norm > 0.0))
        fail(ErrorKind::DegenerateInput, "all path gains are zero");
    return Digital{w / norm};
}

SteeringDictionary steering_dictionary(const ArrayConfig &cfg, Index g_y, Index g_z)
{
    cfg.validate();
    if (g_y < 1 || g_z < 1)
        fail(ErrorKind::InvalidArgument, "dictionary grid must have at least one point per axis");
    const double kd = cfg.wavenumber() * cfg.spacing;
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_t()));
    SteeringDictionary dict;
    dict.phases.resize(cfg.n_t(), g_y * g_z);
    for (Index p = 0; p < g_y; ++p)
        for (Index q = 0; q < g_z; ++q)
        {
            const double u = -1.0 + 2.0 * static_cast<double>(p) / static_cast<double>(g_y);
            const double v = -1.0 + 2.0 * static_cast<double>(q) / static_cast<double>(g_z);
            for (Index m = 0; m < cfg.n_y; ++m)
                for (Index n = 0; n < cfg.n_z; ++n)
                    dict.phases(m * cfg.n_z + n, p * g_z + q) = kd * (static_cast<double>(m) * u + static_cast<double>(n) * v);
        }
    dict.atoms = dict.phases.unaryExpr([scale](double phi) { return std::polar(scale, phi); });
    return dict;
}

Hybrid omp_hybrid(const CVectorXd &f_opt, const ArrayConfig &cfg, const SteeringDictionary &dictionary,
                  std::vector<double> *residuals)
{
    cfg.validate();
    if (f_opt.size() != cfg.n_t() || dictionary.atoms.rows() != cfg.n_t())
        fail(ErrorKind::InvalidArgument, "OMP inputs do not match the array size");
    if (std::abs(f_opt.norm() - 1.0) > 1e-9)
        fail(ErrorKind::InvalidArgument, "OMP target must have unit norm");
    if (dictionary.size() < cfg.n_rf)
        fail(ErrorKind::InvalidArgument, "dictionary has fewer atoms than RF chains");

    std::vector<Index> chosen;
    CMatrixXd rf(cfg.n_t(), 0);
    CVectorXd bb;
    CVectorXd residual = f_opt;
    if (residuals)
        residuals->clear();

    for (Index it = 0; it < cfg.n_rf; ++it)
    {
        const VectorXd corr = (dictionary.atoms.adjoint() * residual).cwiseAbs();
        std::vector<Index> order(static_cast<std::size_t>(corr.size()));
        std::iota(order.begin(), order.end(), Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return corr(a) > corr(b); });

        bool added = false;
        for (const Index k : order)
        {
            if (std::find(chosen.begin(), chosen.end(), k) != chosen.end())
                continue;
            CMatrixXd trial(cfg.n_t(), rf.cols() + 1);
            trial << rf, dictionary.atoms.col(k);
            Eigen::ColPivHouseholderQR<CMatrixXd> qr(trial);
            qr.setThreshold(1e-10);
            if (qr.rank() < trial.cols())
                continue;
            rf = std::move(trial);
            bb = qr.solve(f_opt);
            chosen.push_back(k);
            added = true;
            break;
        }
        if (!added)
            fail(ErrorKind::DegenerateInput, "no dictionary atom keeps the selected set full rank");

        const CVectorXd misfit = f_opt - rf * bb;
        const double misfit_norm = misfit.norm();
        if (residuals)
            residuals->push_back(misfit_norm);
        if (misfit_norm > 0.0)
            residual = misfit / misfit_norm;
        else
            residual = misfit;
    }

    Hybrid out;
    out.phi_rf.resize(cfg.n_t(), cfg.n_rf);
    for (Index r = 0; r < cfg.n_rf; ++r)
        out.phi_rf.col(r) = dictionary.phases.col(chosen[static_cast<std::size_t>(r)]);
    const double norm = (rf * bb).norm();
    if (!(norm > 0.0))
        fail(ErrorKind::DegenerateInput, "OMP produced a zero beamformer");
    out.w_bb = bb / norm;
    return out;
}

VectorXd dft_codeword_phases(const ArrayConfig &cfg, Index p, Index q)
{
    VectorXd phases(cfg.n_t());
    for (Index m = 0; m < cfg.n_y; ++m)
        for (Index n = 0; n < cfg.n_z; ++n)
            phases(m * cfg.n_z + n) =
                2.0 * kPi *
                (static_cast<double>(m * p) / static_cast<double>(cfg.n_y) +
                 static_cast<double>(n * q) / static_cast<double>(cfg.n_z));
    return phases;
}

Analog dft_codebook_abf(const CVectorXd &h, const ArrayConfig &cfg)
{
    cfg.validate();
    if (h.size() != cfg.n_t())
        fail(ErrorKind::InvalidArgument, "channel length does not match the array");
    if (!(h.norm() > 0.0))
        fail(ErrorKind::DegenerateInput, "codebook search needs a nonzero channel");

    // |h^H (u_p kron v_q)| = |sum_m sum_n conj(h_mn) e^{j2pi mp/Ny} e^{j2pi nq/Nz}|, a 2-D DFT of conj(h).
    CMatrixXd dft_y(cfg.n_y, cfg.n_y), dft_z(cfg.n_z, cfg.n_z);
    for (Index m = 0; m < cfg.n_y; ++m)
        for (Index p = 0; p < cfg.n_y; ++p)
            dft_y(m, p) = std::polar(1.0, 2.0 * kPi * static_cast<double>((m * p) % cfg.n_y) / static_cast<double>(cfg.n_y));
    for (Index n = 0; n < cfg.n_z; ++n)
        for (Index q = 0; q < cfg.n_z; ++q)
            dft_z(n, q) = std::polar(1.0, 2.0 * kPi * static_cast<double>((n * q) % cfg.n_z) / static_cast<double>(cfg.n_z));
    Eigen::Map<const CMatrixXd> hz(h.data(), cfg.n_z, cfg.n_y); // (n, m)
    const CMatrixXd scores = dft_z.transpose() * hz.conjugate() * dft_y; // (q, p)

    Index best_p = 0, best_q = 0;
    double best = -1.0;
    for (Index p = 0; p < cfg.n_y; ++p)
        for (Index q = 0; q < cfg.n_z; ++q)
        {
            const double s = std::abs(scores(q, p));
            if (s > best)
            {
                best = s;
                best_p = p;
                best_q = q;
            }
        }
    return Analog{dft_codeword_phases(cfg, best_p, best_q)};
}

PhasePattern phase_pattern(const PatternOperator<double> &op, const CVectorXd &f)
{
    const CVectorXd x = op.response(f.conjugate());
    PhasePattern out;
    out.values = Eigen::Map<const decltype(out.values)>(x.data(), op.rows(), op.cols());
    return out;
}

PhasePattern phase_pattern(const SteeringMatrix<double> &A, const AngleGrid &grid, const CVectorXd &f)
{
    if (A.cells() != grid.cells())
        fail(ErrorKind::GridMismatch, "steering matrix does not match the grid");
    if (f.size() != A.n_t())
        fail(ErrorKind::InvalidArgument, "beamforming vector length does not match the array");
    const CVectorXd x = A.entries.transpose() * f.conjugate();
    PhasePattern out;
    out.values = Eigen::Map<const decltype(out.values)>(x.data(), grid.rows(), grid.cols());
    return out;
}

LsRecovery::LsRecovery(const ArrayConfig &cfg, const AngleGrid &grid)
    : op_(std::make_shared<const PatternOperator<double>>(cfg, grid))
{
    // A A^H depends only on element offsets (dm, dn), so it is assembled from
    // a (2 n_y - 1) x (2 n_z - 1) table of per-offset sums over the grid.
    const double kd = cfg.wavenumber() * cfg.spacing;
    const Index oy = 2 * cfg.n_y - 1, oz = 2 * cfg.n_z - 1;
    CMatrixXd table = CMatrixXd::Zero(oz, oy);
    CVectorXd ypow(oy), zpow(oz);
    for (const double zen_deg : grid.zeniths)
    {
        const double zen = deg2rad(zen_deg);
        const double v = std::cos(zen);
        for (Index dn = 0; dn < oz; ++dn)
            zpow(dn) = std::polar(1.0, kd * static_cast<double>(dn - (cfg.n_z - 1)) * v);
        CVectorXd row_sum = CVectorXd::Zero(oy);
        for (const double az_deg : grid.azimuths)
        {
            const double u = std::sin(zen) * std::sin(deg2rad(az_deg));
            for (Index dm = 0; dm < oy; ++dm)
                ypow(dm) = std::polar(1.0, kd * static_cast<double>(dm - (cfg.n_y - 1)) * u);
            row_sum += ypow;
        }
        table.noalias() += zpow * row_sum.transpose();
    }
    const Index n_t = cfg.n_t();
    CMatrixXd gram(n_t, n_t);
    for (Index m = 0; m < cfg.n_y; ++m)
        for (Index n = 0; n < cfg.n_z; ++n)
            for (Index m2 = 0; m2 < cfg.n_y; ++m2)
                for (Index n2 = 0; n2 < cfg.n_z; ++n2)
                    gram(m * cfg.n_z + n, m2 * cfg.n_z + n2) = table(n - n2 + cfg.n_z - 1, m - m2 + cfg.n_y - 1);
    factorize(std::move(gram));
}

LsRecovery::LsRecovery(const SteeringMatrix<double> &A) : steering_(&A)
{
    CMatrixXd gram = CMatrixXd::Zero(A.n_t(), A.n_t());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(A.entries);
    gram.triangularView<Eigen::StrictlyUpper>() = gram.adjoint();
    factorize(std::move(gram));
}

void LsRecovery::factorize(CMatrixXd gram)
{
    llt_.compute(gram);
    if (llt_.info() == Eigen::Success)
        return;
    const double ridge = 1e-9 * gram.diagonal().real().mean();
    gram.diagonal().array() += ridge;
    llt_.compute(gram);
    ridged_ = true;
    if (llt_.info() != Eigen::Success)
        fail(ErrorKind::DegenerateInput, "steering Gram matrix is singular even with ridge regularization");
}

Digital LsRecovery::recover(const PhasePattern &xp) const
{
    const auto x = xp.flat();
    const Index cells = op_ ? op_->cells() : steering_->cells();
    if (x.size() != cells)
        fail(ErrorKind::GridMismatch, "phase pattern does not match the grid");
    const double peak = x.cwiseAbs().maxCoeff();
    if (!(peak > 0.0) || !std::isfinite(peak))
        fail(ErrorKind::DegenerateInput, "phase pattern is zero or non-finite");
    const CVectorXd scaled = x / peak;
    const CVectorXd rhs = op_ ? CVectorXd(op_->adjoint(scaled).conjugate())
                              : CVectorXd(steering_->entries * scaled.conjugate());
    CVectorXd f = llt_.solve(rhs);
    const double norm = f.norm();
    if (!(norm > 0.0) || !f.allFinite())
        fail(ErrorKind::NonFinite, "least-squares recovery produced a degenerate vector");
    return Digital{f / norm};
}

Digital ls_recover(const PhasePattern &xp, const SteeringMatrix<double> &A)
{
    return LsRecovery(A).recover(xp);
}

} // namespace patternbf
