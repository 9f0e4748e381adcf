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


#ifndef PATTERNBF_BASELINES_HPP
#define PATTERNBF_BASELINES_HPP

#include "patternbf/beamformer.hpp"
#include "patternbf/channel.hpp"

#include <memory>
#include <vector>

namespace patternbf
{

/// Matched filter h / |h|.
Digital mrt(const CVectorXd &h);

/// Matched filter to the path geometry with gain phases discarded.
Digital partial_csi_dbf(const std::vector<PathParams> &paths, const ArrayConfig &cfg);

/*!
 * Constant-modulus atoms on a grid uniform in the sine domain of each axis:
 * u_p = -1 + 2p / g_y, v_q = -1 + 2q / g_z, atom (p, q) at column p * g_z + q
 * with entries exp(j k d (m u_p + n v_q)) / sqrt(n_t).
 */
struct SteeringDictionary
{
    MatrixXd phases; // n_t x G
    CMatrixXd atoms; // n_t x G

    Index size() const { return atoms.cols(); }
};

SteeringDictionary steering_dictionary(const ArrayConfig &cfg, Index g_y = 64, Index g_z = 64);

/*!
 * Greedy sparse approximation of f_opt by cfg.n_rf dictionary atoms with a
 * least-squares baseband. An atom that would make the selected set rank
 * deficient is skipped in favour of the next-best one. When `residuals` is
 * given it receives |f_opt - F_rf w_bb| after each iteration.
 */
Hybrid omp_hybrid(const CVectorXd &f_opt, const ArrayConfig &cfg, const SteeringDictionary &dictionary,
                  std::vector<double> *residuals = nullptr);

/// Phases of codeword (p, q): 2 pi (m p / n_y + n q / n_z), codeword index p * n_z + q.
VectorXd dft_codeword_phases(const ArrayConfig &cfg, Index p, Index q);

/// Codeword maximizing |h^H f|; ties go to the lowest index.
Analog dft_codebook_abf(const CVectorXd &h, const ArrayConfig &cfg);

/// Un-normalized complex responses x_c = a_c^T conj(f), laid out like a pattern.
struct PhasePattern
{
    Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values;

    Eigen::Map<const CVectorXd> flat() const { return {values.data(), values.size()}; }
};

PhasePattern phase_pattern(const PatternOperator<double> &op, const CVectorXd &f);
PhasePattern phase_pattern(const SteeringMatrix<double> &A, const AngleGrid &grid, const CVectorXd &f);

/*!
 * Least-squares recovery of a beamformer from its phase pattern,
 * f = (A A^H)^-1 A conj(x) / max|x|, normalized. The Gram factorization is
 * computed once; a ridge of 1e-9 times the mean diagonal is added only if the
 * plain Cholesky factorization fails.
 */
class LsRecovery
{
  public:
    LsRecovery(const ArrayConfig &cfg, const AngleGrid &grid);
    explicit LsRecovery(const SteeringMatrix<double> &A);

    Digital recover(const PhasePattern &xp) const;

    bool ridged() const { return ridged_; }

  private:
    void factorize(CMatrixXd gram);

    std::shared_ptr<const PatternOperator<double>> op_;
    const SteeringMatrix<double> *steering_ = nullptr;
    Eigen::LLT<CMatrixXd> llt_;
    bool ridged_ = false;
};

Digital ls_recover(const PhasePattern &xp, const SteeringMatrix<double> &A);

} // namespace patternbf

#endif
