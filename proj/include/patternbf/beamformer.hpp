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

#ifndef PATTERNBF_BEAMFORMER_HPP
#define PATTERNBF_BEAMFORMER_HPP

#include "patternbf/array_engine.hpp"

#include <json.hpp>

#include <string>
#include <variant>

namespace patternbf
{

enum class Architecture
{
    Digital,
    Analog,
    Hybrid,
};

std::string to_string(Architecture arch);
Architecture architecture_from_string(const std::string &name);

/// Unconstrained complex weights.
struct Digital
{
    CVectorXd w;
};

/// Phase-only weights, realized as exp(j phases) / sqrt(n_t).
struct Analog
{
    VectorXd phases;
};

/// Fully connected phase-shifter network F_rf = exp(j phi_rf) / sqrt(n_t) behind a baseband vector.
struct Hybrid
{
    MatrixXd phi_rf; // n_t x n_rf
    CVectorXd w_bb;  // n_rf
};

using Beamformer = std::variant<Digital, Analog, Hybrid>;

Architecture architecture_of(const Beamformer &bf);

/// Unit-norm transmit vector for any architecture.
CVectorXd realize(const Beamformer &bf, const ArrayConfig &cfg);

/// Analog realization of F_rf (n_t x n_rf).
CMatrixXd rf_matrix(const Hybrid &bf);

/// Phase-only projection of a hybrid beamformer: phases = arg(realize(hybrid)).
Analog analog_from_hybrid(const Hybrid &bf, const ArrayConfig &cfg);

/*!
 * Real parameter layout of an architecture.
 *
 * Digital: [Re w_0, Im w_0, Re w_1, ...] (2 n_t values).
 * Analog: phases (n_t values).
 * Hybrid: vec(phi_rf) column-major, then [Re w_bb_0, Im w_bb_0, ...] ((n_t + 2) n_rf values).
 */
struct ParameterLayout
{
    Architecture architecture = Architecture::Digital;
    Index n_t = 0;
    Index n_rf = 0;

    Index size() const;

    static ParameterLayout of(Architecture arch, const ArrayConfig &cfg);
    bool operator==(const ParameterLayout &) const = default;
};

ParameterLayout parameter_layout(const Beamformer &bf);

VectorXd pack_parameters(const Beamformer &bf);
Beamformer unpack_parameters(const ParameterLayout &layout, const Eigen::Ref<const VectorXd> &params);

/*!
 * Chain rule from the excitation to the parameters.
 *
 * `grad_f` holds dL/dRe f_l + j dL/dIm f_l for the unnormalized excitation
 * (F_rf w_bb for hybrids, exp(j phases) for analog). Pattern losses are scale
 * invariant, so the unit-norm projection adds nothing to the gradient.
 */
VectorXd parameter_gradient(const Beamformer &bf, const CVectorXd &grad_f);

/// Excitation before unit-norm projection; the gradient above refers to this vector.
CVectorXd excitation(const Beamformer &bf);

nlohmann::json to_json(const Beamformer &bf);
Beamformer beamformer_from_json(const nlohmann::json &j);

} // namespace patternbf

#endif
