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


#ifndef PATTERNBF_EVAL_HPP
#define PATTERNBF_EVAL_HPP

#include "patternbf/channel.hpp"
#include "patternbf/synthesis.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace patternbf
{

/// log2(1 + 10^(snr_db/10) |h^H f|^2); f must have unit norm within 1e-9.
double spectral_efficiency(const CVectorXd &h, const CVectorXd &f, double snr_db);

struct ComplianceMetrics
{
    double main_lobe_max_deviation_db = 0.0;
    double main_lobe_within_fraction = 1.0; // cells with |deviation| <= tolerance
    double side_lobe_violation_fraction = 0.0;
    double moderate_rms_db = 0.0;
};

ComplianceMetrics pattern_compliance(const BeamPattern &target, const BeamPattern &synth, const RegionMask &mask,
                                     double tolerance_db = 2.0);

/// "first:step:last" inclusive, or a comma-separated list.
std::vector<double> parse_snr_list(const std::string &text);

/// Every method name understood by run_sweep, in report order.
const std::vector<std::string> &known_methods();

struct EvalConfig
{
    std::vector<double> snr_db{-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<std::string> methods{"mrt", "dft", "omp", "direct-digital"};
    std::uint64_t seed = 0;
    AngleGrid grid = AngleGrid::standard();
    SynthesisConfig digital{Architecture::Digital};
    SynthesisConfig analog{Architecture::Analog};
    SynthesisConfig hybrid{Architecture::Hybrid};
    SynthesisConfig decoder{Architecture::Digital}; // architecture is set per decoder method
    Index dictionary_y = 64;
    Index dictionary_z = 64;
    bool keep_patterns = false; // retain channel-0 patterns for plotting

    void validate() const;
};

nlohmann::json to_json(const EvalConfig &eval);
EvalConfig eval_config_from_json(const nlohmann::json &j, EvalConfig base = {});

struct MethodReport
{
    std::string name;
    std::vector<double> mean_se;            // per SNR, over successful channels
    std::vector<double> percent_of_optimal; // per SNR
    double mean_percent_of_optimal = 0.0;
    ComplianceMetrics compliance;           // mean over successful channels, against the MRT target
    std::size_t failures = 0;
    std::vector<std::string> failure_messages;
    double wall_seconds = 0.0;
};

struct EvalReport
{
    std::vector<double> snr_db;
    std::size_t channels = 0;
    std::vector<MethodReport> methods;
    std::vector<std::pair<std::string, BeamPattern>> patterns; // filled when keep_patterns

    const MethodReport &method(const std::string &name) const;
};

/*!
 * For each channel the target is the pattern of the matched filter; every
 * requested method produces a unit-norm beamformer that is scored by spectral
 * efficiency at each SNR. A method that throws on a channel is counted as a
 * failure and left out of that method's averages.
 */
EvalReport run_sweep(const ArrayConfig &cfg, const EvalConfig &eval, const std::vector<Channel> &channels);

nlohmann::json to_json(const EvalReport &report, bool timing = false);

} // namespace patternbf

#endif
