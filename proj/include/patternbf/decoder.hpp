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

#ifndef PATTERNBF_DECODER_HPP
#define PATTERNBF_DECODER_HPP

#include "patternbf/synthesis.hpp"

#include <vector>

namespace patternbf
{

inline constexpr Index kFeatureBins = 32;
inline constexpr Index kFeatureDim = kFeatureBins * kFeatureBins;
inline constexpr Index kFeaturizerGridSize = 180;

/*!
 * Fixed pattern featurizer.
 *
 * Average-pools a 180 x 180 dB pattern into 32 x 32 bins (bin b covers rows
 * [floor(180 b / 32), floor(180 (b + 1) / 32))), flattens row-major and maps
 * [-60, 0] dB affinely onto [0, 1].
 */
VectorXd featurize(const BeamPattern &pattern);

/// First and one-past-last source row of pooling bin `bin`.
std::pair<Index, Index> feature_bin_range(Index bin);

/*!
 * Fully connected decoder: ReLU hidden layers, linear output.
 *
 * All weights and biases live in one flat vector so a single Adam instance
 * can update them. Layer k stores W_k (out x in, column-major) followed by b_k.
 */
class MlpDecoder
{
  public:
    struct Cache
    {
        std::vector<MatrixXd> inputs;      // input of every layer
        std::vector<MatrixXd> pre_act;     // pre-activation of every layer
    };

    MlpDecoder() = default;
    MlpDecoder(std::vector<Index> widths, ParameterLayout head);

    /// Feature dimension -> 1024 -> 2048 -> 1024 -> parameter count of `arch`.
    static MlpDecoder standard(Architecture arch, const ArrayConfig &cfg);

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
    void initialize(std::uint64_t seed);

    MatrixXd forward(const MatrixXd &input) const;
    MatrixXd forward(const MatrixXd &input, Cache &cache) const;

    /// Gradient of a scalar loss w.r.t. all parameters, given dLoss/dOutput.
    VectorXd backward(const Cache &cache, const MatrixXd &d_output) const;

    const std::vector<Index> &widths() const { return widths_; }
    const ParameterLayout &head() const { return head_; }
    Index layers() const { return static_cast<Index>(widths_.size()) - 1; }
    Index parameter_count() const { return params_.size(); }

    VectorXd &parameters() { return params_; }
    const VectorXd &parameters() const { return params_; }

  private:
    Eigen::Map<const MatrixXd> weight(Index layer) const;
    Eigen::Map<const VectorXd> bias(Index layer) const;

    std::vector<Index> widths_;
    std::vector<Index> offsets_;
    ParameterLayout head_;
    VectorXd params_;
};

nlohmann::json to_json(const MlpDecoder &dec);
MlpDecoder decoder_from_json(const nlohmann::json &j);

struct DecoderTraining
{
    MlpDecoder decoder;
    std::vector<double> trajectory;  // mean total loss entering each epoch
    std::vector<double> final_losses; // per-target total loss of the returned decoder
    double wall_seconds = 0.0;
};

/*!
 * Online decoder training.
 *
 * Full-batch Adam over the decoder parameters minimizing the mean composite
 * loss across `targets`: featurize, MLP, reshape into the head layout,
 * realize, pattern. `syn.architecture` selects the head (digital or hybrid).
 * An empty `widths` selects the standard layer sizes. The best iterate is kept.
 */
DecoderTraining train_decoder(const std::vector<BeamPattern> &targets, const ArrayConfig &cfg,
                              const SynthesisConfig &syn, std::vector<Index> widths = {});

/// Deterministic forward pass; an analog request on a hybrid head applies the phase-only projection.
Beamformer decode(const MlpDecoder &dec, const BeamPattern &target, const ArrayConfig &cfg,
                  Architecture requested);

} // namespace patternbf

#endif
