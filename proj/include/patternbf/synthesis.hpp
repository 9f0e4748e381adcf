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

#ifndef PATTERNBF_SYNTHESIS_HPP
#define PATTERNBF_SYNTHESIS_HPP

#include "patternbf/objective.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace patternbf
{

struct SynthesisConfig
{
    Architecture architecture = Architecture::Digital;
    double learning_rate = 1e-3;
    int epochs = 500;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    int restarts = 1;
    /// Cosine decay of the step size to this fraction of `learning_rate` at the last epoch; 1 keeps it constant.
    double final_lr_fraction = 1.0;

    void validate() const;
};

nlohmann::json to_json(const SynthesisConfig &syn);

/// Missing fields keep their defaults; `base` supplies them.
SynthesisConfig synthesis_config_from_json(const nlohmann::json &j, SynthesisConfig base = {});

/// Adam with bias correction on a flat parameter vector.
class Adam
{
  public:
    Adam(Index size, double learning_rate, double beta1, double beta2, double epsilon);

    void step(Eigen::Ref<VectorXd> params, const Eigen::Ref<const VectorXd> &grad);
    long iterations() const { return t_; }
    void set_learning_rate(double lr) { lr_ = lr; }

  private:
    VectorXd m_, v_;
    double lr_, beta1_, beta2_, eps_;
    double beta1_power_ = 1.0, beta2_power_ = 1.0;
    long t_ = 0;
};

struct SynthesisResult
{
    Beamformer beamformer;
    LossBreakdown final_loss;
    std::vector<double> trajectory; // total loss of the iterate entering each epoch
    double wall_seconds = 0.0;
};

/// Seeded random start: Gaussian weights scaled to unit norm, phases uniform on [0, 2 pi).
/// Step size used at `epoch` (0-based).
double scheduled_learning_rate(const SynthesisConfig &syn, int epoch);

Beamformer random_beamformer(Architecture arch, const ArrayConfig &cfg, std::mt19937_64 &rng);

/// Restart r of a run seeded with `seed` draws from this stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Returns the beamformer with its architecture invariants enforced (unit norm, wrapped phases).
Beamformer canonicalize(const Beamformer &bf, const ArrayConfig &cfg);

/*!
 * Direct pattern-matching synthesis.
 *
 * Runs Adam on the composite loss for `epochs` steps from a seeded random
 * start (or from `init` on the first restart). The best iterate seen is
 * kept, and with several restarts the one with the lowest final loss wins.
 */
SynthesisResult synthesize_direct(const BeamPattern &target, const ArrayConfig &cfg, const SynthesisConfig &syn,
                                  const std::optional<Beamformer> &init = std::nullopt);

/// Same, minimizing the mean composite loss over several targets with one shared beamformer.
SynthesisResult synthesize_direct(const std::vector<BeamPattern> &targets, const ArrayConfig &cfg,
                                  const SynthesisConfig &syn, const std::optional<Beamformer> &init = std::nullopt);

} // namespace patternbf

#endif
