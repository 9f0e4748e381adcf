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

#include "patternbf/synthesis.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace patternbf
{

void SynthesisConfig::validate() const
{
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        fail(ErrorKind::InvalidArgument, "learning rate must be positive");
    if (epochs < 1)
        fail(ErrorKind::InvalidArgument, "epochs must be at least 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        fail(ErrorKind::InvalidArgument, "Adam betas must lie in [0, 1)");
    if (!(epsilon > 0.0))
        fail(ErrorKind::InvalidArgument, "Adam epsilon must be positive");
    if (restarts < 1)
        fail(ErrorKind::InvalidArgument, "restarts must be at least 1");
    if (!(final_lr_fraction > 0.0 && final_lr_fraction <= 1.0))
        fail(ErrorKind::InvalidArgument, "final learning-rate fraction must lie in (0, 1]");
}

nlohmann::json to_json(const SynthesisConfig &syn)
{
    return {{"architecture", to_string(syn.architecture)},
            {"learning_rate", syn.learning_rate},
            {"epochs", syn.epochs},
            {"beta1", syn.beta1},
            {"beta2", syn.beta2},
            {"epsilon", syn.epsilon},
            {"seed", syn.seed},
            {"restarts", syn.restarts},
            {"final_lr_fraction", syn.final_lr_fraction}};
}

SynthesisConfig synthesis_config_from_json(const nlohmann::json &j, SynthesisConfig base)
{
    if (!j.is_object())
        fail(ErrorKind::Parse, "synthesis config must be a JSON object");
    try
    {
        if (j.contains("architecture"))
            base.architecture = architecture_from_string(j.at("architecture").get<std::string>());
        base.learning_rate = j.value("learning_rate", base.learning_rate);
        base.epochs = j.value("epochs", base.epochs);
        base.beta1 = j.value("beta1", base.beta1);
        base.beta2 = j.value("beta2", base.beta2);
        base.epsilon = j.value("epsilon", base.epsilon);
        base.seed = j.value("seed", base.seed);
        base.restarts = j.value("restarts", base.restarts);
        base.final_lr_fraction = j.value("final_lr_fraction", base.final_lr_fraction);
    }
    catch (const nlohmann::json::exception &e)
    {
        fail(ErrorKind::Parse, std::string("synthesis config: ") + e.what());
    }
    base.validate();
    return base;
}

Adam::Adam(Index size, double learning_rate, double beta1, double beta2, double epsilon)
    : m_(VectorXd::Zero(size)), v_(VectorXd::Zero(size)), lr_(learning_rate), beta1_(beta1), beta2_(beta2),
      eps_(epsilon)
{
}

void Adam::step(Eigen::Ref<VectorXd> params, const Eigen::Ref<const VectorXd> &grad)
{
    ++t_;
    beta1_power_ *= beta1_;
    beta2_power_ *= beta2_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
    const double step = lr_ / (1.0 - beta1_power_);
    const double v_scale = 1.0 / (1.0 - beta2_power_);
    params.array() -= step * m_.array() / ((v_.array() * v_scale).sqrt() + eps_);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Beamformer random_beamformer(Architecture arch, const ArrayConfig &cfg, std::mt19937_64 &rng)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    auto complex_gaussian = [&](Index n) {
        CVectorXd v(n);
        for (Index k = 0; k < n; ++k)
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v(k) = cd(re, im);
        }
        return CVectorXd(v / v.norm());
    };
    auto phases = [&](Index rows, Index cols) {
        MatrixXd p(rows, cols);
        for (Index c = 0; c < cols; ++c)
            for (Index r = 0; r < rows; ++r)
                p(r, c) = phase(rng);
        return p;
    };

    switch (arch)
    {
    case Architecture::Digital: return Digital{complex_gaussian(cfg.n_t())};
    case Architecture::Analog: return Analog{phases(cfg.n_t(), 1).col(0)};
    case Architecture::Hybrid: {
        Hybrid h;
        h.phi_rf = phases(cfg.n_t(), cfg.n_rf);
        h.w_bb = complex_gaussian(cfg.n_rf);
        return h;
    }
    }
    fail(ErrorKind::Unsupported, "unknown architecture");
}

Beamformer canonicalize(const Beamformer &bf, const ArrayConfig &cfg)
{
    const CVectorXd f = realize(bf, cfg);
    auto wrap = [](double phi) { return std::remainder(phi, 2.0 * kPi); };
    if (std::holds_alternative<Digital>(bf))
        return Digital{f};
    if (const auto *a = std::get_if<Analog>(&bf))
        return Analog{a->phases.unaryExpr(wrap)};
    Hybrid h = std::get<Hybrid>(bf);
    h.phi_rf = h.phi_rf.unaryExpr(wrap);
    h.w_bb /= excitation(h).norm();
    return h;
}

namespace
{
struct MeanObjective
{
    std::vector<PatternObjective> parts;

    LossBreakdown evaluate(const Beamformer &bf, VectorXd *grad) const
    {
        LossBreakdown sum;
        VectorXd part_grad;
        if (grad)
            grad->setZero(parameter_layout(bf).size());
        for (const auto &objective : parts)
        {
            const LossBreakdown l = objective.evaluate(bf, grad ? &part_grad : nullptr);
            sum.l_ml += l.l_ml;
            sum.l_sl += l.l_sl;
            sum.l_md += l.l_md;
            if (grad)
                *grad += part_grad;
        }
        const double inv = 1.0 / static_cast<double>(parts.size());
        sum.l_ml *= inv;
        sum.l_sl *= inv;
        sum.l_md *= inv;
        sum.total = sum.l_ml + sum.l_sl + sum.l_md;
        if (grad)
            *grad *= inv;
        return sum;
    }
};

struct RunOutcome
{
    VectorXd params;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> trajectory;
};

} // namespace

double scheduled_learning_rate(const SynthesisConfig &syn, int epoch)
{
    if (syn.final_lr_fraction == 1.0 || syn.epochs < 2)
        return syn.learning_rate;
    const double progress = static_cast<double>(epoch) / static_cast<double>(syn.epochs - 1);
    const double floor = syn.final_lr_fraction;
    return syn.learning_rate * (floor + (1.0 - floor) * 0.5 * (1.0 + std::cos(kPi * progress)));
}

namespace
{
RunOutcome run_adam(const MeanObjective &objective, const ParameterLayout &layout, VectorXd params,
                    const SynthesisConfig &syn)
{
    RunOutcome out;
    out.trajectory.reserve(static_cast<std::size_t>(syn.epochs));
    Adam adam(layout.size(), syn.learning_rate, syn.beta1, syn.beta2, syn.epsilon);
    VectorXd grad;

    auto consider = [&](const VectorXd &p, double loss) {
        if (loss < out.best)
        {
            out.best = loss;
            out.params = p;
        }
    };

    for (int epoch = 0; epoch < syn.epochs; ++epoch)
    {
        LossBreakdown loss;
        try
        {
            loss = objective.evaluate(unpack_parameters(layout, params), &grad);
        }
        catch (const Error &e)
        {
            if (e.kind() == ErrorKind::NonFinite)
                fail(ErrorKind::NonFinite, "loss became non-finite at epoch " + std::to_string(epoch));
            throw;
        }
        if (!std::isfinite(loss.total) || !grad.allFinite())
            fail(ErrorKind::NonFinite, "loss became non-finite at epoch " + std::to_string(epoch));
        out.trajectory.push_back(loss.total);
        consider(params, loss.total);
        adam.set_learning_rate(scheduled_learning_rate(syn, epoch));
        adam.step(params, grad);
    }
    const LossBreakdown last = objective.evaluate(unpack_parameters(layout, params), nullptr);
    if (std::isfinite(last.total))
        consider(params, last.total);
    return out;
}
} // namespace

SynthesisResult synthesize_direct(const std::vector<BeamPattern> &targets, const ArrayConfig &cfg,
                                  const SynthesisConfig &syn, const std::optional<Beamformer> &init)
{
    const auto start = std::chrono::steady_clock::now();
    syn.validate();
    cfg.validate();
    if (targets.empty())
        fail(ErrorKind::InvalidArgument, "no target patterns given");

    MeanObjective objective;
    const auto op = std::make_shared<const PatternOperator<double>>(cfg, targets.front().grid);
    for (const auto &target : targets)
    {
        target.validate();
        if (!(target.grid == targets.front().grid))
            fail(ErrorKind::GridMismatch, "targets are sampled on different grids");
        objective.parts.emplace_back(op, target, segment_regions(target));
    }

    const ParameterLayout layout = ParameterLayout::of(syn.architecture, cfg);
    if (init && !(parameter_layout(*init) == layout))
        fail(ErrorKind::InvalidArgument, "initial beamformer does not match the requested architecture");

    RunOutcome best;
    for (int r = 0; r < syn.restarts; ++r)
    {
        VectorXd params;
        if (r == 0 && init)
        {
            params = pack_parameters(*init);
        }
        else
        {
            std::mt19937_64 rng(derive_seed(syn.seed, static_cast<std::uint64_t>(r)));
            params = pack_parameters(random_beamformer(syn.architecture, cfg, rng));
        }
        RunOutcome run = run_adam(objective, layout, std::move(params), syn);
        if (r == 0 || run.best < best.best)
            best = std::move(run);
    }

    SynthesisResult result;
    result.beamformer = canonicalize(unpack_parameters(layout, best.params), cfg);
    result.final_loss = objective.evaluate(result.beamformer, nullptr);
    result.trajectory = std::move(best.trajectory);
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

SynthesisResult synthesize_direct(const BeamPattern &target, const ArrayConfig &cfg, const SynthesisConfig &syn,
                                  const std::optional<Beamformer> &init)
{
    return synthesize_direct(std::vector<BeamPattern>{target}, cfg, syn, init);
}

} // namespace patternbf
