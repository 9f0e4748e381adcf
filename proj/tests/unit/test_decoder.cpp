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


#include <catch_amalgamated.hpp>

#include "patternbf/channel.hpp"
#include "patternbf/decoder.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace patternbf;
using patternbf::testing::random_complex;
using patternbf::testing::uniform;

namespace
{
BeamPattern constant_pattern(double db)
{
    BeamPattern p;
    p.grid = AngleGrid::standard();
    p.values = PatternMatrix::Constant(180, 180, db);
    return p;
}

std::vector<Index> small_widths(const ArrayConfig &cfg, Architecture arch)
{
    return {kFeatureDim, 32, ParameterLayout::of(arch, cfg).size()};
}
} // namespace

TEST_CASE("featurize - constant patterns map to the ends of [0, 1]")
{
    const VectorXd lo = featurize(constant_pattern(-60.0));
    const VectorXd hi = featurize(constant_pattern(0.0));
    REQUIRE(lo.size() == 1024);
    CHECK(lo.cwiseAbs().maxCoeff() == 0.0);
    CHECK((hi.array() - 1.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("featurize - bins tile the grid with sizes 5 or 6")
{
    Index covered = 0;
    for (Index b = 0; b < kFeatureBins; ++b)
    {
        const auto [lo, hi] = feature_bin_range(b);
        CHECK(lo == covered);
        CHECK((hi - lo == 5 || hi - lo == 6));
        covered = hi;
    }
    CHECK(covered == 180);
}

TEST_CASE("featurize - each feature is the brute-force mean of its bin")
{
    std::mt19937_64 rng(1);
    BeamPattern p = constant_pattern(0.0);
    for (Index i = 0; i < 180; ++i)
        for (Index j = 0; j < 180; ++j)
            p.values(i, j) = uniform(rng, -60.0, 0.0);
    const VectorXd q = featurize(p);
    for (Index bi = 0; bi < 32; ++bi)
        for (Index bj = 0; bj < 32; ++bj)
        {
            // bin edges recomputed independently: floor(180 b / 32)
            const Index r0 = static_cast<Index>(std::floor(180.0 * bi / 32.0));
            const Index r1 = static_cast<Index>(std::floor(180.0 * (bi + 1) / 32.0));
            const Index c0 = static_cast<Index>(std::floor(180.0 * bj / 32.0));
            const Index c1 = static_cast<Index>(std::floor(180.0 * (bj + 1) / 32.0));
            double sum = 0.0;
            for (Index i = r0; i < r1; ++i)
                for (Index j = c0; j < c1; ++j)
                    sum += p.values(i, j);
            const double expect = (sum / double((r1 - r0) * (c1 - c0)) + 60.0) / 60.0;
            CHECK(std::abs(q(bi * 32 + bj) - expect) < 1e-12);
        }
}

TEST_CASE("featurize - rejects other grids")
{
    BeamPattern p;
    p.grid = testing::coarse_grid();
    p.values = PatternMatrix::Zero(p.grid.rows(), p.grid.cols());
    try
    {
        featurize(p);
        FAIL("coarse grid accepted");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::Unsupported);
    }
}

TEST_CASE("MlpDecoder - standard widths and parameter count")
{
    const ArrayConfig cfg = ArrayConfig::standard();
    const MlpDecoder d = MlpDecoder::standard(Architecture::Digital, cfg);
    CHECK(d.widths() == std::vector<Index>{1024, 1024, 2048, 1024, 512});
    CHECK(d.layers() == 4);
    CHECK(d.parameter_count() == 1024 * 1024 + 1024 + 2048 * 1024 + 2048 + 1024 * 2048 + 1024 + 512 * 1024 + 512);
    CHECK(MlpDecoder::standard(Architecture::Hybrid, cfg).widths().back() == 516);
    CHECK_THROWS_AS(MlpDecoder::standard(Architecture::Analog, cfg), Error);
    CHECK_THROWS_AS(MlpDecoder({4, 8, 5}, ParameterLayout::of(Architecture::Digital, ArrayConfig::ura(2, 1, 1))),
                    Error);
}

TEST_CASE("MlpDecoder - forward against a hand evaluation and initialization bounds")
{
    MlpDecoder d({4, 8, 4}, ParameterLayout::of(Architecture::Digital, ArrayConfig::ura(2, 1, 1)));
    d.initialize(3);
    const VectorXd &p = d.parameters();
    // layer 0: 8x4 weights then 8 biases; layer 1: 4x8 weights then 4 biases
    CHECK(p.head(40).cwiseAbs().maxCoeff() <= 0.5);
    CHECK(p.tail(36).cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(8.0));
    const Eigen::Map<const MatrixXd> w0(p.data(), 8, 4), w1(p.data() + 40, 4, 8);
    const Eigen::Map<const VectorXd> b0(p.data() + 32, 8), b1(p.data() + 72, 4);
    VectorXd x(4);
    x << 0.3, -1.2, 0.8, 2.0;
    const VectorXd hidden = (w0 * x + b0).cwiseMax(0.0);
    const VectorXd expect = w1 * hidden + b1;
    CHECK((d.forward(MatrixXd(x)).col(0) - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("MlpDecoder - backpropagation matches finite differences on a [4, 8, 4] network")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial)
    {
        MlpDecoder d({4, 8, 4}, ParameterLayout::of(Architecture::Digital, ArrayConfig::ura(2, 1, 1)));
        d.initialize(100 + static_cast<std::uint64_t>(trial));
        MatrixXd x(4, 3), weights(4, 3);
        for (Index k = 0; k < x.size(); ++k)
        {
            x(k) = uniform(rng, -2.0, 2.0);
            weights(k) = uniform(rng, -1.0, 1.0);
        }
        MlpDecoder::Cache cache;
        d.forward(x, cache);
        // A random ReLU kink within the difference step would spoil the comparison.
        bool near_kink = false;
        for (const auto &z : cache.pre_act)
            near_kink |= z.cwiseAbs().minCoeff() < 1e-3;
        if (near_kink)
            continue;
        const VectorXd analytic = d.backward(cache, weights);
        const VectorXd numeric = testing::richardson_differences(
            [&](const VectorXd &params) {
                MlpDecoder probe = d;
                probe.parameters() = params;
                return probe.forward(x).cwiseProduct(weights).sum();
            },
            d.parameters());
        CHECK(testing::max_relative_error(analytic, numeric) < 1e-5);
    }
}

TEST_CASE("decode - zero-initialized decoder yields a degenerate beamformer")
{
    const ArrayConfig cfg = ArrayConfig::ura(4, 4, 2);
    const MlpDecoder d(small_widths(cfg, Architecture::Digital), ParameterLayout::of(Architecture::Digital, cfg));
    const BeamPattern t = make_target(TargetSpec{TargetShape::Pencil, 90.0, 0.0, 0, 0, -25.0}, AngleGrid::standard());
    try
    {
        decode(d, t, cfg, Architecture::Digital);
        FAIL("zero output accepted");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::DegenerateInput);
    }
}

TEST_CASE("decode - determinism, analog projection and head checks")
{
    const ArrayConfig cfg = ArrayConfig::ura(4, 4, 2);
    const BeamPattern t = make_target(TargetSpec{TargetShape::Pencil, 100.0, 20.0, 0, 0, -25.0}, AngleGrid::standard());
    MlpDecoder hybrid(small_widths(cfg, Architecture::Hybrid), ParameterLayout::of(Architecture::Hybrid, cfg));
    hybrid.initialize(8);
    const Beamformer a = decode(hybrid, t, cfg, Architecture::Hybrid);
    const Beamformer b = decode(hybrid, t, cfg, Architecture::Hybrid);
    CHECK(pack_parameters(a) == pack_parameters(b));

    const Beamformer analog = decode(hybrid, t, cfg, Architecture::Analog);
    REQUIRE(architecture_of(analog) == Architecture::Analog);
    const CVectorXd f = realize(analog, cfg);
    CHECK(std::abs(f.norm() - 1.0) < 1e-12);
    CHECK((f.cwiseAbs().array() - 0.25).abs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(decode(hybrid, t, cfg, Architecture::Digital), Error);
    CHECK_THROWS_AS(decode(hybrid, t, ArrayConfig::ura(4, 4, 3), Architecture::Hybrid), Error);
}

TEST_CASE("decoder JSON - bit-exact round trip and corrupt input")
{
    const ArrayConfig cfg = ArrayConfig::ura(2, 2, 2);
    MlpDecoder d({kFeatureDim, 7, 12}, ParameterLayout::of(Architecture::Hybrid, cfg));
    d.initialize(5);
    const std::string text = to_json(d).dump();
    const MlpDecoder back = decoder_from_json(nlohmann::json::parse(text));
    CHECK(back.widths() == d.widths());
    CHECK(back.head() == d.head());
    CHECK(back.parameters() == d.parameters());
    CHECK(to_json(back).dump() == text);

    nlohmann::json broken = to_json(d);
    broken["parameters_f64le_base64"] = "abc";
    CHECK_THROWS_AS(decoder_from_json(broken), Error);
    broken = to_json(d);
    broken["widths"] = std::vector<Index>{kFeatureDim, 8, 12};
    CHECK_THROWS_AS(decoder_from_json(broken), Error);
    broken.erase("widths");
    CHECK_THROWS_AS(decoder_from_json(broken), Error);
}

TEST_CASE("train_decoder - a single achievable target is memorized about as well as direct synthesis")
{
    const ArrayConfig cfg = ArrayConfig::ura(8, 8, 2);
    const AngleGrid grid = AngleGrid::standard();
    std::mt19937_64 rng(9);
    const CVectorXd h = steering_vector(cfg, 75.0, 30.0).conjugate() + 0.6 * steering_vector(cfg, 105.0, -25.0).conjugate();
    const BeamPattern target = target_from_beamformer(cfg, grid, CVectorXd(h / h.norm()));

    SynthesisConfig syn;
    syn.seed = 2;
    const SynthesisResult direct = synthesize_direct(target, cfg, syn);
    const DecoderTraining trained = train_decoder({target}, cfg, syn, {kFeatureDim, 256, 128});
    REQUIRE(trained.trajectory.size() == 500);
    INFO("direct " << direct.final_loss.total << " decoder " << trained.final_losses[0]);
    CHECK(trained.final_losses[0] <= 1.2 * direct.final_loss.total + 1e-3);
    CHECK(trained.final_losses[0] <= trained.trajectory.front());

    // decode on the training target reproduces its recorded loss
    const PatternObjective objective(cfg, target);
    const Beamformer bf = decode(trained.decoder, target, cfg, Architecture::Digital);
    CHECK(objective.evaluate(bf, nullptr).total == Catch::Approx(trained.final_losses[0]).epsilon(1e-12));
}

TEST_CASE("train_decoder - beats the best constant beamformer on ten MRT targets")
{
    const ArrayConfig cfg = ArrayConfig::ura(8, 8, 2);
    const AngleGrid grid = AngleGrid::standard();
    ChannelModelConfig model;
    model.seed = 21;
    std::vector<BeamPattern> targets;
    for (const auto &ch : generate_channels(cfg, model, 10))
        targets.push_back(target_from_beamformer(cfg, grid, CVectorXd(ch.h / ch.h.norm())));

    SynthesisConfig syn;
    syn.seed = 3;
    syn.epochs = 300;
    const DecoderTraining trained = train_decoder(targets, cfg, syn, {kFeatureDim, 256, 128});
    double mean = 0.0;
    for (double l : trained.final_losses)
        mean += l / 10.0;

    SynthesisConfig constant = syn;
    constant.learning_rate = 1e-2;
    constant.epochs = 500;
    const SynthesisResult shared = synthesize_direct(targets, cfg, constant);
    INFO("decoder mean " << mean << " constant " << shared.final_loss.total);
    CHECK(mean < shared.final_loss.total);
}

TEST_CASE("train_decoder - determinism and errors")
{
    const ArrayConfig cfg = ArrayConfig::ura(2, 2, 1);
    const BeamPattern t = make_target(TargetSpec{TargetShape::Pencil, 90.0, 0.0, 0, 0, -25.0}, AngleGrid::standard());
    SynthesisConfig syn;
    syn.epochs = 5;
    syn.architecture = Architecture::Hybrid;
    const std::vector<Index> widths{kFeatureDim, 6, 6};
    const DecoderTraining a = train_decoder({t}, cfg, syn, widths);
    const DecoderTraining b = train_decoder({t}, cfg, syn, widths);
    CHECK(a.decoder.parameters() == b.decoder.parameters());
    CHECK(a.trajectory == b.trajectory);

    syn.architecture = Architecture::Analog;
    CHECK_THROWS_AS(train_decoder({t}, cfg, syn, widths), Error);
    syn.architecture = Architecture::Digital;
    CHECK_THROWS_AS(train_decoder({}, cfg, syn), Error);
    CHECK_THROWS_AS(train_decoder({t}, cfg, syn, {16, 8}), Error);
}
