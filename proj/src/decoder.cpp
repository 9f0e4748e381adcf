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

#include "patternbf/decoder.hpp"

#include <array>
#include <bit>
#include <chrono>
#include <cstring>
#include <limits>

namespace patternbf
{

std::pair<Index, Index> feature_bin_range(Index bin)
{
    return {kFeaturizerGridSize * bin / kFeatureBins, kFeaturizerGridSize * (bin + 1) / kFeatureBins};
}

VectorXd featurize(const BeamPattern &pattern)
{
    if (pattern.rows() != kFeaturizerGridSize || pattern.cols() != kFeaturizerGridSize)
        fail(ErrorKind::Unsupported, "featurizer needs a 180 x 180 pattern");
    VectorXd features(kFeatureDim);
    for (Index bi = 0; bi < kFeatureBins; ++bi)
    {
        const auto [r0, r1] = feature_bin_range(bi);
        for (Index bj = 0; bj < kFeatureBins; ++bj)
        {
            const auto [c0, c1] = feature_bin_range(bj);
            const double mean = pattern.values.block(r0, c0, r1 - r0, c1 - c0).mean();
            features(bi * kFeatureBins + bj) = (mean - kPatternFloorDb) / -kPatternFloorDb;
        }
    }
    return features;
}

MlpDecoder::MlpDecoder(std::vector<Index> widths, ParameterLayout head)
    : widths_(std::move(widths)), head_(head)
{
    if (widths_.size() < 2)
        fail(ErrorKind::InvalidArgument, "decoder needs at least an input and an output width");
    for (const Index w : widths_)
        if (w < 1)
            fail(ErrorKind::InvalidArgument, "decoder layer widths must be positive");
    if (widths_.back() != head_.size())
        fail(ErrorKind::InvalidArgument, "decoder output width does not match the beamformer parameter count");

    Index offset = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l)
    {
        offsets_.push_back(offset);
        offset += widths_[l + 1] * widths_[l] + widths_[l + 1];
    }
    offsets_.push_back(offset);
    params_ = VectorXd::Zero(offset);
}

MlpDecoder MlpDecoder::standard(Architecture arch, const ArrayConfig &cfg)
{
    if (arch == Architecture::Analog)
        fail(ErrorKind::Unsupported, "analog output comes from a hybrid head");
    const ParameterLayout head = ParameterLayout::of(arch, cfg);
    return MlpDecoder({kFeatureDim, 1024, 2048, 1024, head.size()}, head);
}

Eigen::Map<const MatrixXd> MlpDecoder::weight(Index layer) const
{
    return {params_.data() + offsets_[layer], widths_[layer + 1], widths_[layer]};
}

Eigen::Map<const VectorXd> MlpDecoder::bias(Index layer) const
{
    return {params_.data() + offsets_[layer] + widths_[layer + 1] * widths_[layer], widths_[layer + 1]};
}

void MlpDecoder::initialize(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    for (Index l = 0; l < layers(); ++l)
    {
        const double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
        std::uniform_real_distribution<double> uniform(-bound, bound);
        const Index count = offsets_[l + 1] - offsets_[l];
        for (Index k = 0; k < count; ++k)
            params_(offsets_[l] + k) = uniform(rng);
    }
}

MatrixXd MlpDecoder::forward(const MatrixXd &input) const
{
    Cache cache;
    return forward(input, cache);
}

MatrixXd MlpDecoder::forward(const MatrixXd &input, Cache &cache) const
{
    if (input.rows() != widths_.front())
        fail(ErrorKind::InvalidArgument, "decoder input has the wrong feature dimension");
    cache.inputs.assign(static_cast<std::size_t>(layers()), MatrixXd());
    cache.pre_act.assign(static_cast<std::size_t>(layers()), MatrixXd());

    MatrixXd a = input;
    for (Index l = 0; l < layers(); ++l)
    {
        MatrixXd z = weight(l) * a;
        z.colwise() += bias(l);
        cache.inputs[l] = std::move(a);
        if (l + 1 < layers())
            a = z.cwiseMax(0.0);
        else
            a = z;
        cache.pre_act[l] = std::move(z);
    }
    return a;
}

VectorXd MlpDecoder::backward(const Cache &cache, const MatrixXd &d_output) const
{
    if (static_cast<Index>(cache.inputs.size()) != layers())
        fail(ErrorKind::InvalidArgument, "decoder cache does not belong to this network");
    VectorXd grad(params_.size());
    MatrixXd delta = d_output;
    for (Index l = layers() - 1; l >= 0; --l)
    {
        const Index out = widths_[l + 1], in = widths_[l];
        Eigen::Map<MatrixXd>(grad.data() + offsets_[l], out, in).noalias() = delta * cache.inputs[l].transpose();
        Eigen::Map<VectorXd>(grad.data() + offsets_[l] + out * in, out) = delta.rowwise().sum();
        if (l > 0)
        {
            MatrixXd upstream = weight(l).transpose() * delta;
            delta = upstream.cwiseProduct((cache.pre_act[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
    return grad;
}

namespace
{
constexpr char kBase64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string encode_doubles(const VectorXd &values)
{
    std::string bytes(static_cast<std::size_t>(values.size()) * 8, '\0');
    for (Index k = 0; k < values.size(); ++k)
    {
        const auto bits = std::bit_cast<std::uint64_t>(values(k));
        for (int b = 0; b < 8; ++b)
            bytes[static_cast<std::size_t>(k) * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3)
    {
        std::uint32_t chunk = static_cast<std::uint8_t>(bytes[i]) << 16;
        const std::size_t n = std::min<std::size_t>(3, bytes.size() - i);
        if (n > 1)
            chunk |= static_cast<std::uint8_t>(bytes[i + 1]) << 8;
        if (n > 2)
            chunk |= static_cast<std::uint8_t>(bytes[i + 2]);
        out += kBase64[(chunk >> 18) & 63];
        out += kBase64[(chunk >> 12) & 63];
        out += n > 1 ? kBase64[(chunk >> 6) & 63] : '=';
        out += n > 2 ? kBase64[chunk & 63] : '=';
    }
    return out;
}

VectorXd decode_doubles(const std::string &text, Index expected)
{
    std::array<int, 256> lookup;
    lookup.fill(-1);
    for (int k = 0; k < 64; ++k)
        lookup[static_cast<unsigned char>(kBase64[k])] = k;

    if (text.size() % 4 != 0)
        fail(ErrorKind::Parse, "decoder parameters are not valid base64");
    std::string bytes;
    bytes.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4)
    {
        std::uint32_t chunk = 0;
        int pad = 0;
        for (int k = 0; k < 4; ++k)
        {
            const char ch = text[i + k];
            int v = 0;
            if (ch == '=')
                ++pad;
            else if ((v = lookup[static_cast<unsigned char>(ch)]) < 0 || pad > 0)
                fail(ErrorKind::Parse, "decoder parameters are not valid base64");
            chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
        }
        bytes += static_cast<char>((chunk >> 16) & 0xFF);
        if (pad < 2)
            bytes += static_cast<char>((chunk >> 8) & 0xFF);
        if (pad < 1)
            bytes += static_cast<char>(chunk & 0xFF);
    }
    if (static_cast<Index>(bytes.size()) != expected * 8)
        fail(ErrorKind::Parse, "decoder parameter count does not match its widths");
    VectorXd values(expected);
    for (Index k = 0; k < expected; ++k)
    {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes[static_cast<std::size_t>(k) * 8 + b]))
                    << (8 * b);
        values(k) = std::bit_cast<double>(bits);
    }
    return values;
}
} // namespace

nlohmann::json to_json(const MlpDecoder &dec)
{
    return {{"architecture", to_string(dec.head().architecture)},
            {"n_t", dec.head().n_t},
            {"n_rf", dec.head().n_rf},
            {"widths", dec.widths()},
            {"parameters_f64le_base64", encode_doubles(dec.parameters())}};
}

MlpDecoder decoder_from_json(const nlohmann::json &j)
{
    try
    {
        ParameterLayout head;
        head.architecture = architecture_from_string(j.at("architecture").get<std::string>());
        head.n_t = j.at("n_t").get<Index>();
        head.n_rf = j.at("n_rf").get<Index>();
        MlpDecoder dec(j.at("widths").get<std::vector<Index>>(), head);
        dec.parameters() =
            decode_doubles(j.at("parameters_f64le_base64").get<std::string>(), dec.parameter_count());
        return dec;
    }
    catch (const nlohmann::json::exception &e)
    {
        fail(ErrorKind::Parse, std::string("decoder JSON: ") + e.what());
    }
}

Beamformer decode(const MlpDecoder &dec, const BeamPattern &target, const ArrayConfig &cfg, Architecture requested)
{
    const ParameterLayout &head = dec.head();
    if (head.n_t != cfg.n_t() || (head.architecture == Architecture::Hybrid && head.n_rf != cfg.n_rf))
        fail(ErrorKind::InvalidArgument, "decoder head does not match the array configuration");
    const VectorXd output = dec.forward(featurize(target)).col(0);
    const Beamformer raw = unpack_parameters(head, output);
    if (requested == head.architecture)
        return canonicalize(raw, cfg);
    if (requested == Architecture::Analog && head.architecture == Architecture::Hybrid)
        return analog_from_hybrid(std::get<Hybrid>(raw), cfg);
    fail(ErrorKind::InvalidArgument,
         "a " + to_string(head.architecture) + " decoder cannot produce a " + to_string(requested) + " beamformer");
}

DecoderTraining train_decoder(const std::vector<BeamPattern> &targets, const ArrayConfig &cfg,
                              const SynthesisConfig &syn, std::vector<Index> widths)
{
    const auto start = std::chrono::steady_clock::now();
    syn.validate();
    cfg.validate();
    if (syn.architecture == Architecture::Analog)
        fail(ErrorKind::Unsupported, "decoders are trained with a digital or hybrid head");
    if (targets.empty())
        fail(ErrorKind::InvalidArgument, "no training targets given");

    const ParameterLayout head = ParameterLayout::of(syn.architecture, cfg);
    MlpDecoder dec = widths.empty() ? MlpDecoder::standard(syn.architecture, cfg) : MlpDecoder(widths, head);
    if (dec.widths().front() != kFeatureDim)
        fail(ErrorKind::InvalidArgument, "decoder input width must equal the feature dimension");
    dec.initialize(derive_seed(syn.seed, 0));

    const auto batch = static_cast<Index>(targets.size());
    MatrixXd features(kFeatureDim, batch);
    std::vector<PatternObjective> objectives;
    const auto op = std::make_shared<const PatternOperator<double>>(cfg, targets.front().grid);
    for (Index k = 0; k < batch; ++k)
    {
        const BeamPattern &target = targets[static_cast<std::size_t>(k)];
        target.validate();
        if (!(target.grid == targets.front().grid))
            fail(ErrorKind::GridMismatch, "training targets are sampled on different grids");
        features.col(k) = featurize(target);
        objectives.emplace_back(op, target, segment_regions(target));
    }

    Adam adam(dec.parameter_count(), syn.learning_rate, syn.beta1, syn.beta2, syn.epsilon);
    DecoderTraining out;
    VectorXd best_params = dec.parameters();
    double best = std::numeric_limits<double>::infinity();
    MlpDecoder::Cache cache;
    VectorXd sample_grad;

    auto mean_loss = [&](bool with_grad, MatrixXd *d_output) {
        const MatrixXd output = with_grad ? dec.forward(features, cache) : dec.forward(features);
        double sum = 0.0;
        for (Index k = 0; k < batch; ++k)
        {
            const Beamformer bf = unpack_parameters(head, output.col(k));
            const LossBreakdown l =
                objectives[static_cast<std::size_t>(k)].evaluate(bf, with_grad ? &sample_grad : nullptr);
            sum += l.total;
            if (with_grad)
                d_output->col(k) = sample_grad / static_cast<double>(batch);
        }
        return sum / static_cast<double>(batch);
    };

    MatrixXd d_output(head.size(), batch);
    for (int epoch = 0; epoch < syn.epochs; ++epoch)
    {
        double loss = 0.0;
        try
        {
            loss = mean_loss(true, &d_output);
        }
        catch (const Error &e)
        {
            if (e.kind() == ErrorKind::NonFinite)
                fail(ErrorKind::NonFinite, "decoder loss became non-finite at epoch " + std::to_string(epoch));
            throw;
        }
        if (!std::isfinite(loss) || !d_output.allFinite())
            fail(ErrorKind::NonFinite, "decoder loss became non-finite at epoch " + std::to_string(epoch));
        out.trajectory.push_back(loss);
        if (loss < best)
        {
            best = loss;
            best_params = dec.parameters();
        }
        adam.step(dec.parameters(), dec.backward(cache, d_output));
    }
    const double last = mean_loss(false, nullptr);
    if (std::isfinite(last) && last < best)
        best_params = dec.parameters();
    dec.parameters() = best_params;

    for (std::size_t k = 0; k < targets.size(); ++k)
    {
        const Beamformer bf = decode(dec, targets[k], cfg, syn.architecture);
        out.final_losses.push_back(objectives[k].evaluate(bf, nullptr).total);
    }
    out.decoder = std::move(dec);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace patternbf
