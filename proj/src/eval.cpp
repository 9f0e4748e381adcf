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


#include "patternbf/eval.hpp"

#include "patternbf/baselines.hpp"
#include "patternbf/decoder.hpp"
#include "patternbf/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>

namespace patternbf
{

double spectral_efficiency(const CVectorXd &h, const CVectorXd &f, double snr_db)
{
    if (h.size() != f.size())
        fail(ErrorKind::InvalidArgument, "channel and beamformer lengths differ");
    if (std::abs(f.norm() - 1.0) > 1e-9)
        fail(ErrorKind::InvalidArgument, "spectral efficiency needs a unit-norm beamformer");
    const double gain = std::norm(h.dot(f)); // dot conjugates h
    return std::log2(1.0 + std::pow(10.0, snr_db / 10.0) * gain);
}

ComplianceMetrics pattern_compliance(const BeamPattern &target, const BeamPattern &synth, const RegionMask &mask,
                                     double tolerance_db)
{
    require_same_grid(target, synth);
    if (mask.cells() != target.cells())
        fail(ErrorKind::GridMismatch, "region mask does not match the pattern grid");
    const auto t = target.flat();
    const auto s = synth.flat();
    ComplianceMetrics out;
    std::size_t within = 0;
    for (const Index c : mask.main_lobe)
    {
        const double dev = std::abs(s(c) - t(c));
        out.main_lobe_max_deviation_db = std::max(out.main_lobe_max_deviation_db, dev);
        if (dev <= tolerance_db)
            ++within;
    }
    if (!mask.main_lobe.empty())
        out.main_lobe_within_fraction = static_cast<double>(within) / static_cast<double>(mask.main_lobe.size());
    std::size_t violations = 0;
    for (const Index c : mask.side_lobe)
        if (s(c) > t(c))
            ++violations;
    if (!mask.side_lobe.empty())
        out.side_lobe_violation_fraction = static_cast<double>(violations) / static_cast<double>(mask.side_lobe.size());
    double sq = 0.0;
    for (const Index c : mask.moderate)
        sq += (s(c) - t(c)) * (s(c) - t(c));
    if (!mask.moderate.empty())
        out.moderate_rms_db = std::sqrt(sq / static_cast<double>(mask.moderate.size()));
    return out;
}

std::vector<double> parse_snr_list(const std::string &text)
{
    std::vector<double> out;
    if (text.find(':') != std::string::npos)
    {
        const auto first_colon = text.find(':');
        const auto second_colon = text.find(':', first_colon + 1);
        if (second_colon == std::string::npos || text.find(':', second_colon + 1) != std::string::npos)
            fail(ErrorKind::Parse, "SNR range must be first:step:last");
        const std::string_view all(text);
        const double first = parse_double(all.substr(0, first_colon), "SNR range start");
        const double step = parse_double(all.substr(first_colon + 1, second_colon - first_colon - 1), "SNR range step");
        const double last = parse_double(all.substr(second_colon + 1), "SNR range end");
        if (!(step > 0.0) || last < first)
            fail(ErrorKind::InvalidArgument, "SNR range needs a positive step and last >= first");
        const auto count = static_cast<long>(std::floor((last - first) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i)
            out.push_back(first + static_cast<double>(i) * step);
        return out;
    }
    for (const auto field : split_csv_line(text))
        out.push_back(parse_double(field, "SNR list"));
    return out;
}

const std::vector<std::string> &known_methods()
{
    static const std::vector<std::string> names{
        "mrt",           "partial-csi",   "omp",          "dft",
        "ls",            "direct-digital", "direct-analog", "direct-hybrid",
        "decoder-digital", "decoder-hybrid", "decoder-analog"};
    return names;
}

void EvalConfig::validate() const
{
    if (snr_db.empty())
        fail(ErrorKind::InvalidArgument, "SNR list is empty");
    for (const double s : snr_db)
        if (!std::isfinite(s))
            fail(ErrorKind::InvalidArgument, "SNR values must be finite");
    if (methods.empty())
        fail(ErrorKind::InvalidArgument, "method list is empty");
    for (const auto &m : methods)
        if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
            fail(ErrorKind::Unsupported, "unknown method '" + m + "'");
    grid.validate();
    digital.validate();
    analog.validate();
    hybrid.validate();
    decoder.validate();
    if (dictionary_y < 1 || dictionary_z < 1)
        fail(ErrorKind::InvalidArgument, "dictionary grid must be positive");
}

nlohmann::json to_json(const EvalConfig &eval)
{
    return {{"snr_db", eval.snr_db},
            {"methods", eval.methods},
            {"seed", eval.seed},
            {"grid", to_json(eval.grid)},
            {"digital", to_json(eval.digital)},
            {"analog", to_json(eval.analog)},
            {"hybrid", to_json(eval.hybrid)},
            {"decoder", to_json(eval.decoder)},
            {"dictionary", {eval.dictionary_y, eval.dictionary_z}}};
}

EvalConfig eval_config_from_json(const nlohmann::json &j, EvalConfig base)
{
    if (!j.is_object())
        fail(ErrorKind::Parse, "eval config must be a JSON object");
    try
    {
        if (j.contains("snr_db"))
            base.snr_db = j.at("snr_db").is_string() ? parse_snr_list(j.at("snr_db").get<std::string>())
                                                     : j.at("snr_db").get<std::vector<double>>();
        base.methods = j.value("methods", base.methods);
        base.seed = j.value("seed", base.seed);
        if (j.contains("grid"))
            base.grid = angle_grid_from_json(j.at("grid"));
        auto arch_config = [&](const char *key, SynthesisConfig &syn, Architecture arch) {
            if (j.contains(key))
                syn = synthesis_config_from_json(j.at(key), syn);
            syn.architecture = arch;
        };
        arch_config("digital", base.digital, Architecture::Digital);
        arch_config("analog", base.analog, Architecture::Analog);
        arch_config("hybrid", base.hybrid, Architecture::Hybrid);
        if (j.contains("decoder"))
            base.decoder = synthesis_config_from_json(j.at("decoder"), base.decoder);
        if (j.contains("dictionary"))
        {
            const auto g = j.at("dictionary").get<std::vector<Index>>();
            if (g.size() != 2)
                fail(ErrorKind::Parse, "dictionary must be [g_y, g_z]");
            base.dictionary_y = g[0];
            base.dictionary_z = g[1];
        }
    }
    catch (const nlohmann::json::exception &e)
    {
        fail(ErrorKind::Parse, std::string("eval config: ") + e.what());
    }
    base.validate();
    return base;
}

const MethodReport &EvalReport::method(const std::string &name) const
{
    for (const auto &m : methods)
        if (m.name == name)
            return m;
    fail(ErrorKind::InvalidArgument, "report has no method '" + name + "'");
}

namespace
{
struct SweepContext
{
    const ArrayConfig &cfg;
    const EvalConfig &eval;
    const std::vector<Channel> &channels;
    std::vector<BeamPattern> targets;
    std::vector<CVectorXd> optimal;
    std::shared_ptr<const PatternOperator<double>> op;
    std::vector<RegionMask> masks;
};

using MethodFn = std::function<CVectorXd(std::size_t)>;

SynthesisConfig seeded(SynthesisConfig syn, std::uint64_t seed, std::size_t k)
{
    syn.seed = derive_seed(seed ^ syn.seed, k);
    return syn;
}

// Builds the per-channel beamformer function of a method; shared setup
// (dictionary, Gram factorization, decoder training) happens here once.
MethodFn make_method(const std::string &name, SweepContext &ctx)
{
    const ArrayConfig &cfg = ctx.cfg;
    if (name == "mrt")
        return [&ctx](std::size_t k) { return ctx.optimal[k]; };
    if (name == "partial-csi")
        return [&ctx, &cfg](std::size_t k) {
            return partial_csi_dbf(ctx.channels[k].paths, cfg).w;
        };
    if (name == "omp")
    {
        auto dict = std::make_shared<SteeringDictionary>(
            steering_dictionary(cfg, ctx.eval.dictionary_y, ctx.eval.dictionary_z));
        return [&ctx, &cfg, dict](std::size_t k) { return realize(omp_hybrid(ctx.optimal[k], cfg, *dict), cfg); };
    }
    if (name == "dft")
        return [&ctx, &cfg](std::size_t k) { return realize(dft_codebook_abf(ctx.channels[k].h, cfg), cfg); };
    if (name == "ls")
    {
        auto ls = std::make_shared<LsRecovery>(cfg, ctx.eval.grid);
        return [&ctx, ls](std::size_t k) { return ls->recover(phase_pattern(*ctx.op, ctx.optimal[k])).w; };
    }
    if (name.rfind("direct-", 0) == 0)
    {
        const Architecture arch = architecture_from_string(name.substr(7));
        const SynthesisConfig &base = arch == Architecture::Digital  ? ctx.eval.digital
                                      : arch == Architecture::Analog ? ctx.eval.analog
                                                                     : ctx.eval.hybrid;
        return [&ctx, &cfg, &base, arch](std::size_t k) {
            SynthesisConfig syn = seeded(base, ctx.eval.seed, k);
            syn.architecture = arch;
            return realize(synthesize_direct(ctx.targets[k], cfg, syn).beamformer, cfg);
        };
    }
    // decoder-*: one decoder per head architecture, trained on every target of the sweep.
    const Architecture requested = architecture_from_string(name.substr(8));
    SynthesisConfig syn = ctx.eval.decoder;
    syn.architecture = requested == Architecture::Digital ? Architecture::Digital : Architecture::Hybrid;
    auto decoder = std::make_shared<MlpDecoder>(train_decoder(ctx.targets, cfg, syn).decoder);
    return [&ctx, &cfg, decoder, requested](std::size_t k) {
        return realize(decode(*decoder, ctx.targets[k], cfg, requested), cfg);
    };
}
} // namespace

EvalReport run_sweep(const ArrayConfig &cfg, const EvalConfig &eval, const std::vector<Channel> &channels)
{
    cfg.validate();
    eval.validate();
    if (channels.empty())
        fail(ErrorKind::InvalidArgument, "evaluation needs at least one channel");
    for (const auto &ch : channels)
        if (ch.h.size() != cfg.n_t())
            fail(ErrorKind::InvalidArgument, "channel length does not match the array");

    SweepContext ctx{cfg, eval, channels, {}, {}, std::make_shared<const PatternOperator<double>>(cfg, eval.grid), {}};
    for (const auto &ch : channels)
    {
        ctx.optimal.push_back(mrt(ch.h).w);
        ctx.targets.push_back(compute_pattern(*ctx.op, eval.grid, ctx.optimal.back()));
        ctx.masks.push_back(segment_regions(ctx.targets.back()));
    }

    const std::size_t n_snr = eval.snr_db.size();
    std::vector<std::vector<double>> optimal_se(channels.size(), std::vector<double>(n_snr));
    for (std::size_t k = 0; k < channels.size(); ++k)
        for (std::size_t s = 0; s < n_snr; ++s)
            optimal_se[k][s] = spectral_efficiency(channels[k].h, ctx.optimal[k], eval.snr_db[s]);

    EvalReport report;
    report.snr_db = eval.snr_db;
    report.channels = channels.size();
    if (eval.keep_patterns)
        report.patterns.emplace_back("target", ctx.targets.front());

    for (const auto &name : eval.methods)
    {
        const auto start = std::chrono::steady_clock::now();
        MethodReport row;
        row.name = name;
        std::vector<double> se_sum(n_snr, 0.0), opt_sum(n_snr, 0.0);
        std::size_t successes = 0;

        MethodFn method;
        try
        {
            method = make_method(name, ctx);
        }
        catch (const std::exception &e)
        {
            row.failures = channels.size();
            row.failure_messages.push_back(e.what());
        }

        for (std::size_t k = 0; method && k < channels.size(); ++k)
        {
            try
            {
                const CVectorXd f = method(k);
                std::vector<double> se(n_snr);
                for (std::size_t s = 0; s < n_snr; ++s)
                    se[s] = spectral_efficiency(channels[k].h, f, eval.snr_db[s]);
                const BeamPattern synth = compute_pattern(*ctx.op, eval.grid, f);
                const ComplianceMetrics m = pattern_compliance(ctx.targets[k], synth, ctx.masks[k]);
                for (std::size_t s = 0; s < n_snr; ++s)
                {
                    se_sum[s] += se[s];
                    opt_sum[s] += optimal_se[k][s];
                }
                row.compliance.main_lobe_max_deviation_db += m.main_lobe_max_deviation_db;
                row.compliance.main_lobe_within_fraction += m.main_lobe_within_fraction;
                row.compliance.side_lobe_violation_fraction += m.side_lobe_violation_fraction;
                row.compliance.moderate_rms_db += m.moderate_rms_db;
                ++successes;
                if (eval.keep_patterns && k == 0)
                    report.patterns.emplace_back(name, synth);
            }
            catch (const std::exception &e)
            {
                ++row.failures;
                row.failure_messages.push_back("channel " + std::to_string(k) + ": " + e.what());
            }
        }

        row.mean_se.assign(n_snr, 0.0);
        row.percent_of_optimal.assign(n_snr, 0.0);
        if (successes > 0)
        {
            const double inv = 1.0 / static_cast<double>(successes);
            for (std::size_t s = 0; s < n_snr; ++s)
            {
                row.mean_se[s] = se_sum[s] * inv;
                // Cauchy-Schwarz bounds the ratio by one; clamp rounding excess.
                row.percent_of_optimal[s] = opt_sum[s] > 0.0 ? std::min(1.0, se_sum[s] / opt_sum[s]) : 1.0;
            }
            double total = 0.0;
            for (const double p : row.percent_of_optimal)
                total += p;
            row.mean_percent_of_optimal = total / static_cast<double>(n_snr);
            row.compliance.main_lobe_max_deviation_db *= inv;
            row.compliance.main_lobe_within_fraction *= inv;
            row.compliance.side_lobe_violation_fraction *= inv;
            row.compliance.moderate_rms_db *= inv;
        }
        else
        {
            row.compliance = {};
            row.compliance.main_lobe_within_fraction = 0.0;
        }
        row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.methods.push_back(std::move(row));
    }
    return report;
}

nlohmann::json to_json(const EvalReport &report, bool timing)
{
    nlohmann::json methods = nlohmann::json::array();
    for (const auto &m : report.methods)
    {
        nlohmann::json row = {{"name", m.name},
                              {"mean_spectral_efficiency", m.mean_se},
                              {"percent_of_optimal", m.percent_of_optimal},
                              {"mean_percent_of_optimal", m.mean_percent_of_optimal},
                              {"compliance",
                               {{"main_lobe_max_deviation_db", m.compliance.main_lobe_max_deviation_db},
                                {"main_lobe_within_fraction", m.compliance.main_lobe_within_fraction},
                                {"side_lobe_violation_fraction", m.compliance.side_lobe_violation_fraction},
                                {"moderate_rms_db", m.compliance.moderate_rms_db}}},
                              {"failures", m.failures},
                              {"failure_messages", m.failure_messages}};
        if (timing)
            row["wall_seconds"] = m.wall_seconds;
        methods.push_back(std::move(row));
    }
    return {{"snr_db", report.snr_db}, {"channels", report.channels}, {"methods", std::move(methods)}};
}

} // namespace patternbf
