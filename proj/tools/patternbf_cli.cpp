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


// Command-line front end: channel generation, target generation, synthesis,
// decoder training, evaluation sweeps and pattern export.

#include "patternbf/baselines.hpp"
#include "patternbf/decoder.hpp"
#include "patternbf/eval.hpp"
#include "patternbf/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace patternbf;

namespace
{

struct Setup
{
    nlohmann::json root = nlohmann::json::object();
    ArrayConfig array = ArrayConfig::standard();
    AngleGrid grid = AngleGrid::standard();
};

// Optional "array" and "grid" sections are shared by every subcommand config.
Setup load_setup(const std::string &path)
{
    Setup s;
    if (path.empty())
        return s;
    s.root = read_json_file(path);
    if (!s.root.is_object())
        fail(ErrorKind::Parse, "'" + path + "' must hold a JSON object");
    if (s.root.contains("array"))
        s.array = array_config_from_json(s.root.at("array"));
    if (s.root.contains("grid"))
        s.grid = angle_grid_from_json(s.root.at("grid"));
    return s;
}

nlohmann::json section(const nlohmann::json &root, const char *key)
{
    return root.contains(key) ? root.at(key) : nlohmann::json::object();
}

fs::path sidecar_of(const fs::path &csv)
{
    fs::path p = csv;
    p.replace_extension(".json");
    return p;
}

nlohmann::json loss_json(const LossBreakdown &l)
{
    return {{"main_lobe", l.l_ml}, {"side_lobe", l.l_sl}, {"moderate", l.l_md}, {"total", l.total}};
}

nlohmann::json compliance_json(const ComplianceMetrics &m)
{
    return {{"main_lobe_max_deviation_db", m.main_lobe_max_deviation_db},
            {"main_lobe_within_fraction", m.main_lobe_within_fraction},
            {"side_lobe_violation_fraction", m.side_lobe_violation_fraction},
            {"moderate_rms_db", m.moderate_rms_db}};
}

struct Options
{
    std::string config, out, sidecar, report, plots, pgm;
    std::string shape, params, target, arch = "digital", mode = "direct", decoder;
    std::string targets, channels, methods = "mrt,dft,omp,direct-digital", snr = "-20:5:20", beamformer;
    std::optional<std::uint64_t> seed;
    std::size_t count = 10;
    bool timing = false;
};

void gen_channels(const Options &o)
{
    const Setup s = load_setup(o.config);
    ChannelModelConfig model = channel_model_from_json(section(s.root, "model"));
    if (o.seed)
        model.seed = *o.seed;
    const auto channels = generate_channels(s.array, model, o.count);
    save_channels(o.out, channels, o.sidecar.empty() ? std::nullopt : std::optional<fs::path>(o.sidecar));
}

void gen_target(const Options &o)
{
    Setup s;
    TargetSpec spec;
    if (!o.params.empty())
    {
        s = load_setup(o.params);
        nlohmann::json fields = s.root;
        fields.erase("array");
        fields.erase("grid");
        spec = target_spec_from_json(fields);
    }
    spec.shape = target_shape_from_string(o.shape);
    spec.validate();
    const BeamPattern target = make_target(spec, s.grid);
    write_pattern_csv(o.out, target);
    write_json_file(sidecar_of(o.out), {{"target", to_json(spec)}, {"grid", to_json(s.grid)}});
}

void synth(const Options &o)
{
    const Setup s = load_setup(o.config);
    nlohmann::json syn_fields = s.root;
    syn_fields.erase("array");
    syn_fields.erase("grid");
    SynthesisConfig syn = synthesis_config_from_json(syn_fields);
    syn.architecture = architecture_from_string(o.arch);
    if (o.seed)
        syn.seed = *o.seed;
    syn.validate();

    const BeamPattern target = read_pattern_csv(o.target, s.grid);
    nlohmann::json report = {{"mode", o.mode}, {"architecture", to_string(syn.architecture)}};
    Beamformer bf;
    if (o.mode == "direct")
    {
        const SynthesisResult r = synthesize_direct(target, s.array, syn);
        bf = r.beamformer;
        report["config"] = to_json(syn);
        report["trajectory"] = r.trajectory;
        if (o.timing)
            report["wall_seconds"] = r.wall_seconds;
    }
    else if (o.mode == "decoder")
    {
        if (o.decoder.empty())
            fail(ErrorKind::InvalidArgument, "decoder mode needs --decoder <json>");
        const MlpDecoder dec = decoder_from_json(read_json_file(o.decoder));
        bf = decode(dec, target, s.array, syn.architecture);
    }
    else
        fail(ErrorKind::InvalidArgument, "mode must be 'direct' or 'decoder'");

    const PatternObjective objective(s.array, target);
    const CVectorXd f = realize(bf, s.array);
    const BeamPattern synthesized = objective.synthesize(f);
    report["loss"] = loss_json(objective.loss(f));
    report["pattern_mse_db2"] = pattern_mse(target, synthesized);
    report["compliance"] = compliance_json(pattern_compliance(target, synthesized, objective.mask()));

    nlohmann::json out = to_json(bf);
    out["array"] = to_json(s.array);
    write_json_file(o.out, out);
    if (!o.report.empty())
        write_json_file(o.report, report);
}

void train(const Options &o)
{
    const Setup s = load_setup(o.config);
    nlohmann::json syn_fields = s.root;
    syn_fields.erase("array");
    syn_fields.erase("grid");
    syn_fields.erase("widths");
    SynthesisConfig syn = synthesis_config_from_json(syn_fields);
    syn.architecture = architecture_from_string(o.arch);
    if (o.seed)
        syn.seed = *o.seed;
    std::vector<Index> widths;
    if (s.root.contains("widths"))
        widths = s.root.at("widths").get<std::vector<Index>>();

    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(o.targets))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        fail(ErrorKind::InvalidArgument, "no .csv targets in '" + o.targets + "'");
    std::vector<BeamPattern> targets;
    for (const auto &f : files)
        targets.push_back(read_pattern_csv(f, s.grid));

    const DecoderTraining t = train_decoder(targets, s.array, syn, widths);
    write_json_file(o.out, to_json(t.decoder));
    if (!o.report.empty())
    {
        nlohmann::json report = {{"config", to_json(syn)},
                                 {"targets", files.size()},
                                 {"trajectory", t.trajectory},
                                 {"final_losses", t.final_losses}};
        if (o.timing)
            report["wall_seconds"] = t.wall_seconds;
        write_json_file(o.report, report);
    }
}

void evaluate(const Options &o)
{
    const Setup s = load_setup(o.config);
    EvalConfig eval = eval_config_from_json(section(s.root, "eval"));
    eval.grid = s.grid;
    eval.snr_db = parse_snr_list(o.snr);
    eval.methods.clear();
    for (const auto m : split_csv_line(o.methods))
        eval.methods.emplace_back(m);
    if (o.seed)
        eval.seed = *o.seed;
    eval.keep_patterns = !o.plots.empty();
    eval.validate();

    const auto channels = load_channels(o.channels, o.sidecar.empty() ? std::nullopt : std::optional<fs::path>(o.sidecar),
                                        s.array.n_t());
    const EvalReport report = run_sweep(s.array, eval, channels);
    for (const auto &m : report.methods)
        if (m.failures > 0)
            std::cerr << "warning: " << m.name << " failed on " << m.failures << " channel(s)\n";
    if (!o.report.empty())
        write_json_file(o.report, to_json(report, o.timing));

    if (!o.plots.empty())
    {
        fs::create_directories(o.plots);
        std::string csv = "snr_db";
        for (const auto &m : report.methods)
            csv += "," + m.name;
        csv += "\n";
        for (std::size_t i = 0; i < report.snr_db.size(); ++i)
        {
            csv += format_double(report.snr_db[i]);
            for (const auto &m : report.methods)
                csv += "," + format_double(m.mean_se[i]);
            csv += "\n";
        }
        write_text_file(fs::path(o.plots) / "spectral_efficiency.csv", csv);
        for (const auto &[name, pattern] : report.patterns)
            write_pattern_pgm(fs::path(o.plots) / ("pattern_" + name + ".pgm"), pattern);
    }
}

void pattern(const Options &o)
{
    Setup s = load_setup(o.config);
    const nlohmann::json j = read_json_file(o.beamformer);
    if (j.contains("array") && !s.root.contains("array"))
        s.array = array_config_from_json(j.at("array"));
    const Beamformer bf = beamformer_from_json(j);
    const BeamPattern p = compute_pattern(s.array, s.grid, realize(bf, s.array));
    write_pattern_csv(o.out, p);
    if (!o.pgm.empty())
        write_pattern_pgm(o.pgm, p);
}

void report_error(ErrorKind kind, const std::string &message)
{
    const nlohmann::json err = {{"error", {{"kind", error_kind_name(kind)}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Pattern-driven beamformer synthesis toolkit"};
    app.require_subcommand(1);
    Options o;

    auto *gc = app.add_subcommand("gen-channels", "Generate clustered mmWave channels");
    gc->add_option("--config", o.config, "JSON with optional 'array' and 'model' sections")->check(CLI::ExistingFile);
    gc->add_option("--out", o.out, "Channel CSV")->required();
    gc->add_option("--sidecar", o.sidecar, "Path-parameter JSON");
    gc->add_option("--seed", o.seed, "Random seed");
    gc->add_option("--count", o.count, "Number of channels");

    auto *gt = app.add_subcommand("gen-target", "Write a synthetic target pattern");
    gt->add_option("--shape", o.shape, "pencil | triangular | flattop")->required();
    gt->add_option("--params", o.params, "Target geometry JSON")->check(CLI::ExistingFile);
    gt->add_option("--out", o.out, "Pattern CSV")->required();

    auto *sy = app.add_subcommand("synth", "Synthesize a beamformer for a target pattern");
    sy->add_option("--target", o.target, "Target pattern CSV")->required()->check(CLI::ExistingFile);
    sy->add_option("--arch", o.arch, "digital | analog | hybrid");
    sy->add_option("--mode", o.mode, "direct | decoder");
    sy->add_option("--config", o.config, "Synthesis JSON")->check(CLI::ExistingFile);
    sy->add_option("--decoder", o.decoder, "Trained decoder JSON (decoder mode)")->check(CLI::ExistingFile);
    sy->add_option("--out", o.out, "Beamformer JSON")->required();
    sy->add_option("--report", o.report, "Report JSON");
    sy->add_option("--seed", o.seed, "Random seed");
    sy->add_flag("--timing", o.timing, "Include wall-clock times in the report");

    auto *td = app.add_subcommand("train-decoder", "Train a pattern-to-beamformer decoder");
    td->add_option("--targets", o.targets, "Directory of target CSVs")->required()->check(CLI::ExistingDirectory);
    td->add_option("--arch", o.arch, "digital | hybrid");
    td->add_option("--config", o.config, "Training JSON")->check(CLI::ExistingFile);
    td->add_option("--out", o.out, "Decoder JSON")->required();
    td->add_option("--report", o.report, "Report JSON");
    td->add_option("--seed", o.seed, "Random seed");
    td->add_flag("--timing", o.timing, "Include wall-clock times in the report");

    auto *ev = app.add_subcommand("eval", "Spectral-efficiency sweep over channels and methods");
    ev->add_option("--channels", o.channels, "Channel CSV")->required()->check(CLI::ExistingFile);
    ev->add_option("--sidecar", o.sidecar, "Path-parameter JSON")->check(CLI::ExistingFile);
    ev->add_option("--methods", o.methods, "Comma-separated method list");
    ev->add_option("--snr", o.snr, "first:step:last or list, dB");
    ev->add_option("--config", o.config, "JSON with optional 'array', 'grid', 'eval' sections")->check(CLI::ExistingFile);
    ev->add_option("--report", o.report, "Report JSON");
    ev->add_option("--plots", o.plots, "Directory for CSV/PGM plots");
    ev->add_option("--seed", o.seed, "Random seed");
    ev->add_flag("--timing", o.timing, "Include wall-clock times in the report");

    auto *pt = app.add_subcommand("pattern", "Export the beam pattern of a beamformer");
    pt->add_option("--beamformer", o.beamformer, "Beamformer JSON")->required()->check(CLI::ExistingFile);
    pt->add_option("--config", o.config, "JSON with optional 'array' and 'grid'")->check(CLI::ExistingFile);
    pt->add_option("--out", o.out, "Pattern CSV")->required();
    pt->add_option("--pgm", o.pgm, "PGM heatmap");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        report_error(ErrorKind::InvalidArgument, e.what());
        return 2;
    }

    try
    {
        if (*gc)
            gen_channels(o);
        else if (*gt)
            gen_target(o);
        else if (*sy)
            synth(o);
        else if (*td)
            train(o);
        else if (*ev)
            evaluate(o);
        else if (*pt)
            pattern(o);
    }
    catch (const Error &e)
    {
        report_error(e.kind(), e.what());
        return 1;
    }
    catch (const nlohmann::json::exception &e)
    {
        report_error(ErrorKind::Parse, e.what());
        return 1;
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        report_error(ErrorKind::Io, e.what());
        return 1;
    }
    return 0;
}
