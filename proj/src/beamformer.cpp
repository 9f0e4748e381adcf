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

#include "patternbf/beamformer.hpp"

#include <cmath>

namespace patternbf
{

std::string to_string(Architecture arch)
{
    switch (arch)
    {
    case Architecture::Digital: return "digital";
    case Architecture::Analog: return "analog";
    case Architecture::Hybrid: return "hybrid";
    }
    return "unknown";
}

Architecture architecture_from_string(const std::string &name)
{
    if (name == "digital") return Architecture::Digital;
    if (name == "analog") return Architecture::Analog;
    if (name == "hybrid") return Architecture::Hybrid;
    fail(ErrorKind::Unsupported, "unknown architecture '" + name + "'");
}

Architecture architecture_of(const Beamformer &bf)
{
    return static_cast<Architecture>(bf.index());
}

CMatrixXd rf_matrix(const Hybrid &bf)
{
    const double scale = 1.0 / std::sqrt(static_cast<double>(bf.phi_rf.rows()));
    return bf.phi_rf.unaryExpr([scale](double phi) { return std::polar(scale, phi); });
}

CVectorXd excitation(const Beamformer &bf)
{
    if (const auto *d = std::get_if<Digital>(&bf))
        return d->w;
    if (const auto *a = std::get_if<Analog>(&bf))
    {
        const double scale = 1.0 / std::sqrt(static_cast<double>(a->phases.size()));
        return a->phases.unaryExpr([scale](double phi) { return std::polar(scale, phi); });
    }
    const auto &h = std::get<Hybrid>(bf);
    if (h.w_bb.size() != h.phi_rf.cols())
        fail(ErrorKind::InvalidArgument, "baseband length does not match the RF chain count");
    return rf_matrix(h) * h.w_bb;
}

namespace
{
void check_dimensions(const Beamformer &bf, const ArrayConfig &cfg)
{
    const Index n_t = cfg.n_t();
    std::visit(
        [&](const auto &b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, Digital>)
            {
                if (b.w.size() != n_t)
                    fail(ErrorKind::InvalidArgument, "digital weight count does not match the array");
            }
            else if constexpr (std::is_same_v<T, Analog>)
            {
                if (b.phases.size() != n_t)
                    fail(ErrorKind::InvalidArgument, "analog phase count does not match the array");
            }
            else
            {
                if (b.phi_rf.rows() != n_t || b.phi_rf.cols() != cfg.n_rf || b.w_bb.size() != cfg.n_rf)
                    fail(ErrorKind::InvalidArgument, "hybrid dimensions do not match the array");
            }
        },
        bf);
}
} // namespace

CVectorXd realize(const Beamformer &bf, const ArrayConfig &cfg)
{
    check_dimensions(bf, cfg);
    CVectorXd f = excitation(bf);
    const double norm = f.norm();
    if (!std::isfinite(norm))
        fail(ErrorKind::NonFinite, "beamformer realizes to a non-finite vector");
    if (!(norm > 0.0))
        fail(ErrorKind::DegenerateInput, "beamformer realizes to a zero vector");
    if (architecture_of(bf) == Architecture::Analog)
        return f; // unit norm by construction
    return f / norm;
}

Analog analog_from_hybrid(const Hybrid &bf, const ArrayConfig &cfg)
{
    const CVectorXd f = realize(bf, cfg);
    Analog out;
    out.phases.resize(f.size());
    for (Index l = 0; l < f.size(); ++l)
    {
        if (f(l) == cd(0.0, 0.0))
            fail(ErrorKind::DegenerateInput, "hybrid vector has a zero element; its phase is undefined");
        out.phases(l) = std::arg(f(l));
    }
    return out;
}

Index ParameterLayout::size() const
{
    switch (architecture)
    {
    case Architecture::Digital: return 2 * n_t;
    case Architecture::Analog: return n_t;
    case Architecture::Hybrid: return (n_t + 2) * n_rf;
    }
    return 0;
}

ParameterLayout ParameterLayout::of(Architecture arch, const ArrayConfig &cfg)
{
    return {arch, cfg.n_t(), arch == Architecture::Hybrid ? cfg.n_rf : 0};
}

ParameterLayout parameter_layout(const Beamformer &bf)
{
    if (const auto *d = std::get_if<Digital>(&bf))
        return {Architecture::Digital, d->w.size(), 0};
    if (const auto *a = std::get_if<Analog>(&bf))
        return {Architecture::Analog, a->phases.size(), 0};
    const auto &h = std::get<Hybrid>(bf);
    return {Architecture::Hybrid, h.phi_rf.rows(), h.phi_rf.cols()};
}

VectorXd pack_parameters(const Beamformer &bf)
{
    const ParameterLayout layout = parameter_layout(bf);
    VectorXd p(layout.size());
    if (const auto *d = std::get_if<Digital>(&bf))
    {
        for (Index l = 0; l < layout.n_t; ++l)
        {
            p(2 * l) = d->w(l).real();
            p(2 * l + 1) = d->w(l).imag();
        }
    }
    else if (const auto *a = std::get_if<Analog>(&bf))
    {
        p = a->phases;
    }
    else
    {
        const auto &h = std::get<Hybrid>(bf);
        const Index n_phi = layout.n_t * layout.n_rf;
        p.head(n_phi) = Eigen::Map<const VectorXd>(h.phi_rf.data(), n_phi);
        for (Index r = 0; r < layout.n_rf; ++r)
        {
            p(n_phi + 2 * r) = h.w_bb(r).real();
            p(n_phi + 2 * r + 1) = h.w_bb(r).imag();
        }
    }
    return p;
}

Beamformer unpack_parameters(const ParameterLayout &layout, const Eigen::Ref<const VectorXd> &params)
{
    if (params.size() != layout.size())
        fail(ErrorKind::InvalidArgument, "parameter vector length does not match the layout");
    switch (layout.architecture)
    {
    case Architecture::Digital: {
        Digital d;
        d.w.resize(layout.n_t);
        for (Index l = 0; l < layout.n_t; ++l)
            d.w(l) = cd(params(2 * l), params(2 * l + 1));
        return d;
    }
    case Architecture::Analog:
        return Analog{params};
    case Architecture::Hybrid: {
        Hybrid h;
        const Index n_phi = layout.n_t * layout.n_rf;
        h.phi_rf = Eigen::Map<const MatrixXd>(params.data(), layout.n_t, layout.n_rf);
        h.w_bb.resize(layout.n_rf);
        for (Index r = 0; r < layout.n_rf; ++r)
            h.w_bb(r) = cd(params(n_phi + 2 * r), params(n_phi + 2 * r + 1));
        return h;
    }
    }
    fail(ErrorKind::Unsupported, "unknown architecture");
}

VectorXd parameter_gradient(const Beamformer &bf, const CVectorXd &grad_f)
{
    const ParameterLayout layout = parameter_layout(bf);
    if (grad_f.size() != layout.n_t)
        fail(ErrorKind::InvalidArgument, "excitation gradient length does not match the beamformer");
    VectorXd g(layout.size());
    const cd j(0.0, 1.0);

    if (layout.architecture == Architecture::Digital)
    {
        for (Index l = 0; l < layout.n_t; ++l)
        {
            g(2 * l) = grad_f(l).real();
            g(2 * l + 1) = grad_f(l).imag();
        }
    }
    else if (layout.architecture == Architecture::Analog)
    {
        const CVectorXd f = excitation(bf);
        for (Index l = 0; l < layout.n_t; ++l)
            g(l) = (std::conj(grad_f(l)) * j * f(l)).real();
    }
    else
    {
        const auto &h = std::get<Hybrid>(bf);
        const CMatrixXd F = rf_matrix(h);
        for (Index r = 0; r < layout.n_rf; ++r)
            for (Index l = 0; l < layout.n_t; ++l)
                g(r * layout.n_t + l) = (std::conj(grad_f(l)) * j * F(l, r) * h.w_bb(r)).real();
        const CVectorXd q = F.adjoint() * grad_f;
        const Index n_phi = layout.n_t * layout.n_rf;
        for (Index r = 0; r < layout.n_rf; ++r)
        {
            g(n_phi + 2 * r) = q(r).real();
            g(n_phi + 2 * r + 1) = q(r).imag();
        }
    }
    return g;
}

namespace
{
nlohmann::json complex_array(const CVectorXd &v)
{
    nlohmann::json out = nlohmann::json::array();
    for (Index k = 0; k < v.size(); ++k)
        out.push_back({v(k).real(), v(k).imag()});
    return out;
}

CVectorXd parse_complex_array(const nlohmann::json &j, const char *field)
{
    if (!j.is_array())
        fail(ErrorKind::Parse, std::string("field '") + field + "' must be an array of [re, im] pairs");
    CVectorXd v(static_cast<Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k)
    {
        const auto &pair = j[k];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            fail(ErrorKind::Parse, std::string("field '") + field + "' entry " + std::to_string(k) +
                                       " is not a [re, im] pair");
        v(static_cast<Index>(k)) = cd(pair[0].get<double>(), pair[1].get<double>());
    }
    return v;
}

VectorXd parse_real_array(const nlohmann::json &j, const char *field)
{
    if (!j.is_array())
        fail(ErrorKind::Parse, std::string("field '") + field + "' must be an array of numbers");
    VectorXd v(static_cast<Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k)
    {
        if (!j[k].is_number())
            fail(ErrorKind::Parse, std::string("field '") + field + "' entry " + std::to_string(k) +
                                       " is not a number");
        v(static_cast<Index>(k)) = j[k].get<double>();
    }
    return v;
}

const nlohmann::json &require(const nlohmann::json &j, const char *field)
{
    if (!j.is_object() || !j.contains(field))
        fail(ErrorKind::Parse, std::string("beamformer JSON lacks field '") + field + "'");
    return j.at(field);
}
} // namespace

nlohmann::json to_json(const Beamformer &bf)
{
    nlohmann::json j;
    j["architecture"] = to_string(architecture_of(bf));
    if (const auto *d = std::get_if<Digital>(&bf))
    {
        j["w"] = complex_array(d->w);
    }
    else if (const auto *a = std::get_if<Analog>(&bf))
    {
        j["phases"] = std::vector<double>(a->phases.data(), a->phases.data() + a->phases.size());
    }
    else
    {
        const auto &h = std::get<Hybrid>(bf);
        nlohmann::json columns = nlohmann::json::array();
        for (Index r = 0; r < h.phi_rf.cols(); ++r)
        {
            const VectorXd col = h.phi_rf.col(r);
            columns.push_back(std::vector<double>(col.data(), col.data() + col.size()));
        }
        j["phi_rf"] = columns;
        j["w_bb"] = complex_array(h.w_bb);
    }
    return j;
}

Beamformer beamformer_from_json(const nlohmann::json &j)
{
    const auto &tag = require(j, "architecture");
    if (!tag.is_string())
        fail(ErrorKind::Parse, "beamformer 'architecture' must be a string");
    switch (architecture_from_string(tag.get<std::string>()))
    {
    case Architecture::Digital:
        return Digital{parse_complex_array(require(j, "w"), "w")};
    case Architecture::Analog:
        return Analog{parse_real_array(require(j, "phases"), "phases")};
    case Architecture::Hybrid: {
        const auto &cols = require(j, "phi_rf");
        if (!cols.is_array() || cols.empty())
            fail(ErrorKind::Parse, "field 'phi_rf' must be a non-empty list of columns");
        Hybrid h;
        for (std::size_t r = 0; r < cols.size(); ++r)
        {
            const VectorXd col = parse_real_array(cols[r], "phi_rf");
            if (r == 0)
                h.phi_rf.resize(col.size(), static_cast<Index>(cols.size()));
            else if (col.size() != h.phi_rf.rows())
                fail(ErrorKind::Parse, "phi_rf columns have different lengths");
            h.phi_rf.col(static_cast<Index>(r)) = col;
        }
        h.w_bb = parse_complex_array(require(j, "w_bb"), "w_bb");
        if (h.w_bb.size() != h.phi_rf.cols())
            fail(ErrorKind::Parse, "w_bb length does not match the number of phi_rf columns");
        return h;
    }
    }
    fail(ErrorKind::Unsupported, "unknown architecture");
}

} // namespace patternbf
