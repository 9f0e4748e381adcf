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

#include "patternbf/pattern.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace patternbf;
using patternbf::testing::random_complex;
using patternbf::testing::uniform;

namespace
{
BeamPattern constant_pattern(const AngleGrid &grid, double value)
{
    BeamPattern p;
    p.grid = grid;
    p.values = PatternMatrix::Constant(grid.rows(), grid.cols(), value);
    return p;
}

// Cells whose index-space distance to the axis-aligned box [i0, i1] x [j0, j1] is at most r.
Index cells_near_box(const AngleGrid &grid, Index i0, Index i1, Index j0, Index j1, double r)
{
    Index n = 0;
    for (Index i = 0; i < grid.rows(); ++i)
        for (Index j = 0; j < grid.cols(); ++j)
        {
            const double di = static_cast<double>(std::max<Index>({0, i0 - i, i - i1}));
            const double dj = static_cast<double>(std::max<Index>({0, j0 - j, j - j1}));
            if (std::hypot(di, dj) <= r + 1e-12)
                ++n;
        }
    return n;
}
} // namespace

TEST_CASE("segment_regions - threshold examples")
{
    const AngleGrid grid = AngleGrid::uniform(1, 3, 1, 0, 0, 1);
    BeamPattern p;
    p.grid = grid;
    p.values.resize(3, 1);
    p.values << -5.0, -15.0, -25.0;
    const RegionMask m = segment_regions(p);
    CHECK(m.labels[0] == Region::MainLobe);
    CHECK(m.labels[1] == Region::Moderate);
    CHECK(m.labels[2] == Region::SideLobe);
    CHECK(m.n_ml() == 1);
    CHECK(m.n_md() == 1);
    CHECK(m.n_sl() == 1);
}

TEST_CASE("segment_regions - boundaries are half-open")
{
    const AngleGrid grid = AngleGrid::uniform(1, 4, 1, 0, 0, 1);
    BeamPattern p;
    p.grid = grid;
    p.values.resize(4, 1);
    p.values << 0.0, -10.0, -20.0, -20.000001;
    const RegionMask m = segment_regions(p);
    CHECK(m.labels[1] == Region::MainLobe);
    CHECK(m.labels[2] == Region::Moderate);
    CHECK(m.labels[3] == Region::SideLobe);
}

TEST_CASE("segment_regions - uniform 0 dB is all main lobe")
{
    const BeamPattern p = constant_pattern(AngleGrid::standard(), 0.0);
    const RegionMask m = segment_regions(p);
    CHECK(m.n_ml() == 32400);
    CHECK(m.n_md() == 0);
    CHECK(m.n_sl() == 0);
}

TEST_CASE("segment_regions - matched beam partition against a threshold scan")
{
    const ArrayConfig cfg = ArrayConfig::standard();
    const AngleGrid grid = AngleGrid::standard();
    const BeamPattern p = compute_pattern(cfg, grid, CVectorXd(steering_vector(cfg, 80.0, 20.0).conjugate() / 16.0));
    const RegionMask m = segment_regions(p);
    Index ml = 0, md = 0, sl = 0;
    for (Index i = 0; i < p.rows(); ++i)
        for (Index j = 0; j < p.cols(); ++j)
        {
            const double v = p.values(i, j);
            if (v >= -10.0)
                ++ml;
            else if (v < -20.0)
                ++sl;
            else
                ++md;
        }
    CHECK(m.n_ml() == ml);
    CHECK(m.n_md() == md);
    CHECK(m.n_sl() == sl);
    CHECK(m.n_ml() + m.n_md() + m.n_sl() == 32400);
}

TEST_CASE("segment_regions - partition, idempotence and round-trip on random patterns")
{
    std::mt19937_64 rng(21);
    const AngleGrid grid = testing::coarse_grid();
    for (int t = 0; t < 25; ++t)
    {
        const ArrayConfig cfg = ArrayConfig::ura(1 + static_cast<Index>(t % 5), 2 + static_cast<Index>(t % 3));
        const BeamPattern p = compute_pattern(cfg, grid, random_complex(cfg.n_t(), rng));
        const RegionMask m = segment_regions(p);
        std::vector<int> seen(static_cast<std::size_t>(p.cells()), 0);
        for (const auto *set : {&m.main_lobe, &m.moderate, &m.side_lobe})
            for (const Index c : *set)
                ++seen[static_cast<std::size_t>(c)];
        CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
        CHECK(m.n_ml() > 0);
        CHECK(segment_regions(p) == m);
        for (const Index c : m.main_lobe)
            CHECK(p.flat()(c) >= -10.0);
        for (const Index c : m.side_lobe)
            CHECK(p.flat()(c) < -20.0);
    }
}

TEST_CASE("make_target - pencil has exactly one 0 dB cell")
{
    const AngleGrid grid = AngleGrid::standard();
    TargetSpec spec;
    spec.shape = TargetShape::Pencil;
    const BeamPattern t = make_target(spec, grid);
    CHECK((t.values.array() == 0.0).count() == 1);
    CHECK(t.values(89, 89) == 0.0); // zenith 90, azimuth 0
    CHECK(t.values.minCoeff() == spec.side_lobe_db);
    CHECK(segment_regions(t).n_ml() == 1);
}

TEST_CASE("make_target - triangular main lobe matches the triangle's cell count")
{
    const AngleGrid grid = AngleGrid::standard();
    const TargetSpec spec{TargetShape::Triangular, 90.0, 0.0, 40.0, 30.0, -25.0};
    const BeamPattern t = make_target(spec, grid);
    REQUIRE_NOTHROW(t.validate());

    // Independent count: zenith rows 75..105, half-width shrinking from 20 to 0.
    Index inside = 0;
    for (int zen = 75; zen <= 105; ++zen)
    {
        const double half = 20.0 * (105.0 - zen) / 30.0;
        for (int az = -89; az <= 90; ++az)
            if (std::abs(az) <= half + 1e-9)
                ++inside;
    }
    CHECK((t.values.array() == 0.0).count() == inside);

    const RegionMask m = segment_regions(t);
    CHECK(m.n_ml() >= inside);
    // The taper adds at most a 3-cell ring around the triangle.
    CHECK(m.n_ml() <= inside + 3 * (40 + 2 * 37) + 40);
    CHECK(t.values(73, 89) < 0.0); // zenith 74, one cell outside the base
    CHECK(t.values(73, 89) >= -10.0);
    CHECK(t.values(74, 89) == 0.0);
    CHECK(t.values.minCoeff() == -25.0);
}

TEST_CASE("make_target - flat-top main lobe against a geometric count")
{
    const AngleGrid grid = AngleGrid::standard();
    const TargetSpec spec{TargetShape::FlatTop, 100.0, 10.0, 20.0, 20.0, -30.0};
    const BeamPattern t = make_target(spec, grid);
    const RegionMask m = segment_regions(t);
    // Rectangle: zenith 90..110 (rows 89..109), azimuth 0..20 (cols 89..109).
    CHECK(m.n_ml() == cells_near_box(grid, 89, 109, 89, 109, 3.0));
    CHECK((t.values.array() == 0.0).count() == cells_near_box(grid, 89, 109, 89, 109, 0.0));
    // Taper cells are linear in distance: one cell off an edge is -10/3 dB.
    CHECK(t.values(88, 100) == Catch::Approx(-10.0 / 3.0));
}

TEST_CASE("make_target - grid resolution consistency")
{
    const AngleGrid fine = AngleGrid::uniform(1, 180, 1, -89, 90, 1);
    const AngleGrid coarse = AngleGrid::uniform(2, 180, 2, -88, 90, 2);
    for (const auto shape : {TargetShape::FlatTop, TargetShape::Triangular})
    {
        const TargetSpec spec{shape, 90.0, 0.0, 40.0, 30.0, -25.0};
        const auto core_fine = static_cast<double>((make_target(spec, fine).values.array() == 0.0).count());
        const auto core_coarse = static_cast<double>((make_target(spec, coarse).values.array() == 0.0).count());
        // One boundary row/column of the fine grid on every side.
        const double slack = 2.0 * (31.0 + 41.0) + 4.0;
        CHECK(std::abs(core_fine - 4.0 * core_coarse) <= slack);
    }
}

TEST_CASE("make_target - invalid specs")
{
    const AngleGrid grid = AngleGrid::standard();
    TargetSpec spec{TargetShape::Triangular, 90.0, 0.0, 40.0, 30.0, -5.0};
    CHECK_THROWS_AS(make_target(spec, grid), Error); // side-lobe level above -10 dB
    spec.side_lobe_db = -25.0;
    spec.center_zenith = 175.0;
    CHECK_THROWS_AS(make_target(spec, grid), Error); // triangle leaves the grid
    spec.center_zenith = 90.0;
    spec.base_deg = 0.0;
    CHECK_THROWS_AS(make_target(spec, grid), Error);
    spec.shape = TargetShape::FromFile;
    spec.base_deg = 40.0;
    CHECK_THROWS_AS(make_target(spec, grid), Error);
}

TEST_CASE("target_from_beamformer - delegates to compute_pattern")
{
    std::mt19937_64 rng(4);
    const ArrayConfig cfg = ArrayConfig::ura(8, 8);
    const AngleGrid grid = AngleGrid::standard();
    const CVectorXd f = random_complex(cfg.n_t(), rng);
    CHECK(target_from_beamformer(cfg, grid, f).values == compute_pattern(cfg, grid, f).values);

    // Three-path matched filter: several separate main lobes.
    CVectorXd h = CVectorXd::Zero(cfg.n_t());
    h += steering_vector(cfg, 70, -40).conjugate();
    h += 0.8 * steering_vector(cfg, 100, 10).conjugate();
    h += 0.7 * steering_vector(cfg, 120, 50).conjugate();
    const BeamPattern multi = target_from_beamformer(cfg, grid, CVectorXd(h / h.norm()));
    for (const auto &[th, ph] : {std::pair<int, int>{70, -40}, {100, 10}, {120, 50}})
        CHECK(multi.values(th - 1, ph + 89) >= -10.0);
}

TEST_CASE("renormalize_pattern - peak and floor")
{
    const AngleGrid grid = AngleGrid::uniform(1, 2, 1, 0, 1, 1);
    PatternMatrix v(2, 2);
    v << 3.0, -10.0, -80.0, 1.0;
    const BeamPattern p = renormalize_pattern(v, grid);
    CHECK(p.values(0, 0) == 0.0);
    CHECK(p.values(0, 1) == -13.0);
    CHECK(p.values(1, 0) == -60.0);
    CHECK(p.values(1, 1) == -2.0);
}

TEST_CASE("TargetShape - names round-trip")
{
    for (const auto s : {TargetShape::Pencil, TargetShape::Triangular, TargetShape::FlatTop})
        CHECK(target_shape_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(target_shape_from_string("hexagon"), Error);
}
