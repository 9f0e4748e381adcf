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

#include "patternbf/array_engine.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace patternbf;
using patternbf::testing::naive_pattern_db;
using patternbf::testing::random_complex;
using patternbf::testing::uniform;

TEST_CASE("ArrayConfig - validation and defaults")
{
    const ArrayConfig cfg = ArrayConfig::standard();
    CHECK(cfg.n_y == 16);
    CHECK(cfg.n_z == 16);
    CHECK(cfg.n_t() == 256);
    CHECK(cfg.n_rf == 2);
    CHECK(cfg.spacing == Catch::Approx(cfg.wavelength / 2.0).epsilon(1e-15));
    CHECK(cfg.wavenumber() * cfg.wavelength == Catch::Approx(2.0 * kPi));

    ArrayConfig bad = cfg;
    bad.n_y = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.n_rf = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.n_rf = 257;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.wavelength = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("AngleGrid - default grid and validation")
{
    const AngleGrid grid = AngleGrid::standard();
    REQUIRE(grid.rows() == 180);
    REQUIRE(grid.cols() == 180);
    CHECK(grid.zeniths.front() == 1.0);
    CHECK(grid.zeniths.back() == 180.0);
    CHECK(grid.azimuths.front() == -89.0);
    CHECK(grid.azimuths.back() == 90.0);

    AngleGrid dup = grid;
    dup.zeniths[1] = dup.zeniths[0];
    CHECK_THROWS_AS(dup.validate(), Error);
    AngleGrid empty;
    CHECK_THROWS_AS(empty.validate(), Error);
    CHECK_THROWS_AS(AngleGrid::uniform(0, 10, 3, 0, 10, 1), Error); // 10 is not reachable in steps of 3
}

TEST_CASE("steering_vector - boresight is all ones")
{
    const ArrayConfig cfg = ArrayConfig::standard();
    const CVectorXd a = steering_vector(cfg, 90.0, 0.0);
    REQUIRE(a.size() == 256);
    for (Index l = 0; l < a.size(); ++l)
    {
        CHECK(std::abs(a(l) - cd(1.0, 0.0)) < 1e-12);
    }
}

TEST_CASE("steering_vector - single-term phase and element indexing")
{
    const ArrayConfig cfg = ArrayConfig::standard();
    const CVectorXd a = steering_vector(cfg, 90.0, 30.0);
    // (m=1, n=0) sits at l = m * n_z + n
    CHECK(std::arg(a(16)) == Catch::Approx(kPi / 2.0).margin(1e-12));
    CHECK(std::arg(a(1)) == Catch::Approx(0.0).margin(1e-12));

    const ArrayConfig small = ArrayConfig::ura(2, 2);
    const CVectorXd b = steering_vector(small, 60.0, 45.0);
    const double kd = 2.0 * kPi / small.wavelength * small.spacing;
    const double th = 60.0 * kPi / 180.0, ph = 45.0 * kPi / 180.0;
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n)
        {
            const double phase = kd * (m * std::sin(th) * std::sin(ph) + n * std::cos(th));
            CHECK(std::abs(b(m * 2 + n) - std::polar(1.0, phase)) < 1e-12);
        }
}

TEST_CASE("steering_vector - unit magnitude everywhere")
{
    std::mt19937_64 rng(11);
    const ArrayConfig cfg = ArrayConfig::ura(5, 3);
    for (int t = 0; t < 50; ++t)
    {
        const CVectorXd a = steering_vector(cfg, uniform(rng, 0, 180), uniform(rng, -90, 90));
        CHECK((a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("build_steering_matrix - shape, first element and column identity")
{
    const ArrayConfig cfg = ArrayConfig::standard();
    const AngleGrid grid = AngleGrid::standard();
    const SteeringMatrix<double> A = build_steering_matrix(cfg, grid);
    CHECK(A.n_t() == 256);
    CHECK(A.cells() == 32400);
    CHECK((A.entries.row(0).array() - cd(1.0, 0.0)).abs().maxCoeff() == 0.0);

    // Column (i, j) is bit-identical to the steering vector at that direction.
    for (const auto &[i, j] : {std::pair<Index, Index>{0, 0}, {89, 89}, {37, 150}, {179, 179}})
    {
        const CVectorXd a = steering_vector(cfg, grid.zeniths[i], grid.azimuths[j]);
        CHECK((A.entries.col(i * grid.cols() + j) - a).cwiseAbs().maxCoeff() == 0.0);
    }

    const ArrayConfig tiny = ArrayConfig::ura(2, 1);
    const AngleGrid two = AngleGrid::uniform(30, 60, 30, 10, 10, 1);
    const SteeringMatrix<double> B = build_steering_matrix(tiny, two);
    REQUIRE(B.cells() == 2);
    CHECK(B.entries.col(0) == steering_vector(tiny, 30, 10));
    CHECK(B.entries.col(1) == steering_vector(tiny, 60, 10));
}

TEST_CASE("build_steering_matrix - single precision instantiation")
{
    const ArrayConfig cfg = ArrayConfig::ura(4, 4);
    const AngleGrid grid = testing::coarse_grid();
    const auto Af = build_steering_matrix<float>(cfg, grid);
    const auto Ad = build_steering_matrix<double>(cfg, grid);
    CHECK((Af.entries.cast<cd>() - Ad.entries).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("PatternOperator - response and adjoint agree with the dense matrix")
{
    std::mt19937_64 rng(3);
    const ArrayConfig cfg = ArrayConfig::ura(4, 3);
    const AngleGrid grid = testing::coarse_grid();
    const PatternOperator<double> op(cfg, grid);
    const SteeringMatrix<double> A = build_steering_matrix(cfg, grid);
    const CVectorXd f = random_complex(cfg.n_t(), rng);
    CHECK((op.response(f) - A.entries.transpose() * f).cwiseAbs().maxCoeff() < 1e-12);
    const CVectorXd r = random_complex(op.cells(), rng);
    CHECK((op.adjoint(r) - A.entries.conjugate() * r).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(op.response(CVectorXd::Ones(3)), Error);
}

TEST_CASE("compute_pattern - coherent sum peaks at boresight")
{
    const ArrayConfig cfg = ArrayConfig::standard();
    const AngleGrid grid = AngleGrid::standard();
    const CVectorXd f = CVectorXd::Constant(256, cd(1.0 / 16.0, 0.0));
    const BeamPattern p = compute_pattern(cfg, grid, f);
    Index i = 0, j = 0;
    p.values.maxCoeff(&i, &j);
    CHECK(grid.zeniths[i] == 90.0);
    CHECK(grid.azimuths[j] == 0.0);
    CHECK(p.values(i, j) == 0.0);
    CHECK(std::abs((steering_vector(cfg, 90.0, 0.0).transpose() * f)(0)) == Catch::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("compute_pattern - matched steering vector peaks at its direction")
{
    const ArrayConfig cfg = ArrayConfig::standard();
    const AngleGrid grid = AngleGrid::standard();
    for (const auto &[th, ph] : {std::pair<double, double>{70.0, 25.0}, {120.0, -40.0}, {95.0, 3.0}})
    {
        const CVectorXd f = steering_vector(cfg, th, ph).conjugate() / 16.0;
        const BeamPattern p = compute_pattern(cfg, grid, f);
        Index i = 0, j = 0;
        p.values.maxCoeff(&i, &j);
        CHECK(grid.zeniths[i] == th);
        CHECK(grid.azimuths[j] == ph);
    }
}

TEST_CASE("compute_pattern - brute-force oracle on 4x4")
{
    std::mt19937_64 rng(5);
    const ArrayConfig cfg = ArrayConfig::ura(4, 4);
    const AngleGrid grid = AngleGrid::standard();
    for (int t = 0; t < 3; ++t)
    {
        const CVectorXd f = random_complex(cfg.n_t(), rng);
        const BeamPattern p = compute_pattern(cfg, grid, f);
        const PatternMatrix naive = naive_pattern_db(cfg, grid, f);
        CHECK((p.values - naive).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("compute_pattern - invariances and range")
{
    std::mt19937_64 rng(9);
    const ArrayConfig cfg = ArrayConfig::ura(6, 5);
    const AngleGrid grid = testing::coarse_grid();
    for (int t = 0; t < 20; ++t)
    {
        const CVectorXd f = random_complex(cfg.n_t(), rng, false);
        const BeamPattern p = compute_pattern(cfg, grid, f);
        CHECK(p.values.maxCoeff() == 0.0);
        CHECK(p.values.minCoeff() >= kPatternFloorDb);
        REQUIRE_NOTHROW(p.validate());

        const cd rot = std::polar(1.0, uniform(rng, -kPi, kPi));
        const double c = uniform(rng, 0.01, 100.0);
        const BeamPattern rotated = compute_pattern(cfg, grid, CVectorXd(rot * f));
        const BeamPattern scaled = compute_pattern(cfg, grid, CVectorXd(c * f));
        // Exact in exact arithmetic; rounding of the rotation/scale leaves ~1e-13 dB.
        CHECK((rotated.values - p.values).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((scaled.values - p.values).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("compute_pattern - error cases")
{
    const ArrayConfig cfg = ArrayConfig::ura(2, 2);
    const AngleGrid grid = testing::coarse_grid();
    try
    {
        compute_pattern(cfg, grid, CVectorXd::Zero(4));
        FAIL("zero vector accepted");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::DegenerateInput);
    }
    CHECK_THROWS_AS(compute_pattern(cfg, grid, CVectorXd::Ones(5)), Error);
}
