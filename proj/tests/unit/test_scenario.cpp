// SPDX-License-Identifier: Apache-2.0
//
// cfisac: beamforming for cell-free integrated sensing and communication
// Copyright (C) 2026 The cfisac authors
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

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <doctest.h>

#include "cfisac/scenario.hpp"
#include "cfisac/units.hpp"
#include "fixtures.hpp"

using namespace cfisac;
using fixtures::rel;

namespace
{
    // Plain loops over the stacked layout, no block views.
    double sinr_loops(const CMatrix &v, const ChannelSet &ch, int k, double noise)
    {
        const int L = ch.num_antennas;
        double interference = noise, signal = 0.0;
        for (int i = 0; i < ch.num_users; ++i)
        {
            cplx s = 0.0;
            for (int m = 0; m < ch.num_aps; ++m)
                for (int l = 0; l < L; ++l)
                    s += std::conj(ch.h[m](l, k)) * v(i * L + l, m);
            if (i == k)
                signal = std::norm(s);
            else
                interference += std::norm(s);
        }
        return signal / interference;
    }

    BeamMatrix random_beam(const ChannelSet &ch, Rng &rng, double scale = 1.0)
    {
        CMatrix v = fixtures::random_matrix(ch.num_antennas * ch.num_users, ch.num_aps, rng) * scale;
        return BeamMatrix(v, ch.num_antennas, ch.num_users);
    }
}

TEST_CASE("unit conversions")
{
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
    CHECK(dbm_to_watts(-80.0) == doctest::Approx(1e-11));
    CHECK(watts_to_dbm(0.1) == doctest::Approx(20.0));
    CHECK(db_to_linear(-30.0) == doctest::Approx(1e-3));
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
    CHECK(rad_to_deg(deg_to_rad(37.0)) == doctest::Approx(37.0));
}

TEST_CASE("wrap_broadside keeps the sine")
{
    for (double deg : {-270.0, -135.0, -90.0, 0.0, 45.0, 90.0, 120.0, 200.0, 359.0})
    {
        const double t = deg_to_rad(deg);
        const double w = wrap_broadside(t);
        CHECK(w >= -std::numbers::pi / 2 - 1e-15);
        CHECK(w <= std::numbers::pi / 2 + 1e-15);
        CHECK(std::sin(w) == doctest::Approx(std::sin(t)).epsilon(1e-12));
    }
}

TEST_CASE("pathloss")
{
    CHECK(pathloss(10.0, 1e-3, 1.0, 2.0) == doctest::Approx(1e-5));
    CHECK(pathloss(1.0, 1e-3, 1.0, 3.0) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(pathloss(0.0, 1e-3, 1.0, 2.0), DomainError);
}

TEST_CASE("steering vector")
{
    SUBCASE("broadside, four antennas")
    {
        const CVector a = steering_vector(0.0, 4);
        for (int l = 0; l < 4; ++l)
            CHECK(std::abs(a(l) - cplx(0.5, 0.0)) < 1e-15);
    }
    SUBCASE("endfire, two antennas")
    {
        const CVector a = steering_vector(std::numbers::pi / 2, 2);
        CHECK(std::abs(a(0) - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
        CHECK(std::abs(a(1) - cplx(-1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    }
    SUBCASE("single antenna")
    {
        const CVector a = steering_vector(0.7, 1);
        CHECK(std::abs(a(0) - cplx(1.0, 0.0)) < 1e-15);
    }
    SUBCASE("unit norm, constant modulus")
    {
        for (double t : {-1.2, -0.3, 0.4, 1.5})
        {
            const CVector a = steering_vector(t, 9);
            CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-14));
            for (int l = 0; l < 9; ++l)
                CHECK(std::abs(a(l)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(steering_vector(0.0, 0), DomainError);
}

TEST_CASE("draw_channels")
{
    const ScenarioConfig c = fixtures::scenario(2, 4, 2, 3);

    SUBCASE("same seed, same draw")
    {
        const ChannelSet a = fixtures::channels(c, 99), b = fixtures::channels(c, 99);
        for (int m = 0; m < 2; ++m)
        {
            CHECK(a.h[m] == b.h[m]);
            CHECK(a.steering[m] == b.steering[m]);
        }
        CHECK(a.theta == b.theta);
    }
    SUBCASE("explicit angles pass through")
    {
        ScenarioConfig d = c;
        d.target_angles_deg = {{-80, 10, 45}, {-30, 0, 70}};
        const ChannelSet ch = fixtures::channels(d, 3);
        for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 3; ++n)
                CHECK(ch.theta(m, n) == deg_to_rad(d.target_angles_deg[m][n]));
    }
    SUBCASE("user on an AP")
    {
        ScenarioConfig d = c;
        d.user_positions = {{10, 10}, {200, 300}};
        Rng rng(1);
        CHECK_THROWS_AS(draw_channels(d, rng), DomainError);
    }
    SUBCASE("fading has unit variance per entry")
    {
        // With C0 = 1, D0 = d and exponent 0 every path loss is one.
        ScenarioConfig d = fixtures::scenario(1, 4, 1, 0);
        d.pathloss_ref = 1.0;
        d.pathloss_exponent = 0.0;
        Rng rng(12345);
        const int draws = 100000;
        double acc = 0.0;
        for (int i = 0; i < draws; ++i)
        {
            const ChannelSet ch = draw_channels(d, rng);
            acc += ch.h[0].col(0).squaredNorm() / 4.0;
        }
        CHECK(std::abs(acc / draws - 1.0) < 0.02);
    }
}

TEST_CASE("sinr and sum rate")
{
    SUBCASE("single link, unit signal")
    {
        ChannelSet ch = fixtures::channels(fixtures::scenario(1, 2, 1, 0), 1);
        ch.h[0] = CMatrix::Zero(2, 1);
        ch.h[0](0, 0) = 1.0;
        BeamMatrix v(2, 1, 1);
        v.matrix()(0, 0) = 1.0;
        CHECK(sinr(v, ch, 0, 1.0, 1.0) == doctest::Approx(1.0));
        CHECK(sum_rate(v, ch, 1.0, 1.0) == doctest::Approx(1.0));
    }
    SUBCASE("zero beam")
    {
        const ChannelSet ch = fixtures::channels(fixtures::scenario(2, 3, 2, 0), 2);
        const BeamMatrix v(3, 2, 2);
        CHECK(sinr_all(v, ch, 1e-11, 1.0).cwiseAbs().maxCoeff() == 0.0);
        CHECK(sum_rate(v, ch, 1e-11, 1.0) == 0.0);
    }
    SUBCASE("matches the scalar formula")
    {
        const ChannelSet ch = fixtures::channels(fixtures::scenario(2, 4, 2, 0), 5);
        Rng rng(6);
        const BeamMatrix v = random_beam(ch, rng, 0.3);
        for (int k = 0; k < 2; ++k)
            CHECK(rel(sinr(v, ch, k, 1e-11, 1.0), sinr_loops(v.matrix(), ch, k, 1e-11)) < 1e-12);
    }
    SUBCASE("normalized beams see sqrt(p_max) channels")
    {
        const ChannelSet ch = fixtures::channels(fixtures::scenario(2, 4, 2, 0), 5);
        Rng rng(6);
        const BeamMatrix v = random_beam(ch, rng, 0.3);
        const BeamMatrix vn(v.matrix() / std::sqrt(2.5), 4, 2, true);
        CHECK(rel(sum_rate(vn, ch, 1e-11, 2.5), sum_rate(v, ch, 1e-11, 2.5)) < 1e-12);
    }
    SUBCASE("common phase of an AP column")
    {
        const ChannelSet ch = fixtures::channels(fixtures::scenario(1, 4, 2, 0), 8);
        Rng rng(9);
        BeamMatrix v = random_beam(ch, rng, 0.3);
        const RVector before = sinr_all(v, ch, 1e-11, 1.0);
        v.matrix().col(0) *= std::polar(1.0, 1.1);
        const RVector after = sinr_all(v, ch, 1e-11, 1.0);
        for (int k = 0; k < 2; ++k)
            CHECK(rel(after(k), before(k)) < 1e-12);
    }
    SUBCASE("index out of range")
    {
        const ChannelSet ch = fixtures::channels(fixtures::scenario(1, 2, 1, 0), 1);
        const BeamMatrix v(2, 1, 1);
        CHECK_THROWS(sinr(v, ch, 1, 1.0, 1.0));
    }
}

TEST_CASE("beampattern gain and per-AP power")
{
    const ChannelSet ch = fixtures::channels(fixtures::scenario(2, 3, 2, 2), 21);
    Rng rng(22);
    const BeamMatrix v = random_beam(ch, rng, 0.2);

    SUBCASE("entrywise oracle")
    {
        for (int n = 0; n < 2; ++n)
        {
            double ref = 0.0;
            for (int m = 0; m < 2; ++m)
                for (int k = 0; k < 2; ++k)
                {
                    cplx s = 0.0;
                    for (int l = 0; l < 3; ++l)
                        s += std::conj(ch.steering[m](l, n)) * v.matrix()(k * 3 + l, m);
                    ref += std::norm(s);
                }
            CHECK(rel(beampattern_gain(v, ch, n, 1.0), ref) < 1e-12);
        }
        for (int m = 0; m < 2; ++m)
        {
            double ref = 0.0;
            for (int r = 0; r < 6; ++r)
                ref += std::norm(v.matrix()(r, m));
            CHECK(rel(per_ap_power(v, m, 1.0), ref) < 1e-14);
        }
    }
    SUBCASE("single antenna")
    {
        const ChannelSet c1 = fixtures::channels(fixtures::scenario(2, 1, 2, 1), 4);
        const BeamMatrix v1 = random_beam(c1, rng);
        CHECK(rel(beampattern_gain(v1, c1, 0, 1.0), v1.matrix().squaredNorm()) < 1e-14);
    }
    SUBCASE("zero beam")
    {
        const BeamMatrix z(3, 2, 2);
        CHECK(beampattern_gain(z, ch, 0, 1.0) == 0.0);
        CHECK(per_ap_power(z, 1, 1.0) == 0.0);
    }
    SUBCASE("normalized unit column is exactly p_max")
    {
        CMatrix u = CMatrix::Zero(6, 2);
        u(0, 0) = 1.0;
        u(5, 1) = cplx(0.6, 0.8);
        const BeamMatrix vn(u, 3, 2, true);
        CHECK(per_ap_power(vn, 0, 2.5) == 2.5);
        CHECK(per_ap_power(vn, 1, 2.5) == doctest::Approx(2.5).epsilon(1e-15));
    }
    SUBCASE("degree-2 homogeneity")
    {
        const BeamMatrix w(v.matrix() * cplx(0.0, 3.0), 3, 2);
        CHECK(rel(beampattern_gain(w, ch, 1, 1.0), 9.0 * beampattern_gain(v, ch, 1, 1.0)) < 1e-12);
        CHECK(rel(per_ap_power(w, 0, 1.0), 9.0 * per_ap_power(v, 0, 1.0)) < 1e-12);
    }
}

TEST_CASE("beampattern sweep")
{
    const ChannelSet ch = fixtures::channels(fixtures::scenario(2, 4, 2, 2), 31);
    Rng rng(32);
    const BeamMatrix v(fixtures::random_matrix(8, 2, rng) * 0.2, 4, 2);

    SUBCASE("rows at the target angles split the gain by AP")
    {
        for (int n = 0; n < 2; ++n)
        {
            double total = 0.0;
            for (int m = 0; m < 2; ++m)
            {
                const double grid[] = {ch.theta(m, n)};
                total += beampattern_sweep(v, grid, 1.0)(0, m);
            }
            CHECK(rel(total, beampattern_gain(v, ch, n, 1.0)) < 1e-12);
        }
    }
    SUBCASE("scaling")
    {
        const double grid[] = {-1.0, 0.0, 0.3, 1.2};
        const RMatrix a = beampattern_sweep(v, grid, 1.0);
        const RMatrix b = beampattern_sweep(BeamMatrix(v.matrix() * 0.5, 4, 2), grid, 1.0);
        CHECK((b - 0.25 * a).cwiseAbs().maxCoeff() < 1e-14 * a.cwiseAbs().maxCoeff());
    }
    SUBCASE("conjugate beam peaks at its angle")
    {
        const double theta0 = deg_to_rad(25.0);
        BeamMatrix w(8, 1, 1);
        w.matrix().col(0) = steering_vector(theta0, 8);
        std::vector<double> grid;
        for (int d = -90; d <= 90; ++d)
            grid.push_back(deg_to_rad(d));
        const RMatrix g = beampattern_sweep(w, grid, 1.0);
        Eigen::Index best = 0;
        g.col(0).maxCoeff(&best);
        CHECK(grid[static_cast<std::size_t>(best)] == doctest::Approx(theta0));
    }
    SUBCASE("empty grid")
    {
        CHECK_THROWS(beampattern_sweep(v, std::span<const double>{}, 1.0));
    }
}
