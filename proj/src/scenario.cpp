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

#include "cfisac/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cfisac/units.hpp"

namespace cfisac
{
    void ScenarioConfig::validate() const
    {
        auto fail = [](const std::string &msg)
        { throw std::invalid_argument("scenario: " + msg); };

        if (num_aps < 1 || num_antennas < 1 || num_users < 1)
            fail("num_aps, num_antennas and num_users must be >= 1");
        if (num_targets < 0)
            fail("num_targets must be >= 0");
        if (!(p_max > 0.0) || !std::isfinite(p_max))
            fail("p_max must be positive");
        if (!(noise_power > 0.0) || !std::isfinite(noise_power))
            fail("noise_power must be positive");
        if (static_cast<int>(sensing_thresholds.size()) != num_targets)
            fail("expected " + std::to_string(num_targets) + " sensing thresholds, got " +
                 std::to_string(sensing_thresholds.size()));
        for (double g : sensing_thresholds)
            if (!(g >= 0.0) || !std::isfinite(g))
                fail("sensing thresholds must be finite and >= 0 W");
        if (!(pathloss_ref > 0.0) || !(ref_distance > 0.0) || !(pathloss_exponent >= 0.0))
            fail("path-loss parameters must be positive");
        if (!(area_width > 0.0) || !(area_height > 0.0))
            fail("area must have positive extent");
        if (static_cast<int>(ap_positions.size()) != num_aps)
            fail("expected " + std::to_string(num_aps) + " AP positions");
        if (!user_positions.empty() && static_cast<int>(user_positions.size()) != num_users)
            fail("user_positions must list every user");
        if (!target_positions.empty() && static_cast<int>(target_positions.size()) != num_targets)
            fail("target_positions must list every target");
        if (!target_angles_deg.empty())
        {
            if (static_cast<int>(target_angles_deg.size()) != num_aps)
                fail("target_angles_deg needs one list per AP");
            for (const auto &row : target_angles_deg)
                if (static_cast<int>(row.size()) != num_targets)
                    fail("every target_angles_deg list needs one angle per target");
        }
        solver.validate();
    }

    BeamMatrix::BeamMatrix(int num_antennas, int num_users, int num_aps, bool normalized)
        : v_(CMatrix::Zero(num_antennas * num_users, num_aps)), antennas_(num_antennas), users_(num_users),
          normalized_(normalized)
    {
    }

    BeamMatrix::BeamMatrix(CMatrix v, int num_antennas, int num_users, bool normalized)
        : v_(std::move(v)), antennas_(num_antennas), users_(num_users), normalized_(normalized)
    {
        if (v_.rows() != static_cast<Eigen::Index>(num_antennas) * num_users)
            throw std::invalid_argument("BeamMatrix: expected " + std::to_string(num_antennas * num_users) +
                                        " rows, got " + std::to_string(v_.rows()));
    }

    double pathloss(double distance, double c0, double d0, double exponent)
    {
        if (!(distance > 0.0))
            throw DomainError("pathloss: distance must be positive");
        if (!(d0 > 0.0))
            throw DomainError("pathloss: reference distance must be positive");
        return c0 * std::pow(distance / d0, -exponent);
    }

    CVector steering_vector(double theta, int num_antennas)
    {
        if (num_antennas < 1)
            throw DomainError("steering_vector: need at least one antenna");
        const double phase_step = std::numbers::pi * std::sin(theta);
        const double amp = 1.0 / std::sqrt(static_cast<double>(num_antennas));
        CVector a(num_antennas);
        for (int l = 0; l < num_antennas; ++l)
            a[l] = std::polar(amp, phase_step * l);
        return a;
    }

    double direction_angle(Point2 from, Point2 to)
    {
        return wrap_broadside(std::atan2(to.y - from.y, to.x - from.x));
    }

    ChannelSet draw_channels(const ScenarioConfig &config, Rng &rng)
    {
        config.validate();
        const int M = config.num_aps, L = config.num_antennas, K = config.num_users, N = config.num_targets;

        std::uniform_real_distribution<double> ux(0.0, config.area_width), uy(0.0, config.area_height);
        auto drop = [&](int count)
        {
            std::vector<Point2> pts(count);
            for (auto &p : pts)
            {
                p.x = ux(rng);
                p.y = uy(rng);
            }
            return pts;
        };

        ChannelSet ch;
        ch.num_aps = M;
        ch.num_antennas = L;
        ch.num_users = K;
        ch.num_targets = N;
        ch.user_positions = config.user_positions.empty() ? drop(K) : config.user_positions;

        std::vector<Point2> targets;

        ch.pathloss.resize(M, K);
        ch.theta.resize(M, N);
        ch.h.assign(M, CMatrix(L, K));
        ch.steering.assign(M, CMatrix(L, N));

        // CN(0,1): real and imaginary parts each carry variance 1/2
        std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

        for (int m = 0; m < M; ++m)
        {
            const Point2 ap = config.ap_positions[m];
            for (int k = 0; k < K; ++k)
            {
                const Point2 u = ch.user_positions[k];
                const double d = std::hypot(u.x - ap.x, u.y - ap.y);
                if (!(d > 0.0))
                    throw DomainError("draw_channels: user " + std::to_string(k) + " coincides with AP " +
                                      std::to_string(m));
                const double zeta = pathloss(d, config.pathloss_ref, config.ref_distance, config.pathloss_exponent);
                ch.pathloss(m, k) = zeta;
                const double amp = std::sqrt(zeta);
                for (int l = 0; l < L; ++l)
                {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    ch.h[m](l, k) = amp * cplx(re, im);
                }
            }
        }

        // Targets are dropped after the fading so that they never shift the channel draws.
        if (config.target_angles_deg.empty())
            targets = config.target_positions.empty() ? drop(N) : config.target_positions;
        for (int m = 0; m < M; ++m)
        {
            for (int n = 0; n < N; ++n)
            {
                ch.theta(m, n) = config.target_angles_deg.empty() ? direction_angle(config.ap_positions[m], targets[n])
                                                                  : deg_to_rad(config.target_angles_deg[m][n]);
                ch.steering[m].col(n) = steering_vector(ch.theta(m, n), L);
            }
        }
        return ch;
    }

    namespace
    {
        void check_shapes(const BeamMatrix &v, const ChannelSet &ch)
        {
            if (v.num_aps() != ch.num_aps || v.num_antennas() != ch.num_antennas || v.num_users() != ch.num_users)
                throw std::invalid_argument("beam matrix shape does not match the channel set");
        }

        // s(k, i) = sum_m h_mk^H v_mi, the amplitude of user i's stream at user k
        CMatrix stream_amplitudes(const BeamMatrix &v, const ChannelSet &ch)
        {
            const int K = ch.num_users, L = ch.num_antennas;
            CMatrix s = CMatrix::Zero(K, K);
            for (int m = 0; m < ch.num_aps; ++m)
            {
                Eigen::Map<const CMatrix> vm(v.matrix().col(m).data(), L, K);
                s.noalias() += ch.h[m].adjoint() * vm;
            }
            return s;
        }

        RVector sinr_from_amplitudes(const CMatrix &s, double noise_power, double scale)
        {
            const Eigen::Index K = s.rows();
            RVector gamma(K);
            for (Eigen::Index k = 0; k < K; ++k)
            {
                double interference = 0.0;
                for (Eigen::Index i = 0; i < K; ++i)
                    if (i != k)
                        interference += std::norm(s(k, i));
                gamma[k] = scale * std::norm(s(k, k)) / (scale * interference + noise_power);
            }
            return gamma;
        }
    }

    double sinr(const BeamMatrix &v, const ChannelSet &channels, int k, double noise_power, double p_max)
    {
        if (k < 0 || k >= channels.num_users)
            throw std::out_of_range("sinr: user index " + std::to_string(k) + " out of range");
        return sinr_all(v, channels, noise_power, p_max)[k];
    }

    RVector sinr_all(const BeamMatrix &v, const ChannelSet &channels, double noise_power, double p_max)
    {
        check_shapes(v, channels);
        return sinr_from_amplitudes(stream_amplitudes(v, channels), noise_power, v.power_scale(p_max));
    }

    double sum_rate(const BeamMatrix &v, const ChannelSet &channels, double noise_power, double p_max)
    {
        const RVector gamma = sinr_all(v, channels, noise_power, p_max);
        double rate = 0.0;
        for (double g : gamma)
            rate += std::log2(1.0 + g);
        return rate;
    }

    double beampattern_gain(const BeamMatrix &v, const ChannelSet &channels, int n, double p_max)
    {
        if (n < 0 || n >= channels.num_targets)
            throw std::out_of_range("beampattern_gain: target index " + std::to_string(n) + " out of range");
        check_shapes(v, channels);
        double gain = 0.0;
        for (int m = 0; m < channels.num_aps; ++m)
        {
            const auto a = channels.steering_vector(m, n);
            for (int k = 0; k < channels.num_users; ++k)
                gain += std::norm(a.dot(v.block(m, k)));
        }
        return v.power_scale(p_max) * gain;
    }

    double per_ap_power(const BeamMatrix &v, int m, double p_max)
    {
        if (m < 0 || m >= v.num_aps())
            throw std::out_of_range("per_ap_power: AP index " + std::to_string(m) + " out of range");
        return v.power_scale(p_max) * v.matrix().col(m).squaredNorm();
    }

    RMatrix beampattern_sweep(const BeamMatrix &v, std::span<const double> angle_grid, double p_max)
    {
        if (angle_grid.empty())
            throw std::invalid_argument("beampattern_sweep: empty angle grid");
        const int L = v.num_antennas(), K = v.num_users(), M = v.num_aps();
        RMatrix table(static_cast<Eigen::Index>(angle_grid.size()), M);
        for (std::size_t i = 0; i < angle_grid.size(); ++i)
        {
            const CVector a = steering_vector(angle_grid[i], L);
            for (int m = 0; m < M; ++m)
            {
                Eigen::Map<const CMatrix> vm(v.matrix().col(m).data(), L, K);
                table(static_cast<Eigen::Index>(i), m) = v.power_scale(p_max) * (a.adjoint() * vm).squaredNorm();
            }
        }
        return table;
    }
}
