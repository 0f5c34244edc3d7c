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

#ifndef CFISAC_SCENARIO_HPP
#define CFISAC_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cfisac/solver_options.hpp"
#include "cfisac/types.hpp"

namespace cfisac
{
    struct Point2
    {
        double x = 0.0;
        double y = 0.0;
    };

    // Full description of one network deployment. Powers are stored in Watts and gains
    // as linear factors; the config parser does the dBm / dB conversion.
    struct ScenarioConfig
    {
        int num_aps = 2;       // M
        int num_antennas = 16; // L
        int num_users = 2;     // K
        int num_targets = 4;   // N

        double p_max = 1.0;                     // per-AP budget [W]
        double noise_power = 1e-11;             // sigma^2 [W]
        std::vector<double> sensing_thresholds; // Gamma_n [W], one per target; 0 disables a target

        double pathloss_ref = 1e-3; // C0 (linear)
        double ref_distance = 1.0;  // D0 [m]
        double pathloss_exponent = 2.0;

        double area_width = 500.0; // users / targets are dropped uniformly in [0,w] x [0,h]
        double area_height = 500.0;

        std::vector<Point2> ap_positions;
        std::vector<Point2> user_positions;   // empty: random per drop
        std::vector<Point2> target_positions; // empty: random per drop, unless angles are given

        // Explicit per-AP target angles [deg], target_angles_deg[m][n]. Overrides positions.
        std::vector<std::vector<double>> target_angles_deg;

        std::uint64_t rng_seed = 1;
        SolverOptions solver;

        // Throws std::invalid_argument on any inconsistency.
        void validate() const;
    };

    // One random realisation of all channels.
    struct ChannelSet
    {
        int num_aps = 0;
        int num_antennas = 0;
        int num_users = 0;
        int num_targets = 0;

        std::vector<CMatrix> h;        // per AP: L x K, column k = h_mk
        RMatrix pathloss;              // M x K, zeta_mk
        RMatrix theta;                 // M x N, target angle seen from AP m [rad]
        std::vector<CMatrix> steering; // per AP: L x N, column n = a(theta_mn)
        std::vector<Point2> user_positions;

        auto channel(int m, int k) const { return h[m].col(k); }
        auto steering_vector(int m, int n) const { return steering[m].col(n); }
    };

    // Stacked beamformers V (LK x M). Column m holds v_m1 ... v_mK.
    // In the normalised domain the physical beamformer is sqrt(p_max) * V.
    class BeamMatrix
    {
    public:
        BeamMatrix() = default;
        BeamMatrix(int num_antennas, int num_users, int num_aps, bool normalized = false);
        BeamMatrix(CMatrix v, int num_antennas, int num_users, bool normalized = false);

        int num_antennas() const { return antennas_; }
        int num_users() const { return users_; }
        int num_aps() const { return static_cast<int>(v_.cols()); }
        bool normalized() const { return normalized_; }

        const CMatrix &matrix() const { return v_; }
        CMatrix &matrix() { return v_; }

        // v_mk (E_k V D_m)
        auto block(int m, int k) const { return v_.col(m).segment(k * antennas_, antennas_); }
        auto block(int m, int k) { return v_.col(m).segment(k * antennas_, antennas_); }

        // Power factor turning |.|^2 of stored entries into Watts
        double power_scale(double p_max) const { return normalized_ ? p_max : 1.0; }

    private:
        CMatrix v_;
        int antennas_ = 0;
        int users_ = 0;
        bool normalized_ = false;
    };

    double pathloss(double distance, double c0, double d0, double exponent);

    // ULA response, entry l = exp(j*pi*l*sin(theta)) / sqrt(L)
    CVector steering_vector(double theta, int num_antennas);

    // Angle of `to` seen from `from`, measured from the x-axis and wrapped to the broadside range.
    double direction_angle(Point2 from, Point2 to);

    ChannelSet draw_channels(const ScenarioConfig &config, Rng &rng);

    double sinr(const BeamMatrix &v, const ChannelSet &channels, int k, double noise_power, double p_max);
    RVector sinr_all(const BeamMatrix &v, const ChannelSet &channels, double noise_power, double p_max);
    double sum_rate(const BeamMatrix &v, const ChannelSet &channels, double noise_power, double p_max);

    // Incoherent over APs: sum_m sum_k |a(theta_mn)^H v_mk|^2, in Watts.
    double beampattern_gain(const BeamMatrix &v, const ChannelSet &channels, int n, double p_max);
    double per_ap_power(const BeamMatrix &v, int m, double p_max);

    // Row i: per-AP gain [W] at angle_grid[i]; one column per AP.
    RMatrix beampattern_sweep(const BeamMatrix &v, std::span<const double> angle_grid, double p_max);
}

#endif
