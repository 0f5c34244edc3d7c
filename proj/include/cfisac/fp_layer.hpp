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

#ifndef CFISAC_FP_LAYER_HPP
#define CFISAC_FP_LAYER_HPP

#include "cfisac/manifold.hpp"
#include "cfisac/scenario.hpp"

// Fractional-programming layer. The sum-rate objective is rewritten with auxiliary
// variables mu_k (one per user) so that, for fixed mu, only a weighted sum of ratios
// depends on the beamformers. The beamformers live on the oblique manifold in a lifted
// layout: each user block of an AP column carries L beam entries and one slack entry,
//
//   column m = [v_m1; z_m1; v_m2; z_m2; ...; v_mK; z_mK],  length (L+1)K,
//
// normalised by sqrt(p_max) so that the per-AP power budget becomes a unit column norm.
namespace cfisac::fp
{
    using manifold::ManifoldPoint;

    // Problem data in the lifted layout; extended vectors carry a trailing zero.
    struct LiftedProblem
    {
        int num_aps = 0;
        int num_antennas = 0;
        int num_users = 0;
        int num_targets = 0;

        std::vector<CMatrix> h_hat; // per AP: (L+1) x K, sqrt(p_max) [h_mk; 0]
        std::vector<CMatrix> a_hat; // per AP: (L+1) x N, sqrt(p_max) [a(theta_mn); 0]
        RVector thresholds;         // Gamma_n [W]
        double noise_power = 0.0;
        double p_max = 0.0;

        static LiftedProblem build(const ChannelSet &channels, std::span<const double> thresholds,
                                   double noise_power, double p_max);

        Eigen::Index lifted_rows() const { return static_cast<Eigen::Index>(num_antennas + 1) * num_users; }
        Eigen::Index block_offset(int k) const { return static_cast<Eigen::Index>(num_antennas + 1) * k; }
    };

    // Per-evaluation intermediate quantities shared by objective, constraints and gradient.
    struct Evaluation
    {
        CMatrix amplitudes;               // K x K, s(k, i) = sum_m h_hat_mk^H v~_mi
        std::vector<CMatrix> target_proj; // per AP: N x K, a_hat_mn^H v~_mk
        RVector signal;                   // N_k = |s(k,k)|^2
        RVector residual;                 // sum_{i != k} |s(k,i)|^2 + sigma^2
        RVector gains;                    // lifted beampattern gain per target [W]
    };

    Evaluation evaluate(const ManifoldPoint &v_tilde, const LiftedProblem &problem);

    // SINR on the lifted point (the current mu-optimal auxiliary values).
    RVector update_mu(const ManifoldPoint &v_tilde, const LiftedProblem &problem);

    // Physical V (per-AP power <= p_max) to the lifted manifold point. Residual power is
    // split evenly across the K slack entries of each column, with zero phase.
    ManifoldPoint lift(const BeamMatrix &v, double p_max);

    // Drops the slack rows and rescales by sqrt(p_max); returns a physical beamformer.
    BeamMatrix extract(const ManifoldPoint &v_tilde, int num_antennas, int num_users, double p_max);

    // -sum_k (1 + mu_k) N_k / (sum_i |s(k,i)|^2 + sigma^2); denominator includes i = k.
    double reduced_objective(const ManifoldPoint &v_tilde, const RVector &mu, const LiftedProblem &problem);

    // The same objective shifted by +sum_k (1 + mu_k): sum_k (1 + mu_k) R_k / D_k with
    // R_k the interference-plus-noise power. Free of the cancellation in N_k / D_k ~ 1,
    // which is what the line search needs at high SINR.
    double shifted_objective(const Evaluation &eval, const RVector &mu);
    double objective_offset(const RVector &mu);

    // Gamma_n - lifted gain at target n; feasible iff <= 0
    double sensing_constraint(const ManifoldPoint &v_tilde, int n, const LiftedProblem &problem);
    RVector sensing_constraints(const ManifoldPoint &v_tilde, const LiftedProblem &problem);

    // Lagrangian-dual-transform objective in bits:
    // (1/ln2) sum_k [ ln(1 + mu_k) - mu_k + (1 + mu_k) gamma_k / (1 + gamma_k) ]
    double dual_objective(const RVector &gamma, const RVector &mu);
    double dual_objective(const BeamMatrix &v, const RVector &mu, const ChannelSet &channels, double noise_power,
                          double p_max);
}

#endif
