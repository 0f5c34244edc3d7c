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

#include "cfisac/fp_layer.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cfisac::fp
{
    LiftedProblem LiftedProblem::build(const ChannelSet &channels, std::span<const double> thresholds,
                                       double noise_power, double p_max)
    {
        if (static_cast<int>(thresholds.size()) != channels.num_targets)
            throw std::invalid_argument("LiftedProblem: one threshold per target required");
        const int L = channels.num_antennas;
        const double amp = std::sqrt(p_max);

        LiftedProblem p;
        p.num_aps = channels.num_aps;
        p.num_antennas = L;
        p.num_users = channels.num_users;
        p.num_targets = channels.num_targets;
        p.noise_power = noise_power;
        p.p_max = p_max;
        p.thresholds = Eigen::Map<const RVector>(thresholds.data(), static_cast<Eigen::Index>(thresholds.size()));
        for (int m = 0; m < channels.num_aps; ++m)
        {
            CMatrix h = CMatrix::Zero(L + 1, channels.num_users);
            h.topRows(L) = amp * channels.h[m];
            p.h_hat.push_back(std::move(h));

            CMatrix a = CMatrix::Zero(L + 1, channels.num_targets);
            a.topRows(L) = amp * channels.steering[m];
            p.a_hat.push_back(std::move(a));
        }
        return p;
    }

    Evaluation evaluate(const ManifoldPoint &v_tilde, const LiftedProblem &problem)
    {
        const int K = problem.num_users, N = problem.num_targets;
        const Eigen::Index rows = problem.num_antennas + 1;
        if (v_tilde.rows() != problem.lifted_rows() || v_tilde.cols() != problem.num_aps)
            throw std::invalid_argument("lifted point has the wrong shape");

        Evaluation e;
        e.amplitudes = CMatrix::Zero(K, K);
        e.gains = RVector::Zero(N);
        e.target_proj.reserve(problem.num_aps);
        for (int m = 0; m < problem.num_aps; ++m)
        {
            // Column m viewed as (L+1) x K: column k is the lifted block v~_mk
            Eigen::Map<const CMatrix> w(v_tilde.matrix().col(m).data(), rows, K);
            e.amplitudes.noalias() += problem.h_hat[m].adjoint() * w;
            CMatrix proj = problem.a_hat[m].adjoint() * w;
            e.gains += proj.rowwise().squaredNorm();
            e.target_proj.push_back(std::move(proj));
        }

        e.signal.resize(K);
        e.residual.resize(K);
        for (int k = 0; k < K; ++k)
        {
            double interference = 0.0;
            for (int i = 0; i < K; ++i)
                if (i != k)
                    interference += std::norm(e.amplitudes(k, i));
            e.signal[k] = std::norm(e.amplitudes(k, k));
            e.residual[k] = interference + problem.noise_power;
        }
        return e;
    }

    RVector update_mu(const ManifoldPoint &v_tilde, const LiftedProblem &problem)
    {
        const Evaluation e = evaluate(v_tilde, problem);
        return e.signal.cwiseQuotient(e.residual);
    }

    ManifoldPoint lift(const BeamMatrix &v, double p_max)
    {
        if (v.normalized())
            throw std::invalid_argument("lift: expects a physical beamformer");
        const int L = v.num_antennas(), K = v.num_users(), M = v.num_aps();
        const double inv_amp = 1.0 / std::sqrt(p_max);

        CMatrix x = CMatrix::Zero(static_cast<Eigen::Index>(L + 1) * K, M);
        for (int m = 0; m < M; ++m)
        {
            const double power = v.matrix().col(m).squaredNorm();
            if (power > p_max * (1.0 + 1e-12))
                throw InfeasibleInputError("lift: AP " + std::to_string(m) + " transmits " + std::to_string(power) +
                                           " W, above the budget of " + std::to_string(p_max) + " W");
            const double residual = std::max(0.0, 1.0 - power / p_max);
            const double slack = std::sqrt(residual / K);
            for (int k = 0; k < K; ++k)
            {
                const Eigen::Index off = static_cast<Eigen::Index>(L + 1) * k;
                x.col(m).segment(off, L) = inv_amp * v.block(m, k);
                x(off + L, m) = slack;
            }
        }
        return ManifoldPoint::normalized(std::move(x));
    }

    BeamMatrix extract(const ManifoldPoint &v_tilde, int num_antennas, int num_users, double p_max)
    {
        const int L = num_antennas, K = num_users;
        if (v_tilde.rows() != static_cast<Eigen::Index>(L + 1) * K)
            throw std::invalid_argument("extract: lifted point has the wrong number of rows");
        const double amp = std::sqrt(p_max);
        BeamMatrix v(L, K, static_cast<int>(v_tilde.cols()));
        for (Eigen::Index m = 0; m < v_tilde.cols(); ++m)
            for (int k = 0; k < K; ++k)
                v.block(static_cast<int>(m), k) =
                    amp * v_tilde.matrix().col(m).segment(static_cast<Eigen::Index>(L + 1) * k, L);
        return v;
    }

    double objective_offset(const RVector &mu) { return (1.0 + mu.array()).sum(); }

    double shifted_objective(const Evaluation &eval, const RVector &mu)
    {
        double value = 0.0;
        for (Eigen::Index k = 0; k < mu.size(); ++k)
            value += (1.0 + mu[k]) * eval.residual[k] / (eval.signal[k] + eval.residual[k]);
        return value;
    }

    double reduced_objective(const ManifoldPoint &v_tilde, const RVector &mu, const LiftedProblem &problem)
    {
        const Evaluation e = evaluate(v_tilde, problem);
        double value = 0.0;
        for (int k = 0; k < problem.num_users; ++k)
            value -= (1.0 + mu[k]) * e.signal[k] / (e.signal[k] + e.residual[k]);
        return value;
    }

    double sensing_constraint(const ManifoldPoint &v_tilde, int n, const LiftedProblem &problem)
    {
        if (n < 0 || n >= problem.num_targets)
            throw std::out_of_range("sensing_constraint: target index " + std::to_string(n) + " out of range");
        return sensing_constraints(v_tilde, problem)[n];
    }

    RVector sensing_constraints(const ManifoldPoint &v_tilde, const LiftedProblem &problem)
    {
        return problem.thresholds - evaluate(v_tilde, problem).gains;
    }

    double dual_objective(const RVector &gamma, const RVector &mu)
    {
        if (gamma.size() != mu.size())
            throw std::invalid_argument("dual_objective: gamma and mu differ in length");
        double acc = 0.0;
        for (Eigen::Index k = 0; k < mu.size(); ++k)
        {
            if (mu[k] < 0.0)
                throw std::invalid_argument("dual_objective: mu must be nonnegative");
            acc += std::log1p(mu[k]) - mu[k] + (1.0 + mu[k]) * gamma[k] / (1.0 + gamma[k]);
        }
        return acc / std::numbers::ln2;
    }

    double dual_objective(const BeamMatrix &v, const RVector &mu, const ChannelSet &channels, double noise_power,
                          double p_max)
    {
        return dual_objective(sinr_all(v, channels, noise_power, p_max), mu);
    }
}
