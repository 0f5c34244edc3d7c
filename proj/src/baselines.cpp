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

#include "cfisac/baselines.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cfisac::baselines
{
    std::string_view to_string(BaselineKind kind)
    {
        return kind == BaselineKind::ZF ? "ZF" : "MMSE";
    }

    namespace
    {
        // Places per-AP precoders (L x K each) into a BeamMatrix scaled to full per-AP power.
        BeamMatrix assemble(const std::vector<CMatrix> &per_ap, int L, int K, double p_max)
        {
            BeamMatrix v(L, K, static_cast<int>(per_ap.size()));
            for (std::size_t m = 0; m < per_ap.size(); ++m)
            {
                const double nrm2 = per_ap[m].squaredNorm();
                const double scale = nrm2 > 0.0 ? std::sqrt(p_max / nrm2) : 0.0;
                for (int k = 0; k < K; ++k)
                    v.block(static_cast<int>(m), k) = scale * per_ap[m].col(k);
            }
            return v;
        }
    }

    BeamMatrix zf_beamformer(const ChannelSet &channels, double p_max)
    {
        const int L = channels.num_antennas, K = channels.num_users;
        std::vector<CMatrix> per_ap;
        for (int m = 0; m < channels.num_aps; ++m)
        {
            const CMatrix &H = channels.h[m];
            Eigen::ColPivHouseholderQR<CMatrix> rank_probe(H);
            if (K > L || rank_probe.rank() < K)
                throw SingularChannelError(m, "zf_beamformer: channel matrix of AP " + std::to_string(m) +
                                                  " is rank deficient");
            // H = QR  =>  H (H^H H)^{-1} = Q R^{-H}
            Eigen::HouseholderQR<CMatrix> qr(H);
            const CMatrix Q = qr.householderQ() * CMatrix::Identity(L, K);
            const CMatrix R = qr.matrixQR().topRows(K).triangularView<Eigen::Upper>();
            const CMatrix R_inv_h = R.adjoint().triangularView<Eigen::Lower>().solve(CMatrix::Identity(K, K));
            per_ap.push_back(Q * R_inv_h);
        }
        return assemble(per_ap, L, K, p_max);
    }

    BeamMatrix mmse_beamformer(const ChannelSet &channels, double noise_power, double p_max)
    {
        const int L = channels.num_antennas, K = channels.num_users;
        std::vector<CMatrix> per_ap;
        for (int m = 0; m < channels.num_aps; ++m)
        {
            const CMatrix &H = channels.h[m];
            CMatrix gram = H.adjoint() * H;
            gram.diagonal().array() += noise_power;
            // Symmetric positive definite for sigma^2 > 0; the product is H gram^{-1}
            per_ap.push_back(gram.ldlt().solve(H.adjoint()).adjoint());
        }
        return assemble(per_ap, L, K, p_max);
    }

    BeamMatrix baseline_beamformer(BaselineKind kind, const ChannelSet &channels, double noise_power, double p_max)
    {
        return kind == BaselineKind::ZF ? zf_beamformer(channels, p_max)
                                        : mmse_beamformer(channels, noise_power, p_max);
    }

    OracleResult grid_search_oracle(const ChannelSet &channels, std::span<const double> thresholds,
                                    double noise_power, double p_max, int resolution)
    {
        const int L = channels.num_antennas, K = channels.num_users, M = channels.num_aps;
        const int n = L * K; // complex entries per AP column
        if (2 * L * K * M > 6)
            throw std::invalid_argument("grid_search_oracle: real dimension " + std::to_string(2 * L * K * M) +
                                        " exceeds the supported maximum of 6");
        if (resolution < 16)
            throw std::invalid_argument("grid_search_oracle: resolution must be at least 16");
        if (static_cast<int>(thresholds.size()) != channels.num_targets)
            throw std::invalid_argument("grid_search_oracle: one threshold per target required");

        // Axes: per AP a power fraction and n-1 magnitude angles; one phase per entry except the first
        const int mag_axes = M * n;
        const int phase_axes = M * n - 1;
        const int dims = mag_axes + phase_axes;

        std::vector<double> fractions(resolution), angles(resolution), phases(resolution);
        for (int i = 0; i < resolution; ++i)
        {
            fractions[i] = static_cast<double>(i + 1) / resolution;
            angles[i] = 0.5 * std::numbers::pi * i / (resolution - 1);
            phases[i] = 2.0 * std::numbers::pi * i / resolution;
        }

        OracleResult best;
        best.beam = BeamMatrix(L, K, M);
        best.sum_rate = -1.0;

        std::vector<int> idx(dims, 0);
        BeamMatrix v(L, K, M);
        for (;;)
        {
            int axis = 0;
            for (int m = 0; m < M; ++m)
            {
                const double radius = std::sqrt(p_max * fractions[idx[axis++]]);
                double remaining = 1.0; // product of sines so far
                for (int e = 0; e < n; ++e)
                {
                    double mag;
                    if (e < n - 1)
                    {
                        const double psi = angles[idx[axis++]];
                        mag = remaining * std::cos(psi);
                        remaining *= std::sin(psi);
                    }
                    else
                        mag = remaining;
                    v.matrix()(e, m) = radius * mag;
                }
            }
            for (int flat = 1; flat < M * n; ++flat)
            {
                const int m = flat / n, e = flat % n;
                v.matrix()(e, m) *= std::polar(1.0, phases[idx[axis++]]);
            }

            ++best.evaluated;
            bool feasible = true;
            for (int t = 0; t < channels.num_targets && feasible; ++t)
                feasible = beampattern_gain(v, channels, t, p_max) >= thresholds[t];
            if (feasible)
            {
                const double rate = sum_rate(v, channels, noise_power, p_max);
                if (rate > best.sum_rate)
                {
                    best.sum_rate = rate;
                    best.beam = v;
                    best.found = true;
                }
            }

            // Odometer increment
            int d = 0;
            for (; d < dims; ++d)
            {
                if (++idx[d] < resolution)
                    break;
                idx[d] = 0;
            }
            if (d == dims)
                break;
        }
        if (!best.found)
            best.sum_rate = 0.0;
        return best;
    }
}
