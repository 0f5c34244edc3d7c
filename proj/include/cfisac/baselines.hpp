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

#ifndef CFISAC_BASELINES_HPP
#define CFISAC_BASELINES_HPP

#include <string_view>

#include "cfisac/scenario.hpp"

namespace cfisac::baselines
{
    enum class BaselineKind
    {
        ZF,
        MMSE,
    };

    std::string_view to_string(BaselineKind kind);

    // V_m = H_m (H_m^H H_m)^{-1}, then scaled so AP m radiates exactly p_max.
    // Throws SingularChannelError if some H_m has rank < K.
    BeamMatrix zf_beamformer(const ChannelSet &channels, double p_max);

    // V_m = H_m (H_m^H H_m + sigma^2 I)^{-1}, same per-AP scaling.
    BeamMatrix mmse_beamformer(const ChannelSet &channels, double noise_power, double p_max);

    BeamMatrix baseline_beamformer(BaselineKind kind, const ChannelSet &channels, double noise_power,
                                   double p_max);

    struct OracleResult
    {
        BeamMatrix beam; // physical
        double sum_rate = 0.0;
        bool found = false; // false if no grid point met every sensing threshold
        long long evaluated = 0;
    };

    // Exhaustive search over beamformers parameterised per AP by a power fraction,
    // hyperspherical magnitude angles and relative phases. Only for tiny problems:
    // throws std::invalid_argument when 2*L*K*M > 6 or resolution < 16.
    OracleResult grid_search_oracle(const ChannelSet &channels, std::span<const double> thresholds,
                                    double noise_power, double p_max, int resolution);
}

#endif
