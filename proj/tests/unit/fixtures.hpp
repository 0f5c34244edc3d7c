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

// Small scenarios shared by the unit tests.

#ifndef CFISAC_TESTS_FIXTURES_HPP
#define CFISAC_TESTS_FIXTURES_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cfisac/scenario.hpp"
#include "cfisac/units.hpp"

namespace fixtures
{
    using namespace cfisac;

    inline ScenarioConfig scenario(int M, int L, int K, int N, std::uint64_t seed = 1)
    {
        ScenarioConfig c;
        c.num_aps = M;
        c.num_antennas = L;
        c.num_users = K;
        c.num_targets = N;
        c.p_max = 1.0;
        c.noise_power = dbm_to_watts(-80.0);
        c.sensing_thresholds.assign(N, dbm_to_watts(20.0));
        c.pathloss_ref = 1e-3;
        c.ap_positions.clear();
        for (int m = 0; m < M; ++m)
            c.ap_positions.push_back({10.0 + 70.0 * m, 10.0 + 70.0 * m});
        c.rng_seed = seed;
        return c;
    }

    inline ChannelSet channels(const ScenarioConfig &c, std::uint64_t seed)
    {
        Rng rng(seed);
        return draw_channels(c, rng);
    }

    inline CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng)
    {
        std::normal_distribution<double> g(0.0, 1.0);
        CMatrix x(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
                x(i, j) = cplx(g(rng), g(rng));
        return x;
    }

    inline double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

    // Fresh empty directory under the system temp dir.
    inline std::filesystem::path temp_dir(const std::string &name)
    {
        const auto p = std::filesystem::temp_directory_path() / ("cfisac_test_" + name);
        std::filesystem::remove_all(p);
        std::filesystem::create_directories(p);
        return p;
    }

    inline std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }
}

#endif
