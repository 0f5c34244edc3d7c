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

#ifndef CFISAC_CONFIG_HPP
#define CFISAC_CONFIG_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfisac/scenario.hpp"

namespace cfisac
{
    enum class Algorithm
    {
        ALMCI,
        ZF,
        MMSE,
        ORACLE,
    };

    enum class Emit
    {
        SummaryJson,
        TrialsCsv,
        BeampatternCsv,
        SurfaceCsv,
        ReportText,
    };

    enum class SweepAxis
    {
        NumAntennas,
        PMax,
        NumUsers,
    };

    std::string_view to_string(Algorithm a);
    std::string_view to_string(Emit e);
    std::string_view to_string(SweepAxis a);
    Algorithm parse_algorithm(std::string_view name); // case-insensitive, throws ConfigError

    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(const std::string &msg, int line = 0);
        int line() const { return line_; }

    private:
        int line_;
    };

    struct SweepDimension
    {
        SweepAxis axis = SweepAxis::NumAntennas;
        std::vector<double> values; // strictly increasing; p_max in W
    };

    // One point of the cartesian product of all sweep dimensions.
    struct SweepPoint
    {
        int num_antennas = 0;
        double p_max = 0.0;
        int num_users = 0;
    };

    struct ExperimentSpec
    {
        ScenarioConfig scenario;
        std::vector<Algorithm> algorithms{Algorithm::ALMCI};
        int num_trials = 100;
        std::vector<SweepDimension> sweep; // first dimension varies slowest
        std::string output_dir = "out";
        std::vector<Emit> emit{Emit::SummaryJson, Emit::TrialsCsv, Emit::ReportText};
        int jobs = 1;
        double angle_step = 1.0;    // beampattern grid [deg]
        int oracle_resolution = 64; // grid points per oracle dimension
        double surface_span = 0.5;  // cost surface half-width along each direction
        int surface_points = 21;

        // Dotted names of every field filled from a default rather than from the file.
        std::vector<std::string> defaults_applied;

        bool wants(Emit e) const;
        bool has(Algorithm a) const;
        std::vector<SweepPoint> sweep_points() const;
        ScenarioConfig scenario_at(const SweepPoint &p) const;

        // Throws ConfigError on any inconsistency.
        void validate() const;
    };

    // Strict YAML parse: unknown keys, type mismatches and missing required fields
    // raise ConfigError carrying the offending line.
    ExperimentSpec parse_config(const std::string &path);
    ExperimentSpec parse_config_string(const std::string &yaml);

    // "30 dBm" / "1.5 W" / 0.5 -> Watts; "-inf dBm" -> 0.
    double parse_power(std::string_view text);
    // "-30 dB" / 1e-3 -> linear gain.
    double parse_gain(std::string_view text);
}

#endif
