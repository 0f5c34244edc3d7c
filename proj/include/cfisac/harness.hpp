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

#ifndef CFISAC_HARNESS_HPP
#define CFISAC_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfisac/alm_solver.hpp"
#include "cfisac/config.hpp"

namespace cfisac::harness
{
    // Environment variable that overrides experiment.output_dir.
    inline constexpr const char *output_dir_env = "CFISAC_OUTPUT_DIR";

    class IoError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct TrialRecord
    {
        int point = 0;
        int trial = 0;
        std::uint64_t seed = 0;
        Algorithm algorithm = Algorithm::ALMCI;
        std::string status; // converged, iteration_limit, infeasible, ok, no_feasible_point, error
        std::string error;
        double sum_rate = 0.0;
        // Sensing-aware algorithms only: max_n max{0, Gamma_n - p(theta_n)} [W] and the
        // same divided by Gamma_n.
        std::optional<double> max_violation;
        std::optional<double> max_relative_violation;
        int outer_iterations = 0;
        int alm_iterations = 0;
        int rcg_iterations = 0;
        std::optional<double> max_column_deviation; // ALMCI: over every iterate
        double max_ap_power = 0.0;                  // [W]; ALMCI: over every iterate
        double wall_seconds = 0.0;

        bool failed() const { return status == "error" || status == "no_feasible_point"; }
        bool excluded() const { return failed() || status == "infeasible"; }
    };

    struct AlgorithmSummary
    {
        Algorithm algorithm = Algorithm::ALMCI;
        int trials = 0;
        int completed = 0; // entering the means
        int failures = 0;
        int infeasible = 0;
        double mean_sum_rate = 0.0;
        double std_sum_rate = 0.0;
        double mean_outer_iterations = 0.0;
        double median_outer_iterations = 0.0;
        double mean_alm_iterations = 0.0;
        double mean_rcg_iterations = 0.0;
        std::optional<double> mean_violation;
        std::optional<double> max_violation;
        double mean_wall_seconds = 0.0;
    };

    struct PointSummary
    {
        SweepPoint point;
        std::vector<AlgorithmSummary> algorithms;
        const AlgorithmSummary *find(Algorithm a) const;
    };

    struct RunOptions
    {
        // Keep every ALMCI SolveReport (indexed like `trials`, empty for other algorithms).
        bool keep_reports = false;
        bool write_files = true;
    };

    struct AggregateResult
    {
        std::vector<PointSummary> points;
        std::vector<TrialRecord> trials; // ordered by point, trial, algorithm
        std::vector<std::optional<alm::SolveReport>> reports;
        std::vector<std::string> files;
        std::string output_dir;
        int failed_trials = 0;
        int infeasible_trials = 0;
        double wall_seconds = 0.0;
    };

    // Output directory after applying the environment override.
    std::string resolve_output_dir(const ExperimentSpec &spec);
    // Creates the directory and proves it is writable; throws IoError otherwise.
    void check_output_dir(const std::string &dir);

    AggregateResult run_experiment(const ExperimentSpec &spec, const RunOptions &options = {});

    // Per-AP beampattern of one algorithm on one drop.
    struct Beampattern
    {
        std::vector<double> angles_deg;
        RMatrix gains; // [W], rows follow angles_deg, one column per AP
    };

    std::vector<double> angle_grid(double step_deg); // -90 ... 90 inclusive
    Beampattern beampattern(const BeamMatrix &beam, double p_max, double step_deg);
    std::string beampattern_csv(const Beampattern &bp);

    // Runs `algorithm` on trial `trial` of sweep point `point` and returns the physical beam.
    BeamMatrix design_beam(const ExperimentSpec &spec, Algorithm algorithm, int point = 0, int trial = 0);

    struct GradcheckResult
    {
        std::vector<double> errors; // max relative error per scenario
        double max_error = 0.0;
    };

    // Random scenarios (geometry from `spec`, antenna counts cycling through `antennas`)
    // with random multipliers, penalty and FP weights.
    GradcheckResult run_gradcheck(const ExperimentSpec &spec, int scenarios, const std::vector<int> &antennas,
                                  int directions = 10);

    struct OracleComparison
    {
        struct Row
        {
            std::uint64_t seed = 0;
            double almci_rate = 0.0;
            double oracle_rate = 0.0;
            bool almci_feasible = false;
            bool oracle_found = false;
            double relative_gap = 0.0; // (oracle - almci) / oracle
        };
        std::vector<Row> rows;
        double worst_gap = 0.0;
    };

    OracleComparison run_oracle_comparison(const ExperimentSpec &spec, int trials);

    std::string format_double(double v); // 17 significant digits
}

#endif
