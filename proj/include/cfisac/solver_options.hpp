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

#ifndef CFISAC_SOLVER_OPTIONS_HPP
#define CFISAC_SOLVER_OPTIONS_HPP

namespace cfisac
{
    /// Tuning knobs of the augmented-Lagrangian manifold solver.
    /// Defaults are the published simulation parameters; see docs in README for the rest.
    struct SolverOptions
    {
        double grad_tol = 1e-6;        // delta_1, inner gradient-norm tolerance
        double objective_tol = 1e-6;   // delta_2, outer change tolerance (relative, see solve())
        double eps_init = 1e-3;        // epsilon_0
        double eps_min = 1e-6;         // epsilon_min
        double eps_shrink = 0.5;       // theta_epsilon
        double rho_init = 1.0;         // rho_0
        double rho_growth = 4.0;       // theta_rho, must exceed 1
        double violation_ratio = 0.5;  // tau
        double min_step_distance = 1e-10; // d_min
        double lambda_min = 0.0;
        double lambda_max = 100.0;

        double armijo_c = 1e-4;
        double armijo_shrink = 0.5;
        double alpha_init = 1.0;
        int max_backtracks = 50;

        int max_rcg_iterations = 500;
        int max_alm_iterations = 50;
        int max_outer_iterations = 30;

        // Sensing violation accepted as feasible, relative to each threshold.
        double violation_tol = 1e-4;
        // Penalty growth (rho / rho_0) beyond which a violating run is reported infeasible.
        double infeasible_rho_growth = 1e6;

        // Restart lambda and rho at every outer FP iteration instead of warm-starting.
        bool reset_alm_per_outer = false;
        // Keep per-iteration traces (L_rho values, gradient norms) in the report.
        bool record_history = true;

        // Throws std::invalid_argument naming the first inconsistent field.
        void validate() const;
    };
}

#endif
