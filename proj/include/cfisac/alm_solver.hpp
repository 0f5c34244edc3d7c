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

#ifndef CFISAC_ALM_SOLVER_HPP
#define CFISAC_ALM_SOLVER_HPP

#include <functional>
#include <vector>

#include "cfisac/fp_layer.hpp"
#include "cfisac/scenario.hpp"

namespace cfisac::alm
{
    using manifold::ManifoldPoint;

    // Augmented Lagrangian of the lifted problem for fixed mu, lambda and rho:
    //
    //   L_rho(V~) = f^(V~) + (rho / 2) sum_n max{0, lambda_n / rho + g^_n(V~)}^2
    //
    // Values are available both exactly and shifted by the constant sum_k (1 + mu_k),
    // which the line search uses to avoid cancellation at high SINR.
    class AugmentedLagrangian
    {
    public:
        AugmentedLagrangian(const fp::LiftedProblem &problem, RVector mu, RVector lambda, double rho);

        double value(const ManifoldPoint &x) const;
        double shifted_value(const ManifoldPoint &x) const;
        double offset() const { return offset_; }

        // Ambient gradient G such that the real directional derivative along Z is inner(G, Z).
        CMatrix euclidean_gradient(const ManifoldPoint &x) const;
        CMatrix riemannian_gradient(const ManifoldPoint &x) const;

        // Shifted value and Riemannian gradient from a single evaluation
        double shifted_value_and_gradient(const ManifoldPoint &x, CMatrix &riemannian_grad) const;

        const fp::LiftedProblem &problem() const { return *problem_; }
        const RVector &mu() const { return mu_; }
        const RVector &lambda() const { return lambda_; }
        double rho() const { return rho_; }

        // Test hook: multiplies every gradient this object returns.
        void set_gradient_scale(double s) { gradient_scale_ = s; }

    private:
        double shifted_from(const fp::Evaluation &e) const;
        CMatrix gradient_from(const ManifoldPoint &x, const fp::Evaluation &e) const;

        const fp::LiftedProblem *problem_;
        RVector mu_;
        RVector lambda_;
        double rho_;
        double offset_;
        double gradient_scale_ = 1.0;
    };

    double lagrangian(const ManifoldPoint &x, const RVector &lambda, double rho, const RVector &mu,
                      const fp::LiftedProblem &problem);
    CMatrix euclidean_gradient(const ManifoldPoint &x, const RVector &lambda, double rho, const RVector &mu,
                               const fp::LiftedProblem &problem);
    CMatrix riemannian_gradient(const ManifoldPoint &x, const RVector &lambda, double rho, const RVector &mu,
                                const fp::LiftedProblem &problem);

    struct RcgResult
    {
        ManifoldPoint point;
        int iterations = 0;
        double grad_norm = 0.0;
        bool converged = false; // gradient norm reached the tolerance
        bool stalled = false;   // line search failed even along steepest descent
        int restarts = 0;       // steepest-descent resets after failed line searches

        // One entry per accepted iterate, starting with the initial point
        std::vector<double> values;     // L_rho
        std::vector<double> grad_norms; // ||grad L_rho||
        double max_column_deviation = 0.0;
    };

    // Riemannian conjugate gradient with Armijo backtracking and Hestenes-Stiefel directions.
    RcgResult rcg_inner_loop(const ManifoldPoint &x0, const AugmentedLagrangian &objective, double tol,
                             const SolverOptions &opts);

    // lambda_n' = clip(lambda_n + rho * g_n, [lambda_min, lambda_max])
    RVector update_multipliers(const RVector &lambda, double rho, const RVector &constraint_values,
                               double lambda_min, double lambda_max);

    double update_penalty(double rho, const RVector &sigma_prev, const RVector &sigma_curr, double tau,
                          double growth, bool first_iteration);

    enum class SolveStatus
    {
        Converged,
        IterationLimit, // outer loop cap reached
        Infeasible,     // sensing violation persists after heavy penalty growth
    };

    const char *to_string(SolveStatus s);

    struct AlmIterationRecord
    {
        int outer = 0;
        int index = 0; // j within the outer iteration
        double eps = 0.0;
        double rho = 0.0;
        RVector lambda;
        RVector sigma;
        double max_violation = 0.0; // max_n max{0, g^_n} [W]
        int rcg_iterations = 0;
        bool rcg_converged = false;
        bool rcg_stalled = false;
        double step_distance = 0.0; // ||V~_{j+1} - V~_j||_F
    };

    struct SolveReport
    {
        SolveStatus status = SolveStatus::Converged;
        int outer_iterations = 0;
        int alm_iterations = 0;
        int rcg_iterations = 0;

        std::vector<double> sum_rates;          // per outer iteration, after its mu update
        std::vector<double> reduced_objectives; // f^ at the end of each outer iteration
        std::vector<AlmIterationRecord> alm;
        std::vector<std::vector<double>> rcg_values;     // L_rho trace of every RCG run
        std::vector<std::vector<double>> rcg_grad_norms; // gradient norm trace of every RCG run

        double max_column_deviation = 0.0; // over every accepted iterate
        double max_ap_power = 0.0;         // over every accepted iterate, physical [W]
        RVector final_constraints;         // g^_n at the output
        double max_violation = 0.0;        // max_n max{0, g^_n} at the output [W]
        RVector final_gains;               // beampattern gain per target [W]
        std::vector<int> lambda_at_bound;  // targets still violating with lambda at a clip bound
        double final_sum_rate = 0.0;
        double wall_seconds = 0.0;
    };

    struct SolveResult
    {
        BeamMatrix beam; // physical
        ManifoldPoint lifted;
        SolveReport report;
    };

    // Full ALMCI run: outer fractional-programming loop, augmented-Lagrangian loop, RCG.
    // The initial point is drawn from `config.rng_seed` unless one is supplied.
    SolveResult solve(const ScenarioConfig &config, const ChannelSet &channels);
    SolveResult solve(const ScenarioConfig &config, const ChannelSet &channels, const ManifoldPoint &initial);

    // Max over random unit tangent directions of
    // |<grad, Z> - (L(R(X, hZ)) - L(R(X, -hZ))) / 2h| / (|<grad, Z>| + 1e-15).
    double gradient_check(const ManifoldPoint &x, const AugmentedLagrangian &objective, int num_dirs, Rng &rng,
                          double step = 1e-6);

    // L_rho on R(X, t1 d1 + t2 d2) for two orthonormal random tangent directions.
    struct CostSurface
    {
        std::vector<double> t1;
        std::vector<double> t2;
        RMatrix values; // values(i, j) at (t1[i], t2[j])
        CMatrix d1;
        CMatrix d2;
    };

    CostSurface cost_surface(const ManifoldPoint &x, const AugmentedLagrangian &objective, std::vector<double> t1,
                             std::vector<double> t2, Rng &rng);
}

#endif
