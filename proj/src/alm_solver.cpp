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

#include "cfisac/alm_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace cfisac
{
    void SolverOptions::validate() const
    {
        auto fail = [](const std::string &msg)
        { throw std::invalid_argument("solver: " + msg); };
        if (!(grad_tol > 0.0) || !(objective_tol > 0.0) || !(eps_init > 0.0) || !(eps_min > 0.0) ||
            !(min_step_distance > 0.0) || !(violation_tol > 0.0))
            fail("all tolerances must be positive");
        if (!(eps_shrink > 0.0 && eps_shrink < 1.0))
            fail("theta_epsilon must lie in (0, 1)");
        if (!(rho_growth > 1.0))
            fail("theta_rho must exceed 1");
        if (!(violation_ratio > 0.0 && violation_ratio < 1.0))
            fail("tau must lie in (0, 1)");
        if (!(rho_init > 0.0))
            fail("rho_0 must be positive");
        if (!(lambda_min <= lambda_max))
            fail("lambda_min must not exceed lambda_max");
        if (!(armijo_c > 0.0 && armijo_c < 1.0) || !(armijo_shrink > 0.0 && armijo_shrink < 1.0) ||
            !(alpha_init > 0.0) || max_backtracks < 1)
            fail("invalid line-search parameters");
        if (max_rcg_iterations < 0 || max_alm_iterations < 1 || max_outer_iterations < 1)
            fail("iteration caps must be positive");
        if (!(infeasible_rho_growth >= 1.0))
            fail("infeasible_rho_growth must be >= 1");
    }
}

namespace cfisac::alm
{
    AugmentedLagrangian::AugmentedLagrangian(const fp::LiftedProblem &problem, RVector mu, RVector lambda, double rho)
        : problem_(&problem), mu_(std::move(mu)), lambda_(std::move(lambda)), rho_(rho)
    {
        if (mu_.size() != problem.num_users)
            throw std::invalid_argument("AugmentedLagrangian: mu needs one entry per user");
        if (lambda_.size() != problem.num_targets)
            throw std::invalid_argument("AugmentedLagrangian: lambda needs one entry per target");
        if (!(rho_ > 0.0))
            throw std::invalid_argument("AugmentedLagrangian: rho must be positive");
        offset_ = fp::objective_offset(mu_);
    }

    double AugmentedLagrangian::shifted_from(const fp::Evaluation &e) const
    {
        double penalty = 0.0;
        for (Eigen::Index n = 0; n < lambda_.size(); ++n)
        {
            const double g = problem_->thresholds[n] - e.gains[n];
            const double active = std::max(0.0, lambda_[n] / rho_ + g);
            penalty += active * active;
        }
        return fp::shifted_objective(e, mu_) + 0.5 * rho_ * penalty;
    }

    double AugmentedLagrangian::shifted_value(const ManifoldPoint &x) const
    {
        return shifted_from(fp::evaluate(x, *problem_));
    }

    double AugmentedLagrangian::value(const ManifoldPoint &x) const { return shifted_value(x) - offset_; }

    CMatrix AugmentedLagrangian::gradient_from(const ManifoldPoint &x, const fp::Evaluation &e) const
    {
        const fp::LiftedProblem &p = *problem_;
        const int K = p.num_users, N = p.num_targets;
        const Eigen::Index rows = p.num_antennas + 1;

        // Ratio part: coefficient of h_hat_mk in the block of stream i.
        //   i != k:  2 mu~_k s(k,i) N_k / D_k^2
        //   i == k: -2 mu~_k s(k,k) R_k / D_k^2
        CMatrix coeff(K, K);
        for (int k = 0; k < K; ++k)
        {
            const double d = e.signal[k] + e.residual[k];
            const double w = 2.0 * (1.0 + mu_[k]) / (d * d);
            for (int i = 0; i < K; ++i)
                coeff(k, i) = (i == k ? -e.residual[k] : e.signal[k]) * w * e.amplitudes(k, i);
        }

        // Penalty weights rho * max{0, lambda_n / rho + g_n}
        RVector weight(N);
        for (int n = 0; n < N; ++n)
            weight[n] = rho_ * std::max(0.0, lambda_[n] / rho_ + p.thresholds[n] - e.gains[n]);

        CMatrix grad(x.rows(), x.cols());
        for (int m = 0; m < p.num_aps; ++m)
        {
            Eigen::Map<CMatrix> gm(grad.col(m).data(), rows, K);
            gm.noalias() = p.h_hat[m] * coeff;
            if (N > 0)
                gm.noalias() -= 2.0 * p.a_hat[m] * (weight.asDiagonal() * e.target_proj[m]);
        }
        if (gradient_scale_ != 1.0)
            grad *= gradient_scale_;
        return grad;
    }

    CMatrix AugmentedLagrangian::euclidean_gradient(const ManifoldPoint &x) const
    {
        return gradient_from(x, fp::evaluate(x, *problem_));
    }

    CMatrix AugmentedLagrangian::riemannian_gradient(const ManifoldPoint &x) const
    {
        return manifold::project_to_tangent(x, euclidean_gradient(x));
    }

    double AugmentedLagrangian::shifted_value_and_gradient(const ManifoldPoint &x, CMatrix &riemannian_grad) const
    {
        const fp::Evaluation e = fp::evaluate(x, *problem_);
        riemannian_grad = manifold::project_to_tangent(x, gradient_from(x, e));
        return shifted_from(e);
    }

    double lagrangian(const ManifoldPoint &x, const RVector &lambda, double rho, const RVector &mu,
                      const fp::LiftedProblem &problem)
    {
        return AugmentedLagrangian(problem, mu, lambda, rho).value(x);
    }

    CMatrix euclidean_gradient(const ManifoldPoint &x, const RVector &lambda, double rho, const RVector &mu,
                               const fp::LiftedProblem &problem)
    {
        return AugmentedLagrangian(problem, mu, lambda, rho).euclidean_gradient(x);
    }

    CMatrix riemannian_gradient(const ManifoldPoint &x, const RVector &lambda, double rho, const RVector &mu,
                                const fp::LiftedProblem &problem)
    {
        return AugmentedLagrangian(problem, mu, lambda, rho).riemannian_gradient(x);
    }

    RcgResult rcg_inner_loop(const ManifoldPoint &x0, const AugmentedLagrangian &objective, double tol,
                             const SolverOptions &opts)
    {
        if (!(tol > 0.0))
            throw std::invalid_argument("rcg_inner_loop: tolerance must be positive");

        RcgResult out;
        ManifoldPoint x = x0;
        CMatrix grad;
        double f = objective.shifted_value_and_gradient(x, grad);
        double gnorm = manifold::norm(grad);

        auto record = [&]
        {
            out.max_column_deviation = std::max(out.max_column_deviation, manifold::max_column_deviation(x.matrix()));
            if (opts.record_history)
            {
                out.values.push_back(f - objective.offset());
                out.grad_norms.push_back(gnorm);
            }
        };
        record();

        CMatrix eta = -grad;
        double alpha_guess = opts.alpha_init;
        bool steepest = true;

        while (gnorm > tol && out.iterations < opts.max_rcg_iterations)
        {
            double slope = manifold::inner(grad, eta);
            if (!(slope < 0.0))
            {
                eta = -grad;
                slope = -gnorm * gnorm;
                steepest = true;
            }

            // Armijo backtracking
            double alpha = alpha_guess;
            bool accepted = false;
            ManifoldPoint trial;
            double f_trial = 0.0;
            for (int b = 0; b < opts.max_backtracks; ++b, alpha *= opts.armijo_shrink)
            {
                try
                {
                    trial = manifold::retract(x, eta, alpha);
                }
                catch (const StepSizeError &)
                {
                    continue;
                }
                f_trial = objective.shifted_value(trial);
                if (std::isfinite(f_trial) && f_trial <= f + opts.armijo_c * alpha * slope)
                {
                    accepted = true;
                    // One safeguarded quadratic-interpolation refinement. CG needs a
                    // reasonably accurate step to keep its directions useful.
                    const double curv = f_trial - f - slope * alpha;
                    const double a2 = curv > 0.0 ? -slope * alpha * alpha / (2.0 * curv) : 0.0;
                    if (std::isfinite(a2) && a2 > 0.0 && std::abs(a2 - alpha) > 0.05 * alpha)
                    {
                        try
                        {
                            ManifoldPoint t2 = manifold::retract(x, eta, a2);
                            const double f2 = objective.shifted_value(t2);
                            if (std::isfinite(f2) && f2 < f_trial && f2 <= f + opts.armijo_c * a2 * slope)
                            {
                                trial = std::move(t2);
                                f_trial = f2;
                                alpha = a2;
                            }
                        }
                        catch (const StepSizeError &)
                        {
                        }
                    }
                    break;
                }
            }

            if (!accepted)
            {
                if (steepest)
                {
                    out.stalled = true;
                    break;
                }
                // Conjugate direction was poor: fall back to steepest descent once
                ++out.restarts;
                eta = -grad;
                steepest = true;
                alpha_guess = opts.alpha_init;
                continue;
            }

            CMatrix grad_new;
            const double f_new = objective.shifted_value_and_gradient(trial, grad_new);
            (void)f_trial;

            // Hestenes-Stiefel with transported previous direction and gradient
            const CMatrix eta_t = manifold::transport(x, trial, eta);
            const CMatrix grad_t = manifold::transport(x, trial, grad);
            const CMatrix y = grad_new - grad_t;
            const double denom = manifold::inner(eta_t, y);
            double beta = 0.0;
            if (std::abs(denom) >= 1e-14)
                beta = manifold::inner(grad_new, y) / denom;
            if (!(beta > 0.0) || !std::isfinite(beta))
                beta = 0.0;

            // Barzilai-Borwein guess for the next trial step
            const double sy = alpha * denom;
            const double ss = alpha * alpha * manifold::inner(eta_t, eta_t);
            const double bb = ss / sy;
            alpha_guess = (std::isfinite(bb) && bb > 0.0) ? bb : 2.0 * alpha;

            eta = -grad_new + beta * eta_t;
            steepest = (beta == 0.0);
            x = std::move(trial);
            f = f_new;
            grad = std::move(grad_new);
            gnorm = manifold::norm(grad);
            ++out.iterations;
            record();
        }

        out.point = std::move(x);
        out.grad_norm = gnorm;
        out.converged = gnorm <= tol;
        return out;
    }

    RVector update_multipliers(const RVector &lambda, double rho, const RVector &constraint_values,
                               double lambda_min, double lambda_max)
    {
        if (!(rho > 0.0))
            throw std::invalid_argument("update_multipliers: rho must be positive");
        return (lambda + rho * constraint_values).cwiseMax(lambda_min).cwiseMin(lambda_max);
    }

    double update_penalty(double rho, const RVector &sigma_prev, const RVector &sigma_curr, double tau,
                          double growth, bool first_iteration)
    {
        if (!(rho > 0.0))
            throw std::invalid_argument("update_penalty: rho must be positive");
        if (first_iteration)
            return rho;
        const double curr = sigma_curr.size() ? sigma_curr.cwiseAbs().maxCoeff() : 0.0;
        const double prev = sigma_prev.size() ? sigma_prev.cwiseAbs().maxCoeff() : 0.0;
        return curr <= tau * prev ? rho : growth * rho;
    }

    const char *to_string(SolveStatus s)
    {
        switch (s)
        {
        case SolveStatus::Converged:
            return "converged";
        case SolveStatus::IterationLimit:
            return "iteration_limit";
        case SolveStatus::Infeasible:
            return "infeasible";
        }
        return "unknown";
    }

    namespace
    {
        double max_violation(const RVector &g)
        {
            return g.size() ? std::max(0.0, g.maxCoeff()) : 0.0;
        }

        double max_ap_power(const ManifoldPoint &x, const fp::LiftedProblem &p)
        {
            double best = 0.0;
            for (Eigen::Index m = 0; m < x.cols(); ++m)
            {
                double power = 0.0;
                for (int k = 0; k < p.num_users; ++k)
                    power += x.matrix().col(m).segment(p.block_offset(k), p.num_antennas).squaredNorm();
                best = std::max(best, power);
            }
            return p.p_max * best;
        }
    }

    SolveResult solve(const ScenarioConfig &config, const ChannelSet &channels)
    {
        Rng rng(config.rng_seed ^ 0xA5A5A5A55A5A5A5AULL);
        const Eigen::Index rows = static_cast<Eigen::Index>(config.num_antennas + 1) * config.num_users;
        return solve(config, channels, manifold::random_point(rows, config.num_aps, rng));
    }

    SolveResult solve(const ScenarioConfig &config, const ChannelSet &channels, const ManifoldPoint &initial)
    {
        const auto t_start = std::chrono::steady_clock::now();
        config.validate();
        const SolverOptions &opts = config.solver;
        const fp::LiftedProblem problem =
            fp::LiftedProblem::build(channels, config.sensing_thresholds, config.noise_power, config.p_max);
        if (initial.rows() != problem.lifted_rows() || initial.cols() != problem.num_aps)
            throw std::invalid_argument("solve: initial point has the wrong shape");

        const int N = problem.num_targets;
        SolveReport report;
        ManifoldPoint x = initial;
        RVector mu = fp::update_mu(x, problem);
        RVector lambda = RVector::Zero(N);
        double rho = opts.rho_init;
        double rate_prev = sum_rate(fp::extract(x, problem.num_antennas, problem.num_users, problem.p_max), channels,
                                    problem.noise_power, problem.p_max);

        report.max_column_deviation = manifold::max_column_deviation(x.matrix());
        report.max_ap_power = max_ap_power(x, problem);

        bool converged = false;
        for (int t = 0; t < opts.max_outer_iterations; ++t)
        {
            if (opts.reset_alm_per_outer)
            {
                lambda.setZero();
                rho = opts.rho_init;
            }

            double eps = opts.eps_init;
            RVector sigma_prev = RVector::Zero(N);
            for (int j = 0; j < opts.max_alm_iterations; ++j)
            {
                const AugmentedLagrangian objective(problem, mu, lambda, rho);
                RcgResult r = rcg_inner_loop(x, objective, std::max(eps, opts.grad_tol), opts);

                report.rcg_iterations += r.iterations;
                report.max_column_deviation = std::max(report.max_column_deviation, r.max_column_deviation);
                if (opts.record_history)
                {
                    report.rcg_values.push_back(std::move(r.values));
                    report.rcg_grad_norms.push_back(std::move(r.grad_norms));
                }

                const double dist = (r.point.matrix() - x.matrix()).norm();
                x = std::move(r.point);
                report.max_ap_power = std::max(report.max_ap_power, max_ap_power(x, problem));

                const RVector g = fp::sensing_constraints(x, problem);
                const RVector lambda_next =
                    update_multipliers(lambda, rho, g, opts.lambda_min, opts.lambda_max);
                const RVector sigma = g.cwiseMax(-lambda_next / rho);
                const double eps_next = std::max(opts.eps_min, opts.eps_shrink * eps);
                // Once every surrogate is within the feasibility tolerance a larger penalty
                // only worsens conditioning, so rho is held.
                const bool settled =
                    (sigma.cwiseAbs().array() <= opts.violation_tol * problem.thresholds.array()).all();
                const double rho_next =
                    settled ? rho
                            : update_penalty(rho, sigma_prev, sigma, opts.violation_ratio, opts.rho_growth, j == 0);

                AlmIterationRecord rec;
                rec.outer = t;
                rec.index = j;
                rec.eps = eps;
                rec.rho = rho;
                rec.lambda = lambda_next;
                rec.sigma = sigma;
                rec.max_violation = max_violation(g);
                rec.rcg_iterations = r.iterations;
                rec.rcg_converged = r.converged;
                rec.rcg_stalled = r.stalled;
                rec.step_distance = dist;
                report.alm.push_back(std::move(rec));
                ++report.alm_iterations;

                lambda = lambda_next;
                sigma_prev = sigma;
                eps = eps_next;
                rho = rho_next;

                if (dist < opts.min_step_distance && !(eps > opts.eps_min))
                    break;
            }

            const double fhat = fp::reduced_objective(x, mu, problem);
            mu = fp::update_mu(x, problem);
            ++report.outer_iterations;
            report.reduced_objectives.push_back(fhat);
            // With mu = SINR the transformed objective equals the sum rate, so
            // the outer test watches the rate of the extracted iterate, relative to its size.
            const double rate = sum_rate(fp::extract(x, problem.num_antennas, problem.num_users, problem.p_max),
                                         channels, problem.noise_power, problem.p_max);
            report.sum_rates.push_back(rate);
            const double change = std::abs(rate - rate_prev);
            rate_prev = rate;
            if (change < opts.objective_tol * std::max(1.0, std::abs(rate)))
            {
                converged = true;
                break;
            }
        }

        SolveResult result;
        result.beam = fp::extract(x, problem.num_antennas, problem.num_users, problem.p_max);
        report.final_constraints = fp::sensing_constraints(x, problem);
        report.max_violation = max_violation(report.final_constraints);
        report.final_gains = problem.thresholds - report.final_constraints;
        report.final_sum_rate = sum_rate(result.beam, channels, problem.noise_power, problem.p_max);

        bool violated = false;
        for (int n = 0; n < N; ++n)
        {
            if (report.final_constraints[n] > opts.violation_tol * problem.thresholds[n])
            {
                violated = true;
                if (lambda[n] <= opts.lambda_min || lambda[n] >= opts.lambda_max)
                    report.lambda_at_bound.push_back(n);
            }
        }

        if (violated && rho >= opts.infeasible_rho_growth * opts.rho_init)
            report.status = SolveStatus::Infeasible;
        else if (!converged || violated)
            report.status = SolveStatus::IterationLimit;
        else
            report.status = SolveStatus::Converged;

        report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        result.lifted = std::move(x);
        result.report = std::move(report);
        return result;
    }

    namespace
    {
        CMatrix random_tangent(const ManifoldPoint &x, Rng &rng)
        {
            std::normal_distribution<double> gauss(0.0, 1.0);
            CMatrix z(x.rows(), x.cols());
            for (Eigen::Index c = 0; c < z.cols(); ++c)
                for (Eigen::Index r = 0; r < z.rows(); ++r)
                {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    z(r, c) = cplx(re, im);
                }
            z = manifold::project_to_tangent(x, z);
            return z / manifold::norm(z);
        }
    }

    double gradient_check(const ManifoldPoint &x, const AugmentedLagrangian &objective, int num_dirs, Rng &rng,
                          double step)
    {
        if (num_dirs < 1)
            throw std::invalid_argument("gradient_check: need at least one direction");
        const CMatrix grad = objective.riemannian_gradient(x);
        double worst = 0.0;
        for (int d = 0; d < num_dirs; ++d)
        {
            const CMatrix z = random_tangent(x, rng);
            const double analytic = manifold::inner(grad, z);
            const double fp_plus = objective.shifted_value(manifold::retract(x, z, step));
            const double fp_minus = objective.shifted_value(manifold::retract(x, z, -step));
            const double numeric = (fp_plus - fp_minus) / (2.0 * step);
            worst = std::max(worst, std::abs(analytic - numeric) / (std::abs(analytic) + 1e-15));
        }
        return worst;
    }

    CostSurface cost_surface(const ManifoldPoint &x, const AugmentedLagrangian &objective, std::vector<double> t1,
                             std::vector<double> t2, Rng &rng)
    {
        CostSurface s;
        s.d1 = random_tangent(x, rng);
        CMatrix z2 = random_tangent(x, rng);
        z2 -= manifold::inner(s.d1, z2) * s.d1;
        s.d2 = z2 / manifold::norm(z2);

        s.values.resize(static_cast<Eigen::Index>(t1.size()), static_cast<Eigen::Index>(t2.size()));
        for (std::size_t i = 0; i < t1.size(); ++i)
            for (std::size_t j = 0; j < t2.size(); ++j)
                s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    objective.value(manifold::retract(x, t1[i] * s.d1 + t2[j] * s.d2, 1.0));
        s.t1 = std::move(t1);
        s.t2 = std::move(t2);
        return s;
    }
}
