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

#include "cfisac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <thread>

#include <fmt/core.h>
#include <json.hpp>

#include "cfisac/baselines.hpp"
#include "cfisac/units.hpp"

namespace fs = std::filesystem;

namespace cfisac::harness
{
    std::string format_double(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        return fmt::format("{:.17g}", v);
    }

    const AlgorithmSummary *PointSummary::find(Algorithm a) const
    {
        for (const AlgorithmSummary &s : algorithms)
            if (s.algorithm == a)
                return &s;
        return nullptr;
    }

    std::string resolve_output_dir(const ExperimentSpec &spec)
    {
        if (const char *env = std::getenv(output_dir_env); env && *env)
            return env;
        return spec.output_dir;
    }

    void check_output_dir(const std::string &dir)
    {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw IoError(fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
        const fs::path probe = fs::path(dir) / ".cfisac-write-probe";
        {
            std::ofstream out(probe);
            if (!out || !(out << "ok"))
                throw IoError(fmt::format("output directory '{}' is not writable", dir));
        }
        fs::remove(probe, ec);
    }

    namespace
    {
        using Clock = std::chrono::steady_clock;

        double seconds_since(Clock::time_point t0)
        {
            return std::chrono::duration<double>(Clock::now() - t0).count();
        }

        std::uint64_t trial_seed(const ExperimentSpec &spec, int trial)
        {
            return spec.scenario.rng_seed ^ static_cast<std::uint64_t>(trial);
        }

        struct Drop
        {
            ScenarioConfig config;
            ChannelSet channels;
        };

        Drop make_drop(const ExperimentSpec &spec, const SweepPoint &point, int trial)
        {
            Drop d;
            d.config = spec.scenario_at(point);
            d.config.rng_seed = trial_seed(spec, trial);
            Rng rng(d.config.rng_seed);
            d.channels = draw_channels(d.config, rng);
            return d;
        }

        void fill_sensing(TrialRecord &rec, const BeamMatrix &beam, const Drop &d)
        {
            double worst = 0.0, worst_rel = 0.0;
            for (int n = 0; n < d.config.num_targets; ++n)
            {
                const double gamma = d.config.sensing_thresholds[static_cast<std::size_t>(n)];
                const double miss = std::max(0.0, gamma - beampattern_gain(beam, d.channels, n, d.config.p_max));
                worst = std::max(worst, miss);
                if (gamma > 0.0)
                    worst_rel = std::max(worst_rel, miss / gamma);
            }
            rec.max_violation = worst;
            rec.max_relative_violation = worst_rel;
        }

        double max_power(const BeamMatrix &beam, double p_max)
        {
            double best = 0.0;
            for (int m = 0; m < beam.num_aps(); ++m)
                best = std::max(best, per_ap_power(beam, m, p_max));
            return best;
        }

        struct AlgorithmRun
        {
            TrialRecord record;
            std::optional<BeamMatrix> beam;
            std::optional<alm::SolveResult> solve; // ALMCI only
        };

        AlgorithmRun run_algorithm(const ExperimentSpec &spec, Algorithm alg, const Drop &d)
        {
            AlgorithmRun run;
            TrialRecord &rec = run.record;
            rec.algorithm = alg;
            rec.seed = d.config.rng_seed;
            const auto t0 = Clock::now();
            try
            {
                switch (alg)
                {
                case Algorithm::ALMCI:
                {
                    alm::SolveResult r = alm::solve(d.config, d.channels);
                    rec.status = alm::to_string(r.report.status);
                    rec.sum_rate = r.report.final_sum_rate;
                    rec.outer_iterations = r.report.outer_iterations;
                    rec.alm_iterations = r.report.alm_iterations;
                    rec.rcg_iterations = r.report.rcg_iterations;
                    rec.max_column_deviation = r.report.max_column_deviation;
                    rec.max_ap_power = r.report.max_ap_power;
                    fill_sensing(rec, r.beam, d);
                    run.beam = r.beam;
                    run.solve = std::move(r);
                    break;
                }
                case Algorithm::ZF:
                case Algorithm::MMSE:
                {
                    const auto kind = alg == Algorithm::ZF ? baselines::BaselineKind::ZF : baselines::BaselineKind::MMSE;
                    BeamMatrix beam =
                        baselines::baseline_beamformer(kind, d.channels, d.config.noise_power, d.config.p_max);
                    rec.status = "ok";
                    rec.sum_rate = sum_rate(beam, d.channels, d.config.noise_power, d.config.p_max);
                    rec.max_ap_power = max_power(beam, d.config.p_max);
                    run.beam = std::move(beam);
                    break;
                }
                case Algorithm::ORACLE:
                {
                    baselines::OracleResult o =
                        baselines::grid_search_oracle(d.channels, d.config.sensing_thresholds, d.config.noise_power,
                                                      d.config.p_max, spec.oracle_resolution);
                    rec.status = o.found ? "ok" : "no_feasible_point";
                    if (o.found)
                    {
                        rec.sum_rate = o.sum_rate;
                        rec.max_ap_power = max_power(o.beam, d.config.p_max);
                        fill_sensing(rec, o.beam, d);
                        run.beam = std::move(o.beam);
                    }
                    break;
                }
                }
            }
            catch (const std::exception &e)
            {
                rec.status = "error";
                rec.error = e.what();
                run.beam.reset();
                run.solve.reset();
            }
            rec.wall_seconds = seconds_since(t0);
            return run;
        }

        struct WorkItem
        {
            std::vector<AlgorithmRun> runs;
        };

        AlgorithmSummary summarize(Algorithm alg, const std::vector<const TrialRecord *> &recs)
        {
            AlgorithmSummary s;
            s.algorithm = alg;
            s.trials = static_cast<int>(recs.size());
            std::vector<double> rates, outers, violations;
            double alm_sum = 0.0, rcg_sum = 0.0, wall = 0.0;
            for (const TrialRecord *r : recs)
            {
                wall += r->wall_seconds;
                if (r->failed())
                    ++s.failures;
                if (r->status == "infeasible")
                    ++s.infeasible;
                if (r->excluded())
                    continue;
                rates.push_back(r->sum_rate);
                outers.push_back(r->outer_iterations);
                alm_sum += r->alm_iterations;
                rcg_sum += r->rcg_iterations;
                if (r->max_violation)
                    violations.push_back(*r->max_violation);
            }
            s.completed = static_cast<int>(rates.size());
            s.mean_wall_seconds = recs.empty() ? 0.0 : wall / static_cast<double>(recs.size());
            if (rates.empty())
            {
                const double nan = std::numeric_limits<double>::quiet_NaN();
                s.mean_sum_rate = s.std_sum_rate = s.mean_outer_iterations = s.median_outer_iterations = nan;
                s.mean_alm_iterations = s.mean_rcg_iterations = nan;
                return s;
            }
            const double n = static_cast<double>(rates.size());
            double sum = 0.0;
            for (double r : rates)
                sum += r;
            s.mean_sum_rate = sum / n;
            double var = 0.0;
            for (double r : rates)
                var += (r - s.mean_sum_rate) * (r - s.mean_sum_rate);
            s.std_sum_rate = rates.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;

            double osum = 0.0;
            for (double o : outers)
                osum += o;
            s.mean_outer_iterations = osum / n;
            std::sort(outers.begin(), outers.end());
            const std::size_t mid = outers.size() / 2;
            s.median_outer_iterations = outers.size() % 2 ? outers[mid] : 0.5 * (outers[mid - 1] + outers[mid]);
            s.mean_alm_iterations = alm_sum / n;
            s.mean_rcg_iterations = rcg_sum / n;
            if (!violations.empty())
            {
                double vsum = 0.0;
                for (double v : violations)
                    vsum += v;
                s.mean_violation = vsum / static_cast<double>(violations.size());
                s.max_violation = *std::max_element(violations.begin(), violations.end());
            }
            return s;
        }

        std::string opt(const std::optional<double> &v) { return v ? format_double(*v) : std::string(); }

        std::string csv_escape(const std::string &s)
        {
            if (s.find_first_of(",\"\n\r") == std::string::npos)
                return s;
            std::string out = "\"";
            for (char c : s)
            {
                if (c == '"')
                    out += '"';
                out += (c == '\n' || c == '\r') ? ' ' : c;
            }
            return out + "\"";
        }

        std::string trials_csv(const AggregateResult &res, const std::vector<SweepPoint> &points)
        {
            std::string out = "point,trial,seed,algorithm,num_antennas,p_max_w,num_users,status,sum_rate,"
                              "max_violation_w,max_relative_violation,outer_iterations,alm_iterations,"
                              "rcg_iterations,max_column_deviation,max_ap_power_w,error\n";
            for (const TrialRecord &r : res.trials)
            {
                const SweepPoint &p = points[static_cast<std::size_t>(r.point)];
                out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.point, r.trial, r.seed,
                                   to_string(r.algorithm), p.num_antennas, format_double(p.p_max), p.num_users,
                                   r.status, r.failed() ? std::string() : format_double(r.sum_rate),
                                   opt(r.max_violation), opt(r.max_relative_violation), r.outer_iterations,
                                   r.alm_iterations, r.rcg_iterations, opt(r.max_column_deviation),
                                   format_double(r.max_ap_power), csv_escape(r.error));
            }
            return out;
        }

        // JSON cannot carry NaN; missing statistics become null.
        nlohmann::ordered_json num(double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr; }
        nlohmann::ordered_json num(const std::optional<double> &v) { return v ? num(*v) : nullptr; }

        nlohmann::ordered_json points_json(const std::vector<Point2> &pts)
        {
            auto arr = nlohmann::ordered_json::array();
            for (const Point2 &p : pts)
                arr.push_back({p.x, p.y});
            return arr;
        }

        nlohmann::ordered_json config_json(const ExperimentSpec &spec)
        {
            using nlohmann::ordered_json;
            const ScenarioConfig &c = spec.scenario;
            const SolverOptions &o = c.solver;
            ordered_json j;
            ordered_json &s = j["scenario"];
            s["num_aps"] = c.num_aps;
            s["num_antennas"] = c.num_antennas;
            s["num_users"] = c.num_users;
            s["num_targets"] = c.num_targets;
            s["p_max_w"] = c.p_max;
            s["noise_power_w"] = c.noise_power;
            s["sensing_thresholds_w"] = c.sensing_thresholds;
            s["pathloss_ref"] = c.pathloss_ref;
            s["ref_distance"] = c.ref_distance;
            s["pathloss_exponent"] = c.pathloss_exponent;
            s["area"] = {c.area_width, c.area_height};
            s["ap_positions"] = points_json(c.ap_positions);
            s["user_positions"] = points_json(c.user_positions);
            s["target_positions"] = points_json(c.target_positions);
            s["target_angles_deg"] = c.target_angles_deg;

            ordered_json &v = j["solver"];
            v["grad_tol"] = o.grad_tol;
            v["objective_tol"] = o.objective_tol;
            v["eps_init"] = o.eps_init;
            v["eps_min"] = o.eps_min;
            v["eps_shrink"] = o.eps_shrink;
            v["rho_init"] = o.rho_init;
            v["rho_growth"] = o.rho_growth;
            v["violation_ratio"] = o.violation_ratio;
            v["min_step_distance"] = o.min_step_distance;
            v["lambda_min"] = o.lambda_min;
            v["lambda_max"] = o.lambda_max;
            v["armijo_c"] = o.armijo_c;
            v["armijo_shrink"] = o.armijo_shrink;
            v["alpha_init"] = o.alpha_init;
            v["max_backtracks"] = o.max_backtracks;
            v["max_rcg_iterations"] = o.max_rcg_iterations;
            v["max_alm_iterations"] = o.max_alm_iterations;
            v["max_outer_iterations"] = o.max_outer_iterations;
            v["violation_tol"] = o.violation_tol;
            v["infeasible_rho_growth"] = o.infeasible_rho_growth;
            v["reset_alm_per_outer"] = o.reset_alm_per_outer;
            v["record_history"] = o.record_history;

            ordered_json &e = j["experiment"];
            e["seed"] = c.rng_seed;
            e["trials"] = spec.num_trials;
            auto algs = ordered_json::array();
            for (Algorithm a : spec.algorithms)
                algs.push_back(std::string(to_string(a)));
            e["algorithms"] = algs;
            ordered_json sweep = ordered_json::object();
            for (const SweepDimension &d : spec.sweep)
            {
                if (d.axis == SweepAxis::PMax)
                {
                    sweep["p_max_w"] = d.values;
                    continue;
                }
                std::vector<int> counts;
                for (double v : d.values)
                    counts.push_back(static_cast<int>(v));
                sweep[std::string(to_string(d.axis))] = counts;
            }
            e["sweep"] = sweep;
            auto emits = ordered_json::array();
            for (Emit x : spec.emit)
                emits.push_back(std::string(to_string(x)));
            e["emit"] = emits;
            e["angle_step"] = spec.angle_step;
            e["oracle_resolution"] = spec.oracle_resolution;
            e["surface_span"] = spec.surface_span;
            e["surface_points"] = spec.surface_points;
            return j;
        }

        std::string summary_json(const ExperimentSpec &spec, const AggregateResult &res,
                                 const std::vector<SweepPoint> &points)
        {
            using nlohmann::ordered_json;
            ordered_json j;
            j["config"] = config_json(spec);
            j["defaults_applied"] = spec.defaults_applied;
            auto arr = ordered_json::array();
            for (std::size_t i = 0; i < res.points.size(); ++i)
            {
                const PointSummary &ps = res.points[i];
                ordered_json p;
                p["point"] = i;
                p["num_antennas"] = points[i].num_antennas;
                p["p_max_w"] = points[i].p_max;
                p["p_max_dbm"] = watts_to_dbm(points[i].p_max);
                p["num_users"] = points[i].num_users;
                ordered_json algs = ordered_json::object();
                for (const AlgorithmSummary &s : ps.algorithms)
                {
                    ordered_json a;
                    a["trials"] = s.trials;
                    a["completed"] = s.completed;
                    a["failures"] = s.failures;
                    a["infeasible"] = s.infeasible;
                    a["mean_sum_rate"] = num(s.mean_sum_rate);
                    a["std_sum_rate"] = num(s.std_sum_rate);
                    a["mean_outer_iterations"] = num(s.mean_outer_iterations);
                    a["median_outer_iterations"] = num(s.median_outer_iterations);
                    a["mean_alm_iterations"] = num(s.mean_alm_iterations);
                    a["mean_rcg_iterations"] = num(s.mean_rcg_iterations);
                    a["mean_violation_w"] = num(s.mean_violation);
                    a["max_violation_w"] = num(s.max_violation);
                    algs[std::string(to_string(s.algorithm))] = a;
                }
                p["algorithms"] = algs;
                arr.push_back(p);
            }
            j["points"] = arr;
            j["failed_trials"] = res.failed_trials;
            j["infeasible_trials"] = res.infeasible_trials;
            return j.dump(2) + "\n";
        }

        std::string report_text(const ExperimentSpec &spec, const AggregateResult &res,
                                const std::vector<SweepPoint> &points)
        {
            std::string out = fmt::format("cfisac experiment report\nseed {}  trials {}  jobs {}  output {}\n\n",
                                          spec.scenario.rng_seed, spec.num_trials, spec.jobs, res.output_dir);
            for (std::size_t i = 0; i < res.points.size(); ++i)
            {
                const SweepPoint &p = points[i];
                out += fmt::format("point {}: L={} p_max={:.2f} dBm K={}\n", i, p.num_antennas, watts_to_dbm(p.p_max),
                                   p.num_users);
                out += fmt::format("  {:<7} {:>6} {:>6} {:>6} {:>12} {:>10} {:>8} {:>12} {:>10}\n", "alg", "done",
                                   "fail", "infeas", "mean rate", "std", "med out", "max viol W", "mean s");
                for (const AlgorithmSummary &s : res.points[i].algorithms)
                    out += fmt::format("  {:<7} {:>6} {:>6} {:>6} {:>12.4f} {:>10.4f} {:>8.1f} {:>12.3e} {:>10.4f}\n",
                                       to_string(s.algorithm), s.completed, s.failures, s.infeasible,
                                       s.mean_sum_rate, s.std_sum_rate, s.median_outer_iterations,
                                       s.max_violation.value_or(0.0), s.mean_wall_seconds);
                out += "\n";
            }
            out += fmt::format("failed trials {}  infeasible trials {}\ntotal wall time {:.3f} s\n", res.failed_trials,
                               res.infeasible_trials, res.wall_seconds);
            return out;
        }

        void write_file(const fs::path &path, const std::string &content, std::vector<std::string> &written)
        {
            std::ofstream out(path, std::ios::binary);
            out << content;
            if (!out)
                throw IoError(fmt::format("failed to write '{}'", path.string()));
            written.push_back(path.string());
        }

        std::string surface_csv(const alm::SolveResult &r, const Drop &d, const ExperimentSpec &spec)
        {
            const fp::LiftedProblem problem =
                fp::LiftedProblem::build(d.channels, d.config.sensing_thresholds, d.config.noise_power, d.config.p_max);
            const RVector mu = fp::update_mu(r.lifted, problem);
            RVector lambda = RVector::Zero(problem.num_targets);
            double rho = d.config.solver.rho_init;
            if (!r.report.alm.empty())
            {
                lambda = r.report.alm.back().lambda;
                rho = r.report.alm.back().rho;
            }
            const alm::AugmentedLagrangian objective(problem, mu, lambda, rho);
            std::vector<double> t(static_cast<std::size_t>(spec.surface_points));
            for (int i = 0; i < spec.surface_points; ++i)
                t[static_cast<std::size_t>(i)] =
                    -spec.surface_span + 2.0 * spec.surface_span * i / (spec.surface_points - 1);
            Rng rng(d.config.rng_seed ^ 0x5DEECE66DULL);
            const alm::CostSurface s = alm::cost_surface(r.lifted, objective, t, t, rng);
            std::string out = "t1,t2,lagrangian\n";
            for (std::size_t i = 0; i < s.t1.size(); ++i)
                for (std::size_t j = 0; j < s.t2.size(); ++j)
                    out += fmt::format("{},{},{}\n", format_double(s.t1[i]), format_double(s.t2[j]),
                                       format_double(s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
            return out;
        }

        std::string lower(std::string_view s)
        {
            std::string out(s);
            for (char &c : out)
                c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            return out;
        }
    }

    AggregateResult run_experiment(const ExperimentSpec &spec, const RunOptions &options)
    {
        spec.validate();
        const auto t0 = Clock::now();
        AggregateResult res;
        res.output_dir = resolve_output_dir(spec);
        if (options.write_files)
            check_output_dir(res.output_dir);

        const std::vector<SweepPoint> points = spec.sweep_points();
        const std::size_t num_items = points.size() * static_cast<std::size_t>(spec.num_trials);
        std::vector<WorkItem> items(num_items);
        const bool need_extras = options.write_files && (spec.wants(Emit::BeampatternCsv) || spec.wants(Emit::SurfaceCsv));

        auto work = [&](std::size_t idx)
        {
            const int point = static_cast<int>(idx / static_cast<std::size_t>(spec.num_trials));
            const int trial = static_cast<int>(idx % static_cast<std::size_t>(spec.num_trials));
            WorkItem &item = items[idx];
            std::optional<Drop> drop;
            std::string drop_error;
            try
            {
                drop = make_drop(spec, points[static_cast<std::size_t>(point)], trial);
            }
            catch (const std::exception &e)
            {
                drop_error = e.what();
            }
            for (Algorithm alg : spec.algorithms)
            {
                AlgorithmRun run;
                if (drop)
                    run = run_algorithm(spec, alg, *drop);
                else
                {
                    run.record.algorithm = alg;
                    run.record.seed = trial_seed(spec, trial);
                    run.record.status = "error";
                    run.record.error = drop_error;
                }
                run.record.point = point;
                run.record.trial = trial;
                const bool keep_solve = options.keep_reports || (need_extras && trial == 0);
                if (!keep_solve)
                    run.solve.reset();
                if (!(need_extras && trial == 0))
                    run.beam.reset();
                item.runs.push_back(std::move(run));
            }
        };

        const int width = std::max(1, std::min<int>(spec.jobs, static_cast<int>(num_items)));
        if (width == 1)
        {
            for (std::size_t i = 0; i < num_items; ++i)
                work(i);
        }
        else
        {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> pool;
            for (int w = 0; w < width; ++w)
                pool.emplace_back([&]
                                  {
                                      for (std::size_t i = next++; i < num_items; i = next++)
                                          work(i);
                                  });
            for (std::thread &th : pool)
                th.join();
        }

        // Collection after join: file order is by point, trial, algorithm
        for (WorkItem &item : items)
            for (AlgorithmRun &run : item.runs)
            {
                res.trials.push_back(run.record);
                if (run.record.failed())
                    ++res.failed_trials;
                if (run.record.status == "infeasible")
                    ++res.infeasible_trials;
                if (options.keep_reports)
                    res.reports.push_back(run.solve ? std::optional<alm::SolveReport>(run.solve->report) : std::nullopt);
            }

        for (std::size_t p = 0; p < points.size(); ++p)
        {
            PointSummary ps;
            ps.point = points[p];
            for (Algorithm alg : spec.algorithms)
            {
                std::vector<const TrialRecord *> recs;
                for (const TrialRecord &r : res.trials)
                    if (r.point == static_cast<int>(p) && r.algorithm == alg)
                        recs.push_back(&r);
                ps.algorithms.push_back(summarize(alg, recs));
            }
            res.points.push_back(std::move(ps));
        }
        res.wall_seconds = seconds_since(t0);

        if (!options.write_files)
            return res;

        const fs::path dir(res.output_dir);
        if (spec.wants(Emit::TrialsCsv))
            write_file(dir / "trials.csv", trials_csv(res, points), res.files);
        if (spec.wants(Emit::SummaryJson))
            write_file(dir / "summary.json", summary_json(spec, res, points), res.files);
        for (std::size_t p = 0; p < points.size(); ++p)
        {
            const std::string suffix = points.size() > 1 ? fmt::format("_p{}", p) : std::string();
            const WorkItem &item = items[p * static_cast<std::size_t>(spec.num_trials)];
            if (spec.wants(Emit::BeampatternCsv))
                for (const AlgorithmRun &run : item.runs)
                    if (run.beam)
                        write_file(dir / fmt::format("beampattern_{}{}.csv", lower(to_string(run.record.algorithm)), suffix),
                                   beampattern_csv(beampattern(*run.beam, points[p].p_max, spec.angle_step)), res.files);
            if (spec.wants(Emit::SurfaceCsv))
                for (const AlgorithmRun &run : item.runs)
                    if (run.solve)
                        write_file(dir / fmt::format("surface{}.csv", suffix),
                                   surface_csv(*run.solve, make_drop(spec, points[p], 0), spec), res.files);
        }
        if (spec.wants(Emit::ReportText))
            write_file(dir / "report.txt", report_text(spec, res, points), res.files);
        return res;
    }

    std::vector<double> angle_grid(double step_deg)
    {
        const double count = 180.0 / step_deg;
        if (!(step_deg > 0.0) || std::abs(count - std::round(count)) > 1e-9)
            throw std::invalid_argument(fmt::format("angle step {} does not divide 180 degrees evenly", step_deg));
        const int n = static_cast<int>(std::lround(count));
        std::vector<double> grid(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i)
            grid[static_cast<std::size_t>(i)] = -90.0 + 180.0 * i / n;
        return grid;
    }

    Beampattern beampattern(const BeamMatrix &beam, double p_max, double step_deg)
    {
        Beampattern bp;
        bp.angles_deg = angle_grid(step_deg);
        std::vector<double> rad(bp.angles_deg.size());
        std::transform(bp.angles_deg.begin(), bp.angles_deg.end(), rad.begin(), deg_to_rad);
        bp.gains = beampattern_sweep(beam, rad, p_max);
        return bp;
    }

    std::string beampattern_csv(const Beampattern &bp)
    {
        std::string out = "angle_deg";
        for (Eigen::Index m = 0; m < bp.gains.cols(); ++m)
            out += fmt::format(",gain_dBm_ap{}", m + 1);
        out += '\n';
        for (std::size_t i = 0; i < bp.angles_deg.size(); ++i)
        {
            out += format_double(bp.angles_deg[i]);
            for (Eigen::Index m = 0; m < bp.gains.cols(); ++m)
                out += "," + format_double(watts_to_dbm(bp.gains(static_cast<Eigen::Index>(i), m)));
            out += '\n';
        }
        return out;
    }

    BeamMatrix design_beam(const ExperimentSpec &spec, Algorithm algorithm, int point, int trial)
    {
        const std::vector<SweepPoint> points = spec.sweep_points();
        if (point < 0 || point >= static_cast<int>(points.size()))
            throw std::invalid_argument("design_beam: sweep point out of range");
        const Drop d = make_drop(spec, points[static_cast<std::size_t>(point)], trial);
        AlgorithmRun run = run_algorithm(spec, algorithm, d);
        if (run.record.status == "error")
            throw std::runtime_error(run.record.error);
        if (!run.beam)
            throw std::runtime_error(fmt::format("{} produced no beam ({})", to_string(algorithm), run.record.status));
        return *run.beam;
    }

    GradcheckResult run_gradcheck(const ExperimentSpec &spec, int scenarios, const std::vector<int> &antennas,
                                  int directions)
    {
        if (scenarios < 1)
            throw std::invalid_argument("run_gradcheck: need at least one scenario");
        GradcheckResult out;
        for (int s = 0; s < scenarios; ++s)
        {
            SweepPoint p{spec.scenario.num_antennas, spec.scenario.p_max, spec.scenario.num_users};
            if (!antennas.empty())
                p.num_antennas = antennas[static_cast<std::size_t>(s) % antennas.size()];
            const Drop d = make_drop(spec, p, s);
            const fp::LiftedProblem problem =
                fp::LiftedProblem::build(d.channels, d.config.sensing_thresholds, d.config.noise_power, d.config.p_max);

            Rng rng(d.config.rng_seed ^ 0x9E3779B97F4A7C15ULL);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const manifold::ManifoldPoint x = manifold::random_point(problem.lifted_rows(), problem.num_aps, rng);
            RVector mu(problem.num_users), lambda(problem.num_targets);
            for (Eigen::Index k = 0; k < mu.size(); ++k)
                mu[k] = 5.0 * unit(rng);
            for (Eigen::Index n = 0; n < lambda.size(); ++n)
                lambda[n] = 2.0 * unit(rng);
            const double rho = 0.5 + 9.5 * unit(rng);
            const alm::AugmentedLagrangian objective(problem, mu, lambda, rho);
            const double err = alm::gradient_check(x, objective, directions, rng);
            out.errors.push_back(err);
            out.max_error = std::max(out.max_error, err);
        }
        return out;
    }

    OracleComparison run_oracle_comparison(const ExperimentSpec &spec, int trials)
    {
        if (trials < 1)
            throw std::invalid_argument("run_oracle_comparison: need at least one trial");
        OracleComparison out;
        const SweepPoint p = spec.sweep_points().front();
        for (int t = 0; t < trials; ++t)
        {
            const Drop d = make_drop(spec, p, t);
            OracleComparison::Row row;
            row.seed = d.config.rng_seed;
            const alm::SolveResult r = alm::solve(d.config, d.channels);
            row.almci_rate = r.report.final_sum_rate;
            row.almci_feasible = r.report.status != alm::SolveStatus::Infeasible;
            const baselines::OracleResult o = baselines::grid_search_oracle(
                d.channels, d.config.sensing_thresholds, d.config.noise_power, d.config.p_max, spec.oracle_resolution);
            row.oracle_found = o.found;
            row.oracle_rate = o.sum_rate;
            row.relative_gap = o.found && o.sum_rate > 0.0 ? (o.sum_rate - row.almci_rate) / o.sum_rate : 0.0;
            out.worst_gap = t == 0 ? row.relative_gap : std::max(out.worst_gap, row.relative_gap);
            out.rows.push_back(row);
        }
        return out;
    }
}
