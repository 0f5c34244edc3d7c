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

// Command-line front end. Exit codes: 0 success, 1 solver infeasibility or a
// failed check, 2 usage, config or I/O error.

#include <algorithm>
#include <cstdlib>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "cfisac/harness.hpp"
#include "cfisac/units.hpp"

using namespace cfisac;

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_infeasible = 1;
    constexpr int exit_usage = 2;

    struct Overrides
    {
        std::optional<std::uint64_t> seed;
        std::optional<int> trials;
        std::optional<std::string> out;
        std::vector<std::string> algorithms;
        std::optional<double> angle_step;
        std::optional<int> jobs;
    };

    void forget_default(ExperimentSpec &spec, const std::string &key)
    {
        auto &d = spec.defaults_applied;
        d.erase(std::remove(d.begin(), d.end(), key), d.end());
    }

    ExperimentSpec load(const std::string &path, const Overrides &o)
    {
        ExperimentSpec spec = parse_config(path);
        if (o.seed)
        {
            spec.scenario.rng_seed = *o.seed;
            forget_default(spec, "experiment.seed");
        }
        if (o.trials)
        {
            spec.num_trials = *o.trials;
            forget_default(spec, "experiment.trials");
        }
        if (o.out)
        {
            spec.output_dir = *o.out;
            forget_default(spec, "experiment.output_dir");
            // An explicit flag beats the environment override.
            ::unsetenv(harness::output_dir_env);
        }
        if (!o.algorithms.empty())
        {
            spec.algorithms.clear();
            for (const std::string &a : o.algorithms)
                spec.algorithms.push_back(parse_algorithm(a));
            forget_default(spec, "experiment.algorithms");
        }
        if (o.angle_step)
        {
            spec.angle_step = *o.angle_step;
            forget_default(spec, "experiment.angle_step");
        }
        if (o.jobs)
        {
            spec.jobs = *o.jobs;
            forget_default(spec, "experiment.jobs");
        }
        spec.validate();
        return spec;
    }

    void add_common(CLI::App *cmd, Overrides &o, bool with_alg_list)
    {
        cmd->add_option("--seed", o.seed, "Base seed; trial t uses seed XOR t");
        cmd->add_option("--trials", o.trials, "Monte Carlo trials per sweep point")->check(CLI::PositiveNumber);
        cmd->add_option("--out", o.out, "Output directory (overrides config and environment)");
        cmd->add_option("--angle-step", o.angle_step, "Beampattern grid step in degrees");
        cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
        if (with_alg_list)
            cmd->add_option("--alg", o.algorithms, "Algorithms to run (ALMCI, ZF, MMSE, ORACLE)");
    }

    void print_summary(const harness::AggregateResult &res)
    {
        for (std::size_t i = 0; i < res.points.size(); ++i)
        {
            const SweepPoint &p = res.points[i].point;
            fmt::print("point {}  L={}  p_max={:.2f} dBm  K={}\n", i, p.num_antennas, watts_to_dbm(p.p_max),
                       p.num_users);
            for (const harness::AlgorithmSummary &s : res.points[i].algorithms)
                fmt::print("  {:<7} mean sum rate {:>9.4f} bps/Hz  std {:>8.4f}  median outer {:>4.1f}  done {}/{}\n",
                           to_string(s.algorithm), s.mean_sum_rate, s.std_sum_rate, s.median_outer_iterations,
                           s.completed, s.trials);
        }
        for (const std::string &f : res.files)
            fmt::print("wrote {}\n", f);
        fmt::print("wall time {:.2f} s\n", res.wall_seconds);
    }

    int run_command(const std::string &config, const Overrides &o, bool require_sweep)
    {
        ExperimentSpec spec = load(config, o);
        if (require_sweep && spec.sweep.empty())
            throw ConfigError("sweep: the config has no experiment.sweep section");
        const harness::AggregateResult res = harness::run_experiment(spec);
        print_summary(res);
        if (res.failed_trials > 0)
            fmt::print("{} trial(s) failed; see trials.csv\n", res.failed_trials);
        if (res.infeasible_trials > 0)
        {
            fmt::print("{} trial(s) infeasible\n", res.infeasible_trials);
            return exit_infeasible;
        }
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Beamforming for cell-free integrated sensing and communication"};
    app.require_subcommand(1);

    Overrides o;
    std::string config;

    CLI::App *run = app.add_subcommand("run", "Run the Monte Carlo experiment described by a config");
    run->add_option("config", config, "YAML config")->required();
    add_common(run, o, true);

    CLI::App *sweep = app.add_subcommand("sweep", "Run a config's parameter sweep");
    sweep->add_option("config", config, "YAML config")->required();
    add_common(sweep, o, true);

    std::string bp_alg;
    int bp_point = 0, bp_trial = 0;
    CLI::App *bp = app.add_subcommand("beampattern", "Emit the per-AP beampattern CSV of one algorithm");
    bp->add_option("config", config, "YAML config")->required();
    bp->add_option("--alg", bp_alg, "ALMCI, ZF, MMSE or ORACLE")->required();
    bp->add_option("--point", bp_point, "Sweep point index");
    bp->add_option("--trial", bp_trial, "Trial index (selects the drop)");
    add_common(bp, o, false);

    int gc_count = 20, gc_dirs = 10;
    std::vector<int> gc_antennas;
    double gc_tol = 1e-6;
    CLI::App *gc = app.add_subcommand("gradcheck", "Compare the Riemannian gradient with finite differences");
    gc->add_option("config", config, "YAML config")->required();
    gc->add_option("--count", gc_count, "Random scenarios")->check(CLI::PositiveNumber);
    gc->add_option("--antennas", gc_antennas, "Antenna counts to cycle through (default: config value)");
    gc->add_option("--directions", gc_dirs, "Tangent directions per scenario")->check(CLI::PositiveNumber);
    gc->add_option("--tol", gc_tol, "Pass threshold on the max relative error");
    gc->add_option("--seed", o.seed, "Base seed");

    int oc_count = 20;
    CLI::App *oc = app.add_subcommand("oracle", "Compare ALMCI with the exhaustive grid oracle on a tiny instance");
    oc->add_option("config", config, "YAML config")->required();
    oc->add_option("--count", oc_count, "Drops to compare")->check(CLI::PositiveNumber);
    oc->add_option("--seed", o.seed, "Base seed");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        std::cerr << app.help();
        return exit_usage;
    }

    try
    {
        if (*run)
            return run_command(config, o, false);
        if (*sweep)
            return run_command(config, o, true);

        if (*bp)
        {
            const ExperimentSpec spec = load(config, o);
            const Algorithm alg = parse_algorithm(bp_alg);
            const std::string dir = harness::resolve_output_dir(spec);
            harness::check_output_dir(dir);
            const BeamMatrix beam = harness::design_beam(spec, alg, bp_point, bp_trial);
            const double p_max = spec.sweep_points().at(static_cast<std::size_t>(bp_point)).p_max;
            const std::string path =
                (std::filesystem::path(dir) / fmt::format("beampattern_{}.csv", [&] {
                     std::string s(to_string(alg));
                     std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
                     return s;
                 }())).string();
            std::ofstream out(path, std::ios::binary);
            out << harness::beampattern_csv(harness::beampattern(beam, p_max, spec.angle_step));
            if (!out)
                throw harness::IoError("failed to write " + path);
            fmt::print("wrote {}\n", path);
            return exit_ok;
        }

        if (*gc)
        {
            const ExperimentSpec spec = load(config, o);
            const harness::GradcheckResult r = harness::run_gradcheck(spec, gc_count, gc_antennas, gc_dirs);
            for (std::size_t i = 0; i < r.errors.size(); ++i)
                fmt::print("scenario {:>3}  max relative error {:.3e}\n", i, r.errors[i]);
            fmt::print("max relative error: {:.3e}\n", r.max_error);
            return r.max_error <= gc_tol ? exit_ok : exit_infeasible;
        }

        if (*oc)
        {
            const ExperimentSpec spec = load(config, o);
            const harness::OracleComparison r = harness::run_oracle_comparison(spec, oc_count);
            for (const auto &row : r.rows)
                fmt::print("seed {:>6}  almci {:.6f}  oracle {:.6f}  gap {:+.3e}{}\n", row.seed, row.almci_rate,
                           row.oracle_rate, row.relative_gap, row.oracle_found ? "" : "  (oracle found no feasible point)");
            fmt::print("worst relative gap: {:+.3e}\n", r.worst_gap);
            return exit_ok;
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const harness::IoError &e)
    {
        std::cerr << "I/O error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const InfeasibleInputError &e)
    {
        std::cerr << "infeasible: " << e.what() << "\n";
        return exit_infeasible;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    std::cerr << app.help();
    return exit_usage;
}
