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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "cfisac/alm_solver.hpp"
#include "cfisac/baselines.hpp"
#include "cfisac/harness.hpp"
#include "cfisac/units.hpp"

using namespace cfisac;
namespace fs = std::filesystem;

namespace
{
    const std::string config_dir = CFISAC_CONFIG_DIR;

    struct Verdict
    {
        bool pass = true;
        std::string detail;
    };

    int failures = 0;

    void report(const std::string &id, const std::string &title, const std::function<Verdict()> &check)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try
        {
            v = check();
        }
        catch (const std::exception &e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!v.pass)
            ++failures;
        fmt::print("criterion {:<3} {}  {} ({:.1f} s): {}\n", id, v.pass ? "PASS" : "FAIL", title, secs, v.detail);
        std::fflush(stdout);
    }

    ExperimentSpec load(const std::string &name)
    {
        ExperimentSpec s = parse_config(config_dir + "/" + name);
        s.output_dir = (fs::temp_directory_path() / "cfisac_acceptance").string();
        return s;
    }

    double median(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

    double subspace_angle(const CMatrix &a, const CMatrix &b)
    {
        const Eigen::HouseholderQR<CMatrix> qa(a), qb(b);
        const CMatrix ua = qa.householderQ() * CMatrix::Identity(a.rows(), a.cols());
        const CMatrix ub = qb.householderQ() * CMatrix::Identity(b.rows(), b.cols());
        const Eigen::JacobiSVD<CMatrix> svd(ua.adjoint() * ub);
        return std::acos(std::min(1.0, svd.singularValues().minCoeff()));
    }

    CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng)
    {
        std::normal_distribution<double> g(0.0, 1.0);
        CMatrix x(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
                x(i, j) = cplx(g(rng), g(rng));
        return x;
    }

    // Shared 100-trial run of table1.yaml, ALMCI reports kept.
    const harness::AggregateResult &table1_run()
    {
        static const harness::AggregateResult res = [] {
            harness::RunOptions opts;
            opts.keep_reports = true;
            opts.write_files = false;
            return harness::run_experiment(load("table1.yaml"), opts);
        }();
        return res;
    }

    Verdict gradient()
    {
        ExperimentSpec s = load("gradcheck.yaml");
        const harness::GradcheckResult r = harness::run_gradcheck(s, 20, {4, 8}, 10);
        return {r.max_error <= 1e-6, fmt::format("max relative error {:.3e} over 20 scenarios (L in {{4, 8}})", r.max_error)};
    }

    Verdict feasibility()
    {
        const harness::AggregateResult &res = table1_run();
        const ExperimentSpec spec = load("table1.yaml");
        const std::vector<SweepPoint> pts = spec.sweep_points();
        double worst_col = 0.0, worst_power = -1e300, worst_rel_violation = 0.0;
        int checked = 0, infeasible = 0;
        for (std::size_t i = 0; i < res.trials.size(); ++i)
        {
            if (!res.reports[i])
                continue;
            const alm::SolveReport &r = *res.reports[i];
            const double p_max = pts[static_cast<std::size_t>(res.trials[i].point)].p_max;
            worst_col = std::max(worst_col, r.max_column_deviation);
            worst_power = std::max(worst_power, r.max_ap_power - p_max);
            ++checked;
            if (r.status == alm::SolveStatus::Infeasible)
            {
                ++infeasible;
                continue;
            }
            for (int n = 0; n < r.final_constraints.size(); ++n)
                worst_rel_violation =
                    std::max(worst_rel_violation, r.final_constraints[n] / spec.scenario.sensing_thresholds[n]);
        }
        const bool pass = checked > 0 && worst_col <= 1e-12 && worst_power <= 1e-9 && worst_rel_violation <= 1e-4;
        return {pass, fmt::format("{} ALMCI runs ({} flagged infeasible): max column deviation {:.2e}, max per-AP "
                                  "power excess {:.2e} W, max relative sensing violation {:.2e}",
                                  checked, infeasible, worst_col, worst_power, worst_rel_violation)};
    }

    Verdict dual_equivalence()
    {
        Rng rng(20240);
        std::uniform_int_distribution<int> L(1, 16), K(1, 4), M(1, 3);
        std::uniform_real_distribution<double> pdbm(10.0, 40.0), frac(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i)
        {
            ScenarioConfig c;
            c.num_aps = M(rng);
            c.num_antennas = L(rng);
            c.num_users = K(rng);
            c.num_targets = 0;
            c.noise_power = dbm_to_watts(-80.0);
            c.p_max = dbm_to_watts(pdbm(rng));
            for (int m = 0; m < c.num_aps; ++m)
                c.ap_positions.push_back({10.0 + 70.0 * m, 10.0 + 70.0 * m});
            const ChannelSet ch = draw_channels(c, rng);
            CMatrix v = random_matrix(c.num_antennas * c.num_users, c.num_aps, rng);
            for (int m = 0; m < c.num_aps; ++m)
                v.col(m) *= std::sqrt(c.p_max * frac(rng)) / v.col(m).norm();
            const BeamMatrix beam(v, c.num_antennas, c.num_users);
            const RVector gamma = sinr_all(beam, ch, c.noise_power, c.p_max);
            const double rate = sum_rate(beam, ch, c.noise_power, c.p_max);
            const double dual = fp::dual_objective(beam, gamma, ch, c.noise_power, c.p_max);
            worst = std::max(worst, std::abs(dual - rate) / (1.0 + std::abs(rate)));
        }
        return {worst <= 1e-10, fmt::format("worst |dual - sum rate| / (1 + |sum rate|) = {:.2e} over 1000 pairs", worst)};
    }

    Verdict monotonicity()
    {
        const harness::AggregateResult &res = table1_run();
        const SolverOptions o = load("table1.yaml").scenario.solver;
        long rcg_bad = 0, rho_bad = 0, eps_bad = 0, lambda_bad = 0, runs = 0, records = 0;
        for (const auto &rep : res.reports)
        {
            if (!rep)
                continue;
            for (const auto &vals : rep->rcg_values)
            {
                ++runs;
                for (std::size_t i = 1; i < vals.size(); ++i)
                    rcg_bad += vals[i] > vals[i - 1];
            }
            const auto &alm = rep->alm;
            for (std::size_t i = 0; i < alm.size(); ++i)
            {
                ++records;
                const bool new_outer = i == 0 || alm[i].outer != alm[i - 1].outer;
                if (i > 0 && (!new_outer || !o.reset_alm_per_outer))
                    rho_bad += alm[i].rho < alm[i - 1].rho;
                const double expected = alm[i].index == 0 ? o.eps_init : std::max(o.eps_min, o.eps_shrink * alm[i - 1].eps);
                eps_bad += alm[i].eps != expected;
                lambda_bad += alm[i].lambda.size() > 0 &&
                              (alm[i].lambda.minCoeff() < o.lambda_min || alm[i].lambda.maxCoeff() > o.lambda_max);
            }
        }
        const long total = rcg_bad + rho_bad + eps_bad + lambda_bad;
        return {total == 0 && runs > 0,
                fmt::format("{} RCG runs, {} ALM iterations: L_rho increases {}, rho decreases {}, eps schedule "
                            "mismatches {}, lambda out of bounds {}",
                            runs, records, rcg_bad, rho_bad, eps_bad, lambda_bad)};
    }

    Verdict oracle()
    {
        const harness::OracleComparison r = harness::run_oracle_comparison(load("oracle_tiny.yaml"), 20);
        int bad = 0, no_oracle = 0;
        for (const auto &row : r.rows)
        {
            if (!row.oracle_found)
            {
                ++no_oracle;
                continue;
            }
            if (!row.almci_feasible || row.almci_rate < 0.98 * row.oracle_rate)
                ++bad;
        }
        return {bad == 0 && no_oracle < static_cast<int>(r.rows.size()),
                fmt::format("{} drops, {} below oracle - 2%, {} without a feasible grid point, worst gap {:+.2e}",
                            r.rows.size(), bad, no_oracle, r.worst_gap)};
    }

    Verdict closed_form()
    {
        ExperimentSpec s = load("single_link.yaml");
        s.scenario.num_targets = 0;
        s.scenario.sensing_thresholds.clear();
        double worst = 0.0;
        for (int t = 0; t < 50; ++t)
        {
            ScenarioConfig c = s.scenario;
            c.rng_seed = s.scenario.rng_seed ^ static_cast<std::uint64_t>(t);
            Rng rng(c.rng_seed);
            const ChannelSet ch = draw_channels(c, rng);
            const double exact = std::log2(1.0 + c.p_max * ch.h[0].col(0).squaredNorm() / c.noise_power);
            const alm::SolveResult r = alm::solve(c, ch);
            worst = std::max(worst, std::abs(r.report.final_sum_rate - exact) / exact);
        }
        return {worst <= 1e-3, fmt::format("worst relative gap to log2(1 + p_max |h|^2 / sigma^2) over 50 drops: {:.2e}", worst)};
    }

    Verdict reference_means()
    {
        const harness::AggregateResult &res = table1_run();
        // (L, p_max) = (8, 25), (8, 30), (16, 25), (16, 30) dBm
        const double reference[] = {26.72, 28.90, 30.05, 32.17};
        std::string detail;
        bool pass = res.points.size() == 4;
        std::vector<double> means;
        for (std::size_t i = 0; i < res.points.size() && i < 4; ++i)
        {
            const double m = res.points[i].find(Algorithm::ALMCI)->mean_sum_rate;
            means.push_back(m);
            const double dev = (m - reference[i]) / reference[i];
            pass = pass && std::abs(dev) <= 0.2;
            detail += fmt::format("L={} {:.0f} dBm: {:.2f} ({:+.1f}%); ", res.points[i].point.num_antennas,
                                  watts_to_dbm(res.points[i].point.p_max), m, 100 * dev);
        }
        const bool ordered = means.size() == 4 && means[0] < means[1] && means[2] < means[3] && means[0] < means[2] &&
                             means[1] < means[3];
        return {pass && ordered, detail + (ordered ? "increasing in L and p_max" : "NOT increasing in both axes")};
    }

    Verdict loose_baselines()
    {
        harness::RunOptions opts;
        opts.write_files = false;
        const harness::AggregateResult res = harness::run_experiment(load("loose_sensing.yaml"), opts);
        bool pass = true;
        std::string detail;
        for (const auto &p : res.points)
        {
            const double a = p.find(Algorithm::ALMCI)->mean_sum_rate;
            const double z = p.find(Algorithm::ZF)->mean_sum_rate;
            const double m = p.find(Algorithm::MMSE)->mean_sum_rate;
            pass = pass && a >= z && a >= m;
            detail += fmt::format("L={} {:.0f} dBm: ALMCI {:.2f} ZF {:.2f} MMSE {:.2f}; ", p.point.num_antennas,
                                  watts_to_dbm(p.point.p_max), a, z, m);
        }
        return {pass, detail};
    }

    Verdict outer_iterations()
    {
        const harness::AggregateResult &res = table1_run();
        std::vector<double> all;
        std::string detail;
        bool pass = true;
        for (std::size_t i = 0; i < res.points.size(); ++i)
        {
            const double med = res.points[i].find(Algorithm::ALMCI)->median_outer_iterations;
            pass = pass && med <= 6.0;
            detail += fmt::format("point {} median {:.1f}; ", i, med);
        }
        for (const auto &t : res.trials)
            if (t.algorithm == Algorithm::ALMCI)
                all.push_back(t.outer_iterations);
        return {pass, detail + fmt::format("overall median {:.1f} (required <= 6)", median(all))};
    }

    Verdict zf_property()
    {
        ExperimentSpec s = load("table1.yaml");
        double worst_leak = 0.0, worst_angle = 0.0;
        int instances = 0;
        for (int L : {2, 4, 8, 16})
            for (int t = 0; t < 50; ++t)
            {
                ScenarioConfig c = s.scenario;
                c.num_antennas = L;
                c.rng_seed = 1000 + t;
                Rng rng(c.rng_seed);
                const ChannelSet ch = draw_channels(c, rng);
                const BeamMatrix zf = baselines::zf_beamformer(ch, c.p_max);
                for (int m = 0; m < c.num_aps; ++m)
                {
                    const double tiny = 1e-15 * ch.h[m].squaredNorm();
                    const BeamMatrix mm = baselines::mmse_beamformer(ch, tiny, c.p_max);
                    for (int k = 0; k < c.num_users; ++k)
                    {
                        worst_angle = std::max(worst_angle, subspace_angle(mm.block(m, k), zf.block(m, k)));
                        for (int i = 0; i < c.num_users; ++i)
                            if (i != k)
                            {
                                const CVector vi = zf.block(m, i);
                                worst_leak = std::max(worst_leak, std::abs(ch.h[m].col(k).dot(vi)) /
                                                                      (ch.h[m].col(k).norm() * vi.norm()));
                            }
                    }
                }
                ++instances;
            }
        return {worst_leak <= 1e-10 && worst_angle < 1e-4,
                fmt::format("{} instances: worst relative ZF leakage {:.2e}, worst MMSE/ZF subspace angle {:.2e} rad",
                            instances, worst_leak, worst_angle)};
    }

    // Gains [dBm] read back from an emitted beampattern CSV, keyed by integer angle.
    std::map<int, std::vector<double>> read_csv(const std::string &csv)
    {
        std::map<int, std::vector<double>> rows;
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line))
        {
            std::istringstream ls(line);
            std::string cell;
            std::getline(ls, cell, ',');
            const int angle = static_cast<int>(std::lround(std::stod(cell)));
            while (std::getline(ls, cell, ','))
                rows[angle].push_back(std::stod(cell));
        }
        return rows;
    }

    Verdict beampattern_contract()
    {
        const ExperimentSpec s = load("beampattern.yaml");
        const double p_max = s.scenario.p_max;
        const auto &angles = s.scenario.target_angles_deg;
        const double floor_dbm = watts_to_dbm(s.scenario.sensing_thresholds[0]) - 0.1;
        int almci_seeds_ok = 0, almci_joint_ok = 0, zf_seed_below = 0, mmse_seed_below = 0;
        double almci_worst = 1e300;
        for (int t = 0; t < s.num_trials; ++t)
        {
            auto per_ap_min = [&](Algorithm a, double &joint_min) {
                const BeamMatrix beam = harness::design_beam(s, a, 0, t);
                const auto rows = read_csv(harness::beampattern_csv(harness::beampattern(beam, p_max, s.angle_step)));
                double lowest = 1e300;
                joint_min = 1e300;
                for (std::size_t n = 0; n < angles[0].size(); ++n)
                {
                    double joint_w = 0.0;
                    for (std::size_t m = 0; m < angles.size(); ++m)
                    {
                        const double g = rows.at(static_cast<int>(std::lround(angles[m][n])))[m];
                        lowest = std::min(lowest, g);
                        joint_w += dbm_to_watts(g);
                    }
                    joint_min = std::min(joint_min, watts_to_dbm(joint_w));
                }
                return lowest;
            };
            double joint = 0.0, unused = 0.0;
            const double a = per_ap_min(Algorithm::ALMCI, joint);
            almci_worst = std::min(almci_worst, a);
            almci_seeds_ok += a >= floor_dbm;
            almci_joint_ok += joint >= floor_dbm;
            zf_seed_below += per_ap_min(Algorithm::ZF, unused) < floor_dbm;
            mmse_seed_below += per_ap_min(Algorithm::MMSE, unused) < floor_dbm;
        }
        const bool pass = almci_seeds_ok == s.num_trials && zf_seed_below >= 1 && mmse_seed_below >= 1;
        return {pass, fmt::format("ALMCI per-AP CSV gain >= {:.1f} dBm at all eight angles on {}/{} seeds (worst {:.2f} "
                                  "dBm); summed over APs at each target on {}/{} seeds; ZF below on {} seeds, MMSE "
                                  "below on {} seeds",
                                  floor_dbm, almci_seeds_ok, s.num_trials, almci_worst, almci_joint_ok, s.num_trials,
                                  zf_seed_below, mmse_seed_below)};
    }

    Verdict determinism()
    {
        const fs::path root = fs::temp_directory_path() / "cfisac_acceptance_determinism";
        int configs = 0, files = 0, mismatched = 0;
        std::string which;
        for (const auto &entry : fs::directory_iterator(config_dir))
        {
            if (entry.path().extension() != ".yaml")
                continue;
            ++configs;
            ExperimentSpec s = parse_config(entry.path().string());
            s.num_trials = std::min(s.num_trials, 2);
            std::vector<fs::path> dirs;
            for (const char *run : {"a", "b"})
            {
                const fs::path d = root / entry.path().stem() / run;
                fs::remove_all(d);
                s.output_dir = d.string();
                (void)harness::run_experiment(s);
                dirs.push_back(d);
            }
            for (const auto &f : fs::directory_iterator(dirs[0]))
            {
                const std::string ext = f.path().extension().string();
                if (ext != ".csv" && ext != ".json")
                    continue;
                ++files;
                auto slurp = [](const fs::path &p) {
                    std::ifstream in(p, std::ios::binary);
                    return std::string(std::istreambuf_iterator<char>(in), {});
                };
                if (slurp(f.path()) != slurp(dirs[1] / f.path().filename()))
                {
                    ++mismatched;
                    which += " " + (entry.path().stem() / f.path().filename()).string();
                }
            }
        }
        return {mismatched == 0 && files > 0,
                fmt::format("{} configs, {} CSV/JSON artifacts compared, {} differ{}", configs, files, mismatched, which)};
    }
}

int main()
{
    // The environment override would send every run to one place.
    ::unsetenv(harness::output_dir_env);

    report("1", "gradient check", gradient);
    report("2", "feasibility invariants", feasibility);
    report("3", "dual objective equals sum rate", dual_equivalence);
    report("4", "monotonicity suite", monotonicity);
    report("5", "grid oracle", oracle);
    report("6", "single-link closed form", closed_form);
    report("7a", "reference means and ordering", reference_means);
    report("7b", "ALMCI vs baselines, loose sensing", loose_baselines);
    report("7c", "median outer iterations", outer_iterations);
    report("8", "ZF / MMSE properties", zf_property);
    report("9", "beampattern contract", beampattern_contract);
    report("10", "determinism", determinism);
    fmt::print("{} criterion line(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
