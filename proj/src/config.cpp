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

#include "cfisac/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>

#include <fmt/core.h>
#include <yaml-cpp/yaml.h>

#include "cfisac/units.hpp"

namespace cfisac
{
    std::string_view to_string(Algorithm a)
    {
        switch (a)
        {
        case Algorithm::ALMCI:
            return "ALMCI";
        case Algorithm::ZF:
            return "ZF";
        case Algorithm::MMSE:
            return "MMSE";
        case Algorithm::ORACLE:
            return "ORACLE";
        }
        return "?";
    }

    std::string_view to_string(Emit e)
    {
        switch (e)
        {
        case Emit::SummaryJson:
            return "summary-json";
        case Emit::TrialsCsv:
            return "trials-csv";
        case Emit::BeampatternCsv:
            return "beampattern-csv";
        case Emit::SurfaceCsv:
            return "surface-csv";
        case Emit::ReportText:
            return "report-text";
        }
        return "?";
    }

    std::string_view to_string(SweepAxis a)
    {
        switch (a)
        {
        case SweepAxis::NumAntennas:
            return "num_antennas";
        case SweepAxis::PMax:
            return "p_max";
        case SweepAxis::NumUsers:
            return "num_users";
        }
        return "?";
    }

    namespace
    {
        std::string upper(std::string_view s)
        {
            std::string out(s);
            for (char &c : out)
                c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return out;
        }

        std::string_view trim(std::string_view s)
        {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                s.remove_prefix(1);
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.remove_suffix(1);
            return s;
        }

        // Splits "<number> <unit>" and parses the number (inf allowed).
        std::pair<double, std::string> number_and_unit(std::string_view text)
        {
            text = trim(text);
            std::size_t cut = 0;
            while (cut < text.size() && !std::isspace(static_cast<unsigned char>(text[cut])))
                ++cut;
            std::string_view num = text.substr(0, cut);
            std::string unit(trim(text.substr(cut)));

            // Units written without a space: "30dBm"
            if (unit.empty())
            {
                std::size_t k = num.size();
                while (k > 0 && std::isalpha(static_cast<unsigned char>(num[k - 1])))
                    --k;
                const std::string_view tail = num.substr(k);
                if (!tail.empty() && upper(tail) != "INF")
                {
                    unit = std::string(tail);
                    num = num.substr(0, k);
                }
            }

            if (!num.empty() && num.front() == '+')
                num.remove_prefix(1);
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
            if (num.empty() || ec != std::errc() || ptr != num.data() + num.size())
                throw ConfigError(fmt::format("cannot read a number from '{}'", text));
            return {value, unit};
        }
    }

    Algorithm parse_algorithm(std::string_view name)
    {
        const std::string u = upper(trim(name));
        if (u == "ALMCI")
            return Algorithm::ALMCI;
        if (u == "ZF")
            return Algorithm::ZF;
        if (u == "MMSE")
            return Algorithm::MMSE;
        if (u == "ORACLE")
            return Algorithm::ORACLE;
        throw ConfigError(fmt::format("unknown algorithm '{}' (expected ALMCI, ZF, MMSE or ORACLE)", name));
    }

    ConfigError::ConfigError(const std::string &msg, int line)
        : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, msg) : msg), line_(line)
    {
    }

    double parse_power(std::string_view text)
    {
        const auto [value, unit] = number_and_unit(text);
        const std::string u = upper(unit);
        double watts = 0.0;
        if (u == "DBM")
            watts = std::isinf(value) && value < 0 ? 0.0 : dbm_to_watts(value);
        else if (u.empty() || u == "W")
            watts = value;
        else if (u == "MW")
            watts = 1e-3 * value;
        else
            throw ConfigError(fmt::format("unknown power unit '{}' in '{}'", unit, text));
        if (!(watts >= 0.0) || !std::isfinite(watts))
            throw ConfigError(fmt::format("power '{}' must be finite and non-negative", text));
        return watts;
    }

    double parse_gain(std::string_view text)
    {
        const auto [value, unit] = number_and_unit(text);
        const std::string u = upper(unit);
        double linear = 0.0;
        if (u == "DB")
            linear = db_to_linear(value);
        else if (u.empty())
            linear = value;
        else
            throw ConfigError(fmt::format("unknown gain unit '{}' in '{}'", unit, text));
        if (!(linear > 0.0) || !std::isfinite(linear))
            throw ConfigError(fmt::format("gain '{}' must be finite and positive", text));
        return linear;
    }

    bool ExperimentSpec::wants(Emit e) const { return std::find(emit.begin(), emit.end(), e) != emit.end(); }

    bool ExperimentSpec::has(Algorithm a) const
    {
        return std::find(algorithms.begin(), algorithms.end(), a) != algorithms.end();
    }

    std::vector<SweepPoint> ExperimentSpec::sweep_points() const
    {
        std::vector<SweepPoint> points{{scenario.num_antennas, scenario.p_max, scenario.num_users}};
        for (const SweepDimension &dim : sweep)
        {
            std::vector<SweepPoint> next;
            for (const SweepPoint &base : points)
                for (double v : dim.values)
                {
                    SweepPoint p = base;
                    switch (dim.axis)
                    {
                    case SweepAxis::NumAntennas:
                        p.num_antennas = static_cast<int>(v);
                        break;
                    case SweepAxis::PMax:
                        p.p_max = v;
                        break;
                    case SweepAxis::NumUsers:
                        p.num_users = static_cast<int>(v);
                        break;
                    }
                    next.push_back(p);
                }
            points = std::move(next);
        }
        return points;
    }

    ScenarioConfig ExperimentSpec::scenario_at(const SweepPoint &p) const
    {
        ScenarioConfig c = scenario;
        c.num_antennas = p.num_antennas;
        c.p_max = p.p_max;
        c.num_users = p.num_users;
        return c;
    }

    void ExperimentSpec::validate() const
    {
        if (num_trials < 1)
            throw ConfigError("experiment.trials must be >= 1");
        if (jobs < 1)
            throw ConfigError("experiment.jobs must be >= 1");
        if (algorithms.empty())
            throw ConfigError("experiment.algorithms must not be empty");
        if (std::set<Algorithm>(algorithms.begin(), algorithms.end()).size() != algorithms.size())
            throw ConfigError("experiment.algorithms lists an algorithm twice");
        if (!(angle_step > 0.0) || std::abs(180.0 / angle_step - std::round(180.0 / angle_step)) > 1e-9)
            throw ConfigError(fmt::format("angle_step {} does not divide 180 degrees evenly", angle_step));
        if (oracle_resolution < 16)
            throw ConfigError("experiment.oracle_resolution must be >= 16");
        if (!(surface_span > 0.0) || surface_points < 2)
            throw ConfigError("surface needs a positive span and at least two points");

        std::set<SweepAxis> seen;
        for (const SweepDimension &dim : sweep)
        {
            if (!seen.insert(dim.axis).second)
                throw ConfigError(fmt::format("sweep axis '{}' given twice", to_string(dim.axis)));
            if (dim.values.empty())
                throw ConfigError(fmt::format("sweep axis '{}' has no values", to_string(dim.axis)));
            for (std::size_t i = 1; i < dim.values.size(); ++i)
                if (!(dim.values[i] > dim.values[i - 1]))
                    throw ConfigError(fmt::format("sweep values for '{}' must be strictly increasing", to_string(dim.axis)));
            if (dim.axis != SweepAxis::PMax)
                for (double v : dim.values)
                    if (v < 1.0 || v != std::floor(v))
                        throw ConfigError(fmt::format("sweep values for '{}' must be positive integers", to_string(dim.axis)));
        }

        for (const SweepPoint &p : sweep_points())
        {
            try
            {
                scenario_at(p).validate();
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(e.what());
            }
            if (has(Algorithm::ORACLE) && 2 * p.num_antennas * p.num_users * scenario.num_aps > 6)
                throw ConfigError(fmt::format("ORACLE needs 2*L*K*M <= 6, got L={} K={} M={}", p.num_antennas,
                                              p.num_users, scenario.num_aps));
        }
    }

    namespace
    {
        int line_of(const YAML::Node &n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

        // A mapping whose keys are consumed one by one; leftovers are unknown keys.
        class Section
        {
        public:
            Section(YAML::Node node, std::string path, std::vector<std::string> &defaults)
                : node_(std::move(node)), path_(std::move(path)), defaults_(defaults)
            {
                if (node_ && !node_.IsNull() && !node_.IsMap())
                    throw ConfigError(fmt::format("'{}' must be a mapping", path_), line_of(node_));
            }

            // Runs `read` on the key if present; records a default otherwise.
            void field(const std::string &key, const std::function<void(const YAML::Node &)> &read)
            {
                used_.insert(key);
                const YAML::Node v = lookup(key);
                if (!v || v.IsNull())
                {
                    defaults_.push_back(path_ + "." + key);
                    return;
                }
                read_named(key, v, read);
            }

            void optional(const std::string &key, const std::function<void(const YAML::Node &)> &read)
            {
                used_.insert(key);
                const YAML::Node v = lookup(key);
                if (v && !v.IsNull())
                    read_named(key, v, read);
            }

            // Prefixes reader errors with the dotted key name.
            void read_named(const std::string &key, const YAML::Node &v,
                            const std::function<void(const YAML::Node &)> &read) const
            {
                try
                {
                    read(v);
                }
                catch (const ConfigError &e)
                {
                    std::string msg = e.what();
                    if (e.line() > 0)
                        msg.erase(0, msg.find(": ") + 2);
                    throw ConfigError(fmt::format("{}.{}: {}", path_, key, msg), e.line());
                }
            }

            YAML::Node required(const std::string &key)
            {
                used_.insert(key);
                const YAML::Node v = lookup(key);
                if (!v || v.IsNull())
                    throw ConfigError(fmt::format("missing required field '{}.{}'", path_, key), line_of(node_));
                return v;
            }

            YAML::Node child(const std::string &key)
            {
                used_.insert(key);
                return lookup(key);
            }

            void finish() const
            {
                if (!node_ || !node_.IsMap())
                    return;
                for (const auto &kv : node_)
                {
                    const std::string key = kv.first.as<std::string>();
                    if (!used_.count(key))
                        throw ConfigError(fmt::format("unknown key '{}.{}'", path_, key), line_of(kv.first));
                }
            }

        private:
            YAML::Node lookup(const std::string &key) const
            {
                if (!node_ || !node_.IsMap())
                    return YAML::Node();
                for (const auto &kv : node_)
                    if (kv.first.as<std::string>() == key)
                        return kv.second;
                return YAML::Node();
            }

            YAML::Node node_;
            std::string path_;
            std::vector<std::string> &defaults_;
            std::set<std::string> used_;
        };

        [[noreturn]] void type_error(const YAML::Node &n, const std::string &what)
        {
            throw ConfigError(fmt::format("expected {}", what), line_of(n));
        }

        std::string scalar(const YAML::Node &n, const std::string &what)
        {
            if (!n.IsScalar())
                type_error(n, what);
            return n.Scalar();
        }

        long long as_integer(const YAML::Node &n)
        {
            const std::string s = scalar(n, "an integer");
            long long v = 0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
                type_error(n, fmt::format("an integer, got '{}'", s));
            return v;
        }

        int as_int(const YAML::Node &n)
        {
            const long long v = as_integer(n);
            if (v < -2147483647LL || v > 2147483647LL)
                type_error(n, "an integer in range");
            return static_cast<int>(v);
        }

        double as_real(const YAML::Node &n)
        {
            const std::string s = scalar(n, "a number");
            try
            {
                return n.as<double>();
            }
            catch (const YAML::Exception &)
            {
                type_error(n, fmt::format("a number, got '{}'", s));
            }
        }

        bool as_bool(const YAML::Node &n)
        {
            const std::string s = scalar(n, "a boolean");
            try
            {
                return n.as<bool>();
            }
            catch (const YAML::Exception &)
            {
                type_error(n, fmt::format("a boolean, got '{}'", s));
            }
        }

        std::string as_string(const YAML::Node &n) { return scalar(n, "a string"); }

        template <typename F>
        auto wrap(const YAML::Node &n, F &&f)
        {
            try
            {
                return f(n);
            }
            catch (const ConfigError &e)
            {
                if (e.line() > 0)
                    throw;
                throw ConfigError(e.what(), line_of(n));
            }
        }

        double as_power(const YAML::Node &n)
        {
            return wrap(n, [](const YAML::Node &v) { return parse_power(scalar(v, "a power such as '30 dBm'")); });
        }

        double as_gain(const YAML::Node &n)
        {
            return wrap(n, [](const YAML::Node &v) { return parse_gain(scalar(v, "a gain such as '-30 dB'")); });
        }

        template <typename T, typename F>
        std::vector<T> as_list(const YAML::Node &n, F &&item)
        {
            if (!n.IsSequence())
                type_error(n, "a list");
            std::vector<T> out;
            for (const auto &e : n)
                out.push_back(item(e));
            return out;
        }

        Point2 as_point(const YAML::Node &n)
        {
            if (!n.IsSequence() || n.size() != 2)
                type_error(n, "a coordinate pair [x, y]");
            return {as_real(n[0]), as_real(n[1])};
        }

        void read_scenario(Section &s, ScenarioConfig &c)
        {
            c.num_aps = as_int(s.required("num_aps"));
            c.ap_positions = as_list<Point2>(s.required("ap_positions"), as_point);
            s.field("num_antennas", [&](const YAML::Node &v) { c.num_antennas = as_int(v); });
            s.field("num_users", [&](const YAML::Node &v) { c.num_users = as_int(v); });
            s.field("num_targets", [&](const YAML::Node &v) { c.num_targets = as_int(v); });
            s.field("p_max", [&](const YAML::Node &v) { c.p_max = as_power(v); });
            s.field("noise_power", [&](const YAML::Node &v) { c.noise_power = as_power(v); });

            // One threshold for every target, or an explicit list
            double common = dbm_to_watts(20.0);
            std::vector<double> list;
            s.field("sensing_threshold", [&](const YAML::Node &v) {
                if (v.IsSequence())
                    list = as_list<double>(v, as_power);
                else
                    common = as_power(v);
            });
            c.sensing_thresholds = list.empty() ? std::vector<double>(static_cast<std::size_t>(std::max(0, c.num_targets)), common) : list;

            s.field("pathloss_ref", [&](const YAML::Node &v) { c.pathloss_ref = as_gain(v); });
            s.field("ref_distance", [&](const YAML::Node &v) { c.ref_distance = as_real(v); });
            s.field("pathloss_exponent", [&](const YAML::Node &v) { c.pathloss_exponent = as_real(v); });
            s.field("area", [&](const YAML::Node &v) {
                const Point2 a = as_point(v);
                c.area_width = a.x;
                c.area_height = a.y;
            });
            s.optional("user_positions", [&](const YAML::Node &v) { c.user_positions = as_list<Point2>(v, as_point); });
            s.optional("target_positions",
                       [&](const YAML::Node &v) { c.target_positions = as_list<Point2>(v, as_point); });
            s.optional("target_angles_deg", [&](const YAML::Node &v) {
                c.target_angles_deg = as_list<std::vector<double>>(
                    v, [](const YAML::Node &row) { return as_list<double>(row, as_real); });
            });
        }

        void read_solver(Section &s, SolverOptions &o)
        {
            auto real = [&](const char *key, double &dst) { s.field(key, [&](const YAML::Node &v) { dst = as_real(v); }); };
            auto integer = [&](const char *key, int &dst) { s.field(key, [&](const YAML::Node &v) { dst = as_int(v); }); };
            auto flag = [&](const char *key, bool &dst) { s.field(key, [&](const YAML::Node &v) { dst = as_bool(v); }); };
            real("grad_tol", o.grad_tol);
            real("objective_tol", o.objective_tol);
            real("eps_init", o.eps_init);
            real("eps_min", o.eps_min);
            real("eps_shrink", o.eps_shrink);
            real("rho_init", o.rho_init);
            real("rho_growth", o.rho_growth);
            real("violation_ratio", o.violation_ratio);
            real("min_step_distance", o.min_step_distance);
            real("lambda_min", o.lambda_min);
            real("lambda_max", o.lambda_max);
            real("armijo_c", o.armijo_c);
            real("armijo_shrink", o.armijo_shrink);
            real("alpha_init", o.alpha_init);
            integer("max_backtracks", o.max_backtracks);
            integer("max_rcg_iterations", o.max_rcg_iterations);
            integer("max_alm_iterations", o.max_alm_iterations);
            integer("max_outer_iterations", o.max_outer_iterations);
            real("violation_tol", o.violation_tol);
            real("infeasible_rho_growth", o.infeasible_rho_growth);
            flag("reset_alm_per_outer", o.reset_alm_per_outer);
            flag("record_history", o.record_history);
        }

        Emit parse_emit(const YAML::Node &n)
        {
            const std::string s = as_string(n);
            for (Emit e : {Emit::SummaryJson, Emit::TrialsCsv, Emit::BeampatternCsv, Emit::SurfaceCsv, Emit::ReportText})
                if (s == to_string(e))
                    return e;
            throw ConfigError(fmt::format("unknown emit target '{}'", s), line_of(n));
        }

        void read_sweep(const YAML::Node &n, ExperimentSpec &spec)
        {
            if (!n.IsMap())
                type_error(n, "a mapping of axis -> values");
            for (const auto &kv : n)
            {
                const std::string key = kv.first.as<std::string>();
                SweepDimension dim;
                if (key == "num_antennas")
                {
                    dim.axis = SweepAxis::NumAntennas;
                    dim.values = as_list<double>(kv.second, [](const YAML::Node &v) { return double(as_int(v)); });
                }
                else if (key == "num_users")
                {
                    dim.axis = SweepAxis::NumUsers;
                    dim.values = as_list<double>(kv.second, [](const YAML::Node &v) { return double(as_int(v)); });
                }
                else if (key == "p_max")
                {
                    dim.axis = SweepAxis::PMax;
                    dim.values = as_list<double>(kv.second, as_power);
                }
                else
                    throw ConfigError(fmt::format("unknown sweep axis '{}' (expected num_antennas, p_max or num_users)", key),
                                      line_of(kv.first));
                spec.sweep.push_back(std::move(dim));
            }
        }

        ExperimentSpec from_root(const YAML::Node &root)
        {
            if (!root.IsMap())
                throw ConfigError("top level of the config must be a mapping", line_of(root));

            ExperimentSpec spec;
            std::vector<std::string> &defaults = spec.defaults_applied;
            Section top(root, "", defaults);

            const YAML::Node scen = top.required("scenario");
            Section s(scen, "scenario", defaults);
            read_scenario(s, spec.scenario);
            s.finish();

            Section sol(top.child("solver"), "solver", defaults);
            read_solver(sol, spec.scenario.solver);
            sol.finish();

            Section ex(top.child("experiment"), "experiment", defaults);
            ex.field("seed", [&](const YAML::Node &v) {
                const long long seed = as_integer(v);
                if (seed < 0)
                    type_error(v, "a non-negative seed");
                spec.scenario.rng_seed = static_cast<std::uint64_t>(seed);
            });
            ex.field("trials", [&](const YAML::Node &v) { spec.num_trials = as_int(v); });
            ex.field("algorithms", [&](const YAML::Node &v) {
                spec.algorithms = as_list<Algorithm>(
                    v, [](const YAML::Node &a) { return wrap(a, [](const YAML::Node &x) { return parse_algorithm(as_string(x)); }); });
            });
            ex.optional("sweep", [&](const YAML::Node &v) { read_sweep(v, spec); });
            ex.field("output_dir", [&](const YAML::Node &v) { spec.output_dir = as_string(v); });
            ex.field("emit", [&](const YAML::Node &v) { spec.emit = as_list<Emit>(v, parse_emit); });
            ex.field("jobs", [&](const YAML::Node &v) { spec.jobs = as_int(v); });
            ex.field("angle_step", [&](const YAML::Node &v) { spec.angle_step = as_real(v); });
            ex.field("oracle_resolution", [&](const YAML::Node &v) { spec.oracle_resolution = as_int(v); });
            ex.field("surface_span", [&](const YAML::Node &v) { spec.surface_span = as_real(v); });
            ex.field("surface_points", [&](const YAML::Node &v) { spec.surface_points = as_int(v); });
            ex.finish();

            // Dotted names without the leading '.' of the top-level section
            for (std::string &d : defaults)
                if (!d.empty() && d.front() == '.')
                    d.erase(0, 1);

            top.finish();
            spec.validate();
            return spec;
        }
    }

    ExperimentSpec parse_config_string(const std::string &yaml)
    {
        YAML::Node root;
        try
        {
            root = YAML::Load(yaml);
        }
        catch (const YAML::Exception &e)
        {
            throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
        }
        return from_root(root);
    }

    ExperimentSpec parse_config(const std::string &path)
    {
        YAML::Node root;
        try
        {
            root = YAML::LoadFile(path);
        }
        catch (const YAML::BadFile &)
        {
            throw ConfigError(fmt::format("cannot open config file '{}'", path));
        }
        catch (const YAML::Exception &e)
        {
            throw ConfigError(fmt::format("{}: {}", path, e.msg), e.mark.line >= 0 ? e.mark.line + 1 : 0);
        }
        return from_root(root);
    }
}
