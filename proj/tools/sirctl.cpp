/*
 * Copyright (C) 2026 The sirctl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "sirctl/csv.hpp"
#include "sirctl/errors.hpp"
#include "sirctl/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sirctl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct CommonOptions {
    std::string config_path;
    std::string preset_name;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> snr_db;
    std::optional<double> horizon;
    std::optional<double> step;
    std::optional<double> u_max;
    std::optional<double> i_bar;
    std::optional<double> beta_mult;
    std::optional<double> gamma_mult;
    std::optional<std::size_t> measure_every;
    std::vector<int> alphas;
    unsigned jobs = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_preset)
{
    cmd->add_option("-c,--config", o.config_path, "scenario JSON file")->check(CLI::ExistingFile);
    if (with_preset) {
        cmd->add_option("-p,--preset", o.preset_name, "start from a named preset");
    }
    cmd->add_option("-o,--out", o.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", o.seed, "base RNG seed");
    cmd->add_option("--snr", o.snr_db, "measurement noise SNR in dB (switches noise to snr_db)");
    cmd->add_option("--horizon", o.horizon, "integration horizon");
    cmd->add_option("--step", o.step, "integration step");
    cmd->add_option("--u-max", o.u_max, "maximum isolation rate");
    cmd->add_option("--i-bar", o.i_bar, "infection threshold");
    cmd->add_option("--beta-mult", o.beta_mult, "robust beta multiplier");
    cmd->add_option("--gamma-mult", o.gamma_mult, "robust gamma multiplier");
    cmd->add_option("--measure-every", o.measure_every, "integration steps per measurement");
    cmd->add_option("--alpha", o.alphas, "alpha values for the h-sweep");
    cmd->add_option("-j,--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

ScenarioConfig resolve_config(const CommonOptions& o, const std::string& fallback_preset)
{
    ScenarioConfig c;
    if (!o.config_path.empty()) {
        c = load_scenario(o.config_path);
    } else if (!o.preset_name.empty()) {
        c = preset(o.preset_name);
    } else if (!fallback_preset.empty()) {
        c = preset(fallback_preset);
    }
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (o.snr_db) {
        c.noise.kind = NoiseKind::SnrDb;
        c.noise.snr_db = *o.snr_db;
    }
    if (o.horizon) {
        c.integrator.horizon = *o.horizon;
    }
    if (o.step) {
        c.integrator.step = *o.step;
    }
    if (o.u_max) {
        c.u_max = *o.u_max;
    }
    if (o.i_bar) {
        c.i_bar = *o.i_bar;
    }
    if (o.beta_mult) {
        c.bounds.beta_mult = *o.beta_mult;
    }
    if (o.gamma_mult) {
        c.bounds.gamma_mult = *o.gamma_mult;
    }
    if (o.measure_every) {
        c.measure_every = *o.measure_every;
    }
    if (!o.alphas.empty()) {
        c.estimation.alpha_list = o.alphas;
    }
    c.validate();
    return c;
}

void write_config(const ScenarioConfig& c, const fs::path& dir)
{
    fs::create_directories(dir);
    nlohmann::json j = c;
    write_text_file(dir / "config.json", j.dump(2) + "\n");
}

void print_summary(const RunArtifacts& art)
{
    for (const auto& run : art.runs) {
        const auto& f = run.feasibility;
        std::cout << to_string(run.trace.kind) << ": cost=" << format_number(total_cost(run.trace).value)
                  << " max_I=" << format_number(f.max_infection_attained)
                  << " t_b=" << format_number(run.trace.times.t_b.value_or(INFINITY))
                  << " t_h=" << format_number(run.trace.times.t_h.value_or(INFINITY))
                  << (f.feasible ? " feasible" : " INFEASIBLE") << (f.saturated() ? " saturated" : "") << '\n';
        if (!total_cost(run.trace).converged) {
            std::cerr << "warning: " << to_string(run.trace.kind)
                      << " rate is non-zero at the horizon end; cost is truncated\n";
        }
    }
}

int do_simulate(const ScenarioConfig& c, const fs::path& out)
{
    const RunArtifacts art = run_scenario(c);
    write_config(c, out);
    emit_csv(art, out);
    print_summary(art);
    return art.robust_feasible() ? kExitOk : kExitInfeasible;
}

int do_estimate(const ScenarioConfig& c, const fs::path& out)
{
    const auto rows = sweep_h(c);
    write_config(c, out);
    std::ostringstream body;
    write_estimates_csv(body, rows);
    write_text_file(out / "estimates.csv", body.str());
    std::size_t contained = 0;
    for (const auto& r : rows) {
        contained += r.contained ? 1 : 0;
    }
    std::cout << rows.size() << " step sizes, bound holds at " << contained << '\n';
    return kExitOk;
}

int do_gap(const ScenarioConfig& c, const fs::path& out, unsigned jobs)
{
    const auto rows = gap_table(c, jobs);
    write_config(c, out);
    std::ostringstream body;
    write_gaps_csv(body, rows, c.params);
    write_text_file(out / "gaps.csv", body.str());
    for (const auto& r : rows) {
        std::cout << "eps=" << format_number(r.epsilon) << " gap=" << format_number(r.robust.gap_direct.value_or(NAN))
                  << (r.robust.cost_converged ? "" : " (unconverged)") << '\n';
    }
    return kExitOk;
}

int do_reproduce(const std::string& name, const CommonOptions& o)
{
    CommonOptions opts = o;
    opts.preset_name = name;
    const ScenarioConfig c = resolve_config(opts, name);
    const fs::path out = o.out_dir;
    if (name == "param-est" || name == "bound-sweep") {
        return do_estimate(c, out);
    }
    if (name == "sir-wave") {
        const Trajectory wave = open_loop(c, c.integrator.horizon);
        fs::create_directories(out / "open_loop");
        std::ostringstream body;
        write_trajectory_csv(body, wave, {});
        write_text_file(out / "open_loop" / "trajectory.csv", body.str());
        return do_simulate(c, out);
    }
    if (name == "fig1") {
        const int rc = do_simulate(c, out);
        do_gap(c, out, o.jobs);
        return rc;
    }
    return do_simulate(c, out);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Threshold-constrained SIR isolation control: simulation, estimation and cost gaps"};
    app.require_subcommand(1);

    CommonOptions sim_opts;
    CommonOptions est_opts;
    CommonOptions gap_opts;
    CommonOptions rep_opts;
    std::string rep_name;

    auto* sim = app.add_subcommand("simulate", "run optimal, robust and misestimated policies");
    add_common(sim, sim_opts, true);
    auto* est = app.add_subcommand("estimate", "parameter estimates and error bounds over the h grid");
    add_common(est, est_opts, true);
    auto* gap = app.add_subcommand("gap", "robust-vs-optimal cost gap over the inflation grid");
    add_common(gap, gap_opts, true);
    auto* rep = app.add_subcommand("reproduce", "run a named preset");
    rep->add_option("preset", rep_name, "preset name")->required()->check(CLI::IsMember(preset_names()));
    add_common(rep, rep_opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*sim) {
            return do_simulate(resolve_config(sim_opts, ""), sim_opts.out_dir);
        }
        if (*est) {
            return do_estimate(resolve_config(est_opts, ""), est_opts.out_dir);
        }
        if (*gap) {
            return do_gap(resolve_config(gap_opts, ""), gap_opts.out_dir, gap_opts.jobs);
        }
        if (*rep) {
            return do_reproduce(rep_name, rep_opts);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}
