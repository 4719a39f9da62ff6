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
#include "sirctl/scenario.hpp"

#include "sirctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <set>

namespace sirctl {

using nlohmann::json;

namespace {

constexpr std::uint64_t kRobustStream = 1;
constexpr std::uint64_t kMisestimatedStream = 2;
constexpr std::uint64_t kEstimationStream = 3;
constexpr std::uint64_t kGapStreamBase = 1000;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!keys.count(item.key())) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

std::string method_name(Method m)
{
    return m == Method::RungeKutta4 ? "rk4" : "euler";
}

Method method_from_name(const std::string& name)
{
    if (name == "rk4") {
        return Method::RungeKutta4;
    }
    if (name == "euler") {
        return Method::ForwardEuler;
    }
    throw ConfigError("integrator.method: expected 'rk4' or 'euler', got '" + name + "'");
}

std::string noise_name(NoiseKind k)
{
    switch (k) {
    case NoiseKind::None:
        return "none";
    case NoiseKind::SnrDb:
        return "snr_db";
    case NoiseKind::ScaledVariance:
        return "scaled_variance";
    }
    return "none";
}

NoiseKind noise_from_name(const std::string& name)
{
    if (name == "none") {
        return NoiseKind::None;
    }
    if (name == "snr_db") {
        return NoiseKind::SnrDb;
    }
    if (name == "scaled_variance") {
        return NoiseKind::ScaledVariance;
    }
    throw ConfigError("noise.kind: expected none, snr_db or scaled_variance, got '" + name + "'");
}

template <typename F>
void as_config_error(const std::string& field, F&& check)
{
    try {
        check();
    } catch (const InvalidArgument& e) {
        throw ConfigError(field + ": " + e.what());
    }
}

std::size_t grid_index(double t, double step)
{
    return static_cast<std::size_t>(std::llround(t / step));
}

/// Open-loop record on the estimation grid, its measured copy and the noise levels used.
struct EstimationRecord {
    Trajectory truth;
    std::vector<MeasuredSample> measured;
    NoiseLevels levels;
};

EstimationRecord make_record(const ScenarioConfig& config)
{
    EstimationRecord rec;
    ScenarioConfig on_grid = config;
    on_grid.integrator.step = config.estimation.h_unit;
    rec.truth = open_loop(on_grid, config.estimation.horizon);
    rec.levels = resolve_noise(config.noise, rec.truth);
    rec.measured = inject_noise(rec.truth, rec.levels, derive_seed(config.seed, kEstimationStream));
    return rec;
}

EstimateRow estimate_row(const ScenarioConfig& config, const EstimationRecord& rec, int alpha,
                         std::optional<ParamEstimate>& estimate)
{
    const EstimationConfig& est = config.estimation;
    EstimateRow row;
    row.alpha = alpha;
    row.h = alpha * est.h_unit;
    const std::size_t i = grid_index(est.t_i, est.h_unit);
    const std::size_t j = grid_index(est.t_j, est.h_unit);
    const auto a = static_cast<std::size_t>(alpha);
    const auto& m = rec.measured;
    const RegressionBatch batch = build_regressor_batch(m[i], m[i + a], m[j], m[j + a], row.h);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        estimate = estimate_params(batch);
    } catch (const SingularRegressors&) {
        row.singular = true;
        row.beta_hat = row.gamma_hat = row.err_norm = row.bound_b = nan;
        estimate.reset();
        return row;
    }
    row.beta_hat = estimate->beta_hat;
    row.gamma_hat = estimate->gamma_hat;
    row.err_norm = std::hypot(row.beta_hat - config.params.beta, row.gamma_hat - config.params.gamma);
    row.lambda_min = gram_min_eigenvalue(batch);

    const EpidemicParams guess = est.prior.value_or(config.params);
    BoundInputs in;
    in.h = row.h;
    in.v_max = rec.levels.v_max();
    in.u_max_local = 0.0;
    in.r = est.r;
    in.lambda_min = row.lambda_min;
    in.x_max = std::sqrt(2.0); // loose bound on ||x|| for fractions
    for (std::size_t base : {i, j}) {
        for (std::size_t k = base; k <= base + a; ++k) {
            const Derivative d = rhs(rec.truth.state(k), config.params, 0.0);
            in.f_max = std::max(in.f_max, std::sqrt(d.ds * d.ds + d.di * d.di + d.dr * d.dr));
        }
    }
    in.zeta = est.zeta.value_or(lipschitz_constant(guess, in.x_max, in.r, in.u_max_local));
    in.c = composite_constant(guess, m[i], m[j], in.v_max, in.u_max_local);
    if (!(in.zeta * in.h < 1.0)) {
        // discretization bound undefined at this step size
        row.bound_b = nan;
        row.contained = false;
        return row;
    }
    row.terms = error_bound_terms(in);
    row.bound_b = row.terms.total();
    row.contained = row.err_norm <= row.bound_b;
    return row;
}

ClosedLoopSetup base_setup(const ScenarioConfig& config, PolicyKind kind)
{
    ClosedLoopSetup setup;
    setup.kind = kind;
    setup.truth = config.params;
    setup.assumed = config.params;
    setup.i_bar = config.i_bar;
    setup.bounds.u_max = config.u_max;
    setup.integrator = config.integrator;
    setup.measure_every = config.measure_every;
    return setup;
}

ClosedLoopRun run_robust(const ScenarioConfig& config, const EpidemicParams& assumed, const NoiseLevels& levels,
                         std::uint64_t stream)
{
    ClosedLoopSetup setup = base_setup(config, PolicyKind::Robust);
    setup.assumed = assumed;
    setup.amplitude = levels.amplitude();
    setup.channel = make_channel(levels, derive_seed(config.seed, stream));
    return simulate_closed_loop(setup, config.init);
}

} // namespace

void EstimationConfig::validate() const
{
    if (!(h_unit > 0.0 && std::isfinite(h_unit))) {
        throw ConfigError("estimation.h_unit must be positive");
    }
    if (!(t_i >= 0.0 && t_j >= 0.0) || t_i == t_j) {
        throw ConfigError("estimation.t_i and t_j must be distinct non-negative times");
    }
    if (alpha_list.empty()) {
        throw ConfigError("estimation.alpha_list must not be empty");
    }
    const int top = *std::max_element(alpha_list.begin(), alpha_list.end());
    if (*std::min_element(alpha_list.begin(), alpha_list.end()) < 1) {
        throw ConfigError("estimation.alpha_list entries must be at least 1");
    }
    if (std::max(t_i, t_j) + top * h_unit > horizon + 1e-9) {
        throw ConfigError("estimation.horizon too short for the largest alpha");
    }
    if (zeta && !(*zeta > 0.0 && std::isfinite(*zeta))) {
        throw ConfigError("estimation.zeta must be positive");
    }
    if (!(r >= 0.0 && std::isfinite(r))) {
        throw ConfigError("estimation.r must be non-negative");
    }
    if (prior) {
        as_config_error("estimation.prior", [&] { prior->validate(); });
    }
}

void ScenarioConfig::validate() const
{
    as_config_error("params", [&] { params.validate(); });
    as_config_error("init", [&] { init.validate(); });
    as_config_error("integrator", [&] { integrator.validate(); });
    as_config_error("noise", [&] { noise.validate(); });
    if (!(i_bar > 0.0 && i_bar < 1.0)) {
        throw ConfigError("i_bar must lie in (0, 1)");
    }
    if (!(u_max > 0.0 && std::isfinite(u_max))) {
        throw ConfigError("u_max must be positive");
    }
    if (measure_every == 0) {
        throw ConfigError("measure_every must be at least 1");
    }
    if (!(bounds.beta_mult > 0.0 && bounds.gamma_mult > 0.0)) {
        throw ConfigError("bounds multipliers must be positive");
    }
    if (bounds.mode == BoundsConfig::Mode::Estimated && !(bounds.alpha >= 1.0 && bounds.alpha == std::floor(bounds.alpha))) {
        throw ConfigError("bounds.alpha must be a positive integer");
    }
    if (!(mis_beta_mult > 0.0 && mis_gamma_mult > 0.0)) {
        throw ConfigError("misestimated multipliers must be positive");
    }
    for (double eps : gap_grid) {
        if (!(eps >= 0.0 && eps < 1.0)) {
            throw ConfigError("gap_grid entries must lie in [0, 1)");
        }
    }
    estimation.validate();
    if (bounds.mode == BoundsConfig::Mode::Estimated &&
        std::max(estimation.t_i, estimation.t_j) + bounds.alpha * estimation.h_unit > estimation.horizon + 1e-9) {
        throw ConfigError("estimation.horizon too short for bounds.alpha");
    }
}

void to_json(json& j, const ScenarioConfig& c)
{
    j = json::object();
    j["name"] = c.name;
    j["params"] = {{"beta", c.params.beta}, {"gamma", c.params.gamma}};
    j["init"] = {{"t", c.init.t}, {"S", c.init.s}, {"I", c.init.i}, {"R", c.init.r}};
    j["i_bar"] = c.i_bar;
    j["u_max"] = c.u_max;
    j["noise"] = {{"kind", noise_name(c.noise.kind)}, {"snr_db", c.noise.snr_db}, {"divisor", c.noise.divisor}};
    j["bounds"] = {{"mode", c.bounds.mode == BoundsConfig::Mode::Estimated ? "estimated" : "multipliers"},
                   {"beta_mult", c.bounds.beta_mult},
                   {"gamma_mult", c.bounds.gamma_mult},
                   {"alpha", c.bounds.alpha}};
    j["misestimated"] = {
        {"enabled", c.include_misestimated}, {"beta_mult", c.mis_beta_mult}, {"gamma_mult", c.mis_gamma_mult}};
    j["integrator"] = {
        {"method", method_name(c.integrator.method)}, {"step", c.integrator.step}, {"horizon", c.integrator.horizon}};
    j["measure_every"] = c.measure_every;
    j["seed"] = c.seed;
    json est = {{"t_i", c.estimation.t_i},
                {"t_j", c.estimation.t_j},
                {"h_unit", c.estimation.h_unit},
                {"alpha_list", c.estimation.alpha_list},
                {"r", c.estimation.r},
                {"horizon", c.estimation.horizon}};
    if (c.estimation.zeta) {
        est["zeta"] = *c.estimation.zeta;
    }
    if (c.estimation.prior) {
        est["prior"] = {{"beta", c.estimation.prior->beta}, {"gamma", c.estimation.prior->gamma}};
    }
    j["estimation"] = est;
    j["gap_grid"] = c.gap_grid;
}

ScenarioConfig scenario_from_json(const json& j)
{
    ScenarioConfig c;
    reject_unknown(j,
                   {"name", "params", "init", "i_bar", "u_max", "noise", "bounds", "misestimated", "integrator",
                    "measure_every", "seed", "estimation", "gap_grid"},
                   "config");
    read(j, "name", c.name, "config");
    read(j, "i_bar", c.i_bar, "config");
    read(j, "u_max", c.u_max, "config");
    read(j, "measure_every", c.measure_every, "config");
    read(j, "seed", c.seed, "config");
    read(j, "gap_grid", c.gap_grid, "config");
    if (j.contains("params")) {
        const json& p = j["params"];
        reject_unknown(p, {"beta", "gamma"}, "params");
        read(p, "beta", c.params.beta, "params");
        read(p, "gamma", c.params.gamma, "params");
    }
    if (j.contains("init")) {
        const json& p = j["init"];
        reject_unknown(p, {"t", "S", "I", "R"}, "init");
        read(p, "t", c.init.t, "init");
        read(p, "S", c.init.s, "init");
        read(p, "I", c.init.i, "init");
        if (p.contains("R")) {
            read(p, "R", c.init.r, "init");
        } else {
            c.init.r = std::max(0.0, 1.0 - c.init.s - c.init.i);
        }
    }
    if (j.contains("noise")) {
        const json& p = j["noise"];
        reject_unknown(p, {"kind", "snr_db", "divisor"}, "noise");
        std::string kind = noise_name(c.noise.kind);
        read(p, "kind", kind, "noise");
        c.noise.kind = noise_from_name(kind);
        read(p, "snr_db", c.noise.snr_db, "noise");
        read(p, "divisor", c.noise.divisor, "noise");
    }
    if (j.contains("bounds")) {
        const json& p = j["bounds"];
        reject_unknown(p, {"mode", "beta_mult", "gamma_mult", "alpha"}, "bounds");
        std::string mode = "multipliers";
        read(p, "mode", mode, "bounds");
        if (mode == "multipliers") {
            c.bounds.mode = BoundsConfig::Mode::Multipliers;
        } else if (mode == "estimated") {
            c.bounds.mode = BoundsConfig::Mode::Estimated;
        } else {
            throw ConfigError("bounds.mode: expected multipliers or estimated, got '" + mode + "'");
        }
        read(p, "beta_mult", c.bounds.beta_mult, "bounds");
        read(p, "gamma_mult", c.bounds.gamma_mult, "bounds");
        read(p, "alpha", c.bounds.alpha, "bounds");
    }
    if (j.contains("misestimated")) {
        const json& p = j["misestimated"];
        reject_unknown(p, {"enabled", "beta_mult", "gamma_mult"}, "misestimated");
        read(p, "enabled", c.include_misestimated, "misestimated");
        read(p, "beta_mult", c.mis_beta_mult, "misestimated");
        read(p, "gamma_mult", c.mis_gamma_mult, "misestimated");
    }
    if (j.contains("integrator")) {
        const json& p = j["integrator"];
        reject_unknown(p, {"method", "step", "horizon"}, "integrator");
        std::string method = method_name(c.integrator.method);
        read(p, "method", method, "integrator");
        c.integrator.method = method_from_name(method);
        read(p, "step", c.integrator.step, "integrator");
        read(p, "horizon", c.integrator.horizon, "integrator");
    }
    if (j.contains("estimation")) {
        const json& p = j["estimation"];
        reject_unknown(p, {"t_i", "t_j", "h_unit", "alpha_list", "zeta", "r", "prior", "horizon"}, "estimation");
        read(p, "t_i", c.estimation.t_i, "estimation");
        read(p, "t_j", c.estimation.t_j, "estimation");
        read(p, "h_unit", c.estimation.h_unit, "estimation");
        read(p, "alpha_list", c.estimation.alpha_list, "estimation");
        read(p, "r", c.estimation.r, "estimation");
        read(p, "horizon", c.estimation.horizon, "estimation");
        if (p.contains("zeta") && !p["zeta"].is_null()) {
            double z = 0.0;
            read(p, "zeta", z, "estimation");
            c.estimation.zeta = z;
        }
        if (p.contains("prior") && !p["prior"].is_null()) {
            const json& q = p["prior"];
            reject_unknown(q, {"beta", "gamma"}, "estimation.prior");
            EpidemicParams prior = c.params;
            read(q, "beta", prior.beta, "estimation.prior");
            read(q, "gamma", prior.gamma, "estimation.prior");
            c.estimation.prior = prior;
        }
    }
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

std::vector<std::string> preset_names()
{
    return {"sir-wave", "param-est", "bound-sweep", "policy-compare", "fig1"};
}

ScenarioConfig preset(const std::string& name)
{
    ScenarioConfig c;
    c.name = name;
    std::vector<int> all_alpha(200);
    for (int a = 1; a <= 200; ++a) {
        all_alpha[static_cast<std::size_t>(a - 1)] = a;
    }
    if (name == "sir-wave") {
        c.include_misestimated = false;
        c.bounds.beta_mult = 1.0;
        c.bounds.gamma_mult = 1.0;
    } else if (name == "param-est") {
        c.estimation.alpha_list = all_alpha;
        c.estimation.zeta = 0.055;
    } else if (name == "bound-sweep") {
        c.estimation.alpha_list = all_alpha;
        c.estimation.zeta = 0.055;
        c.noise.kind = NoiseKind::SnrDb;
        c.noise.snr_db = 100.0;
    } else if (name == "policy-compare") {
        c.noise.kind = NoiseKind::SnrDb;
        c.noise.snr_db = 55.0;
    } else if (name == "fig1") {
        c.params = {0.16, 0.063};
        c.u_max = 0.2;
        c.noise.kind = NoiseKind::ScaledVariance;
        c.noise.divisor = 100.0;
        c.include_misestimated = false;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    c.validate();
    return c;
}

Trajectory open_loop(const ScenarioConfig& config, double horizon)
{
    IntegratorConfig ic = config.integrator;
    ic.horizon = horizon;
    return integrate(config.params, [](double, const SirState&) { return 0.0; }, config.init, ic);
}

std::vector<EstimateRow> sweep_h(const ScenarioConfig& config)
{
    config.validate();
    const EstimationRecord rec = make_record(config);
    std::vector<EstimateRow> rows;
    rows.reserve(config.estimation.alpha_list.size());
    for (int alpha : config.estimation.alpha_list) {
        std::optional<ParamEstimate> est;
        rows.push_back(estimate_row(config, rec, alpha, est));
    }
    return rows;
}

EstimationOutcome estimate_at(const ScenarioConfig& config, int alpha)
{
    config.validate();
    const EstimationRecord rec = make_record(config);
    std::optional<ParamEstimate> est;
    EstimationOutcome out;
    out.row = estimate_row(config, rec, alpha, est);
    if (!est) {
        throw SingularRegressors("regressors singular at alpha=" + std::to_string(alpha));
    }
    if (!std::isfinite(out.row.bound_b)) {
        throw InvalidArgument("error bound undefined at alpha=" + std::to_string(alpha) + " (zeta * h >= 1)");
    }
    out.estimate = *est;
    out.intervals = param_intervals(*est, out.row.bound_b);
    return out;
}

const ClosedLoopRun* RunArtifacts::find(PolicyKind kind) const
{
    for (const auto& run : runs) {
        if (run.trace.kind == kind) {
            return &run;
        }
    }
    return nullptr;
}

bool RunArtifacts::robust_feasible() const
{
    const ClosedLoopRun* robust = find(PolicyKind::Robust);
    return robust == nullptr || robust->feasibility.feasible;
}

RunArtifacts run_scenario(const ScenarioConfig& config)
{
    config.validate();
    RunArtifacts art;

    ClosedLoopRun optimal = simulate_closed_loop(base_setup(config, PolicyKind::Optimal), config.init);
    const NoiseLevels levels = resolve_noise(config.noise, optimal.trajectory);

    if (config.bounds.mode == BoundsConfig::Mode::Estimated) {
        const EstimationOutcome est = estimate_at(config, static_cast<int>(config.bounds.alpha));
        art.intervals = est.intervals;
        art.estimates.push_back(est.row);
        art.robust_params = {est.intervals.beta_max(), est.intervals.gamma_min()};
        ScenarioConfig on_grid = config;
        on_grid.integrator.step = config.estimation.h_unit;
        art.open_loop = open_loop(on_grid, config.estimation.horizon);
    } else {
        art.robust_params = {config.params.beta * config.bounds.beta_mult,
                             config.params.gamma * config.bounds.gamma_mult};
    }

    ClosedLoopRun robust = run_robust(config, art.robust_params, levels, kRobustStream);

    art.costs.push_back(cost_row(optimal));
    art.costs.push_back(compare_to_optimal(robust, optimal, config.params, art.robust_params));
    if (config.include_misestimated) {
        ClosedLoopSetup setup = base_setup(config, PolicyKind::Misestimated);
        setup.assumed = {config.params.beta * config.mis_beta_mult, config.params.gamma * config.mis_gamma_mult};
        setup.amplitude = levels.amplitude();
        setup.channel = make_channel(levels, derive_seed(config.seed, kMisestimatedStream));
        ClosedLoopRun mis = simulate_closed_loop(setup, config.init);
        art.costs.push_back(compare_to_optimal(mis, optimal, config.params, setup.assumed));
        art.runs.push_back(std::move(optimal));
        art.runs.push_back(std::move(robust));
        art.runs.push_back(std::move(mis));
    } else {
        art.runs.push_back(std::move(optimal));
        art.runs.push_back(std::move(robust));
    }
    return art;
}

std::vector<GapRow> gap_table(const ScenarioConfig& config, unsigned jobs)
{
    config.validate();
    const ClosedLoopRun optimal = simulate_closed_loop(base_setup(config, PolicyKind::Optimal), config.init);
    const NoiseLevels levels = resolve_noise(config.noise, optimal.trajectory);
    const double optimal_cost = total_cost(optimal.trace).value;

    auto point = [&](std::size_t idx) {
        const double eps = config.gap_grid[idx];
        const EpidemicParams assumed{config.params.beta * (1.0 + eps), config.params.gamma * (1.0 - eps)};
        const ClosedLoopRun robust = run_robust(config, assumed, levels, kGapStreamBase + idx);
        GapRow row;
        row.epsilon = eps;
        row.robust = compare_to_optimal(robust, optimal, config.params, assumed);
        row.optimal_cost = optimal_cost;
        return row;
    };

    const std::size_t n = config.gap_grid.size();
    std::vector<GapRow> rows(n);
    const std::size_t width = std::max<unsigned>(jobs, 1);
    for (std::size_t start = 0; start < n; start += width) {
        std::vector<std::future<GapRow>> batch;
        const std::size_t stop = std::min(n, start + width);
        for (std::size_t idx = start; idx < stop; ++idx) {
            batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, point, idx));
        }
        for (std::size_t idx = start; idx < stop; ++idx) {
            rows[idx] = batch[idx - start].get();
        }
    }
    return rows;
}

} // namespace sirctl
