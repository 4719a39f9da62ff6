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
#ifndef SIRCTL_SCENARIO_HPP
#define SIRCTL_SCENARIO_HPP

#include "sirctl/analysis.hpp"
#include "sirctl/control.hpp"
#include "sirctl/estimation.hpp"
#include "sirctl/noise.hpp"
#include "sirctl/sir.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sirctl {

/// Two-point estimation setup and the h-sweep grid (h = alpha * h_unit).
struct EstimationConfig {
    double t_i = 80.0;
    double t_j = 90.0;
    double h_unit = 0.01;
    std::vector<int> alpha_list{1};
    std::optional<double> zeta;       ///< override; default from lipschitz_constant
    double r = 0.1;
    std::optional<EpidemicParams> prior; ///< guess used for zeta and c; defaults to the true parameters
    double horizon = 110.0;           ///< length of the open-loop data record

    void validate() const;
};

/// How the robust policy obtains beta_max and gamma_min.
struct BoundsConfig {
    enum class Mode { Multipliers, Estimated };
    Mode mode = Mode::Multipliers;
    double beta_mult = 1.05;
    double gamma_mult = 0.95;
    double alpha = 1.0; ///< Estimated mode: h = alpha * h_unit
};

struct ScenarioConfig {
    std::string name = "custom";
    EpidemicParams params{0.16, 1.0 / 30.0};
    SirState init{0.0, 1.0 - 1e-5, 1e-5, 0.0};
    double i_bar = 0.01;
    double u_max = 0.15;
    NoiseConfig noise;
    BoundsConfig bounds;
    bool include_misestimated = true;
    double mis_beta_mult = 0.95;
    double mis_gamma_mult = 1.05;
    IntegratorConfig integrator;
    std::size_t measure_every = 1;
    std::uint64_t seed = 42;
    EstimationConfig estimation;
    std::vector<double> gap_grid{0.0, 0.001, 0.002, 0.005, 0.01, 0.05, 0.1};

    /// Throws ConfigError describing the first invalid field.
    void validate() const;
};

void to_json(nlohmann::json& j, const ScenarioConfig& config);
/// Missing fields keep their defaults; unknown keys are rejected.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

std::vector<std::string> preset_names();
/// Named setups: sir-wave, param-est, bound-sweep, policy-compare, fig1.
ScenarioConfig preset(const std::string& name);

/// Open-loop (u = 0) trajectory of the scenario over `horizon`.
Trajectory open_loop(const ScenarioConfig& config, double horizon);

struct EstimateRow {
    int alpha = 0;
    double h = 0.0;
    double beta_hat = 0.0;
    double gamma_hat = 0.0;
    double err_norm = 0.0;
    double bound_b = 0.0;
    bool contained = false;
    bool singular = false; ///< regressors singular: estimate columns are NaN
    BoundTerms terms;
    double lambda_min = 0.0;
};

/// Estimate and bound for every alpha on one measured open-loop record.
std::vector<EstimateRow> sweep_h(const ScenarioConfig& config);

/// Estimate with bound at a single sample step, on the scenario's measured open-loop record.
struct EstimationOutcome {
    ParamEstimate estimate;
    ParamIntervals intervals;
    EstimateRow row;
};
EstimationOutcome estimate_at(const ScenarioConfig& config, int alpha);

struct RunArtifacts {
    std::vector<ClosedLoopRun> runs; ///< Optimal first, then Robust, then Misestimated if requested
    std::vector<CostReport> costs;
    std::vector<EstimateRow> estimates;
    std::optional<Trajectory> open_loop;
    std::optional<ParamIntervals> intervals; ///< set in Estimated bounds mode
    EpidemicParams robust_params;

    const ClosedLoopRun* find(PolicyKind kind) const;
    /// True when there is no Robust run or the Robust run is feasible.
    bool robust_feasible() const;
};

/// Runs Optimal, Robust and (optionally) Misestimated on the same truth.
RunArtifacts run_scenario(const ScenarioConfig& config);

struct GapRow {
    double epsilon = 0.0; ///< beta_max = (1 + eps) beta, gamma_min = (1 - eps) gamma
    CostReport robust;
    double optimal_cost = 0.0;
};

/// Robust-vs-optimal gap over the inflation grid; `jobs` > 1 evaluates points concurrently.
std::vector<GapRow> gap_table(const ScenarioConfig& config, unsigned jobs = 1);

} // namespace sirctl

#endif // SIRCTL_SCENARIO_HPP
