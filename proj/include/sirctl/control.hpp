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
#ifndef SIRCTL_CONTROL_HPP
#define SIRCTL_CONTROL_HPP

#include "sirctl/estimation.hpp"
#include "sirctl/sir.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sirctl {

enum class PolicyKind {
    Optimal,      ///< true parameters, true states
    Robust,       ///< beta_max, gamma_min and the upper state envelopes
    Misestimated, ///< optimal-form rule fed point estimates and raw measurements
};

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

/// 1: before the threshold is reached, 2: holding the outbreak, 3: past herd immunity.
enum class Stage : int { Early = 1, Outbreak = 2, PostHerd = 3 };

/// Bound on |measurement error|: |x_hat - x| <= delta + rel * x.
///
/// The additive part covers constant-variance noise, the relative part noise
/// whose spread scales with the state itself.
struct NoiseAmplitude {
    double delta_s = 0.0;
    double delta_i = 0.0;
    double rel_s = 0.0;
    double rel_i = 0.0;

    void validate() const;
    double upper_s(double s_hat) const;
    double lower_s(double s_hat) const;
    double upper_i(double i_hat) const;
    double lower_i(double i_hat) const;
};

/// Envelopes around a measured series, clipped to [0, 1].
struct StateBounds {
    std::vector<double> t;
    std::vector<double> s_min;
    std::vector<double> s_max;
    std::vector<double> i_min;
    std::vector<double> i_max;

    std::size_t size() const { return t.size(); }
    /// Linear interpolation of s_max; clamps outside the covered range.
    double s_max_at(double time) const;
};

StateBounds construct_state_bounds(const std::vector<MeasuredSample>& measured, const NoiseAmplitude& amplitude);

/// Stage switching times; nullopt means the event never fired within the horizon.
struct SwitchingTimes {
    std::optional<double> t_b;
    std::optional<double> t_h;
    double horizon_end = 0.0;

    /// t_h, or the horizon end when herd immunity was not reached.
    double t_h_or_horizon() const { return t_h.value_or(horizon_end); }
    double t_b_or_horizon() const { return t_b.value_or(horizon_end); }
};

/// Outcome of the feasibility condition at the first threshold crossing.
struct ThresholdRateCheck {
    double required_rate = 0.0; ///< beta * S(t_b) - gamma
    bool feasible = false;      ///< required_rate in (0, u_max], or <= 0 (I already non-increasing)
};

struct FeasibilityReport {
    bool feasible = false; ///< max I <= i_bar + 1e-6 over the whole horizon
    std::optional<double> required_rate_at_tb;
    std::optional<bool> threshold_rate_feasible;
    double u_max = 0.0;
    double i_bar = 0.0;
    double max_infection_attained = 0.0;
    std::size_t clamp_events = 0;

    bool saturated() const { return clamp_events > 0; }
};

inline constexpr double kFeasibilitySlack = 1e-6;

/// Piecewise-constant control record: knot k holds from t until the next knot.
struct PolicyKnot {
    double t = 0.0;
    double u = 0.0;
    Stage stage = Stage::Early;
    double s_obs = 0.0; ///< susceptible value the policy acted on
    double i_obs = 0.0; ///< infected value the policy acted on
};

struct PolicyTrace {
    PolicyKind kind = PolicyKind::Optimal;
    std::vector<PolicyKnot> knots;
    double end_time = 0.0;
    SwitchingTimes times;
    std::optional<SirState> state_at_tb; ///< true state at t_b
    std::optional<SirState> state_at_th; ///< true state at t_h

    /// Applied rate at time t (right-continuous).
    double rate_at(double t) const;
    Stage stage_at(double t) const;
};

/// Optimal three-stage rule with true parameters and state, clamped to [0, u_max].
double optimal_rate(double t, const SirState& state, const EpidemicParams& params, const SwitchingTimes& times,
                    double u_max);

/// Robust rule: beta_max * S_max(t) - gamma_min between t_b and t_h, else 0, clamped to [0, u_max].
double robust_rate(double t, double s_max_at_t, double beta_max, double gamma_min, const SwitchingTimes& times,
                   double u_max);

ThresholdRateCheck feasibility_check(const EpidemicParams& params, const SirState& state_at_tb, double u_max);

/// Additive measurement error drawn at a measurement epoch.
struct NoiseSample {
    double v_s = 0.0;
    double v_i = 0.0;
};

/// Source of measurement noise; called once per epoch, in epoch order.
using MeasurementChannel = std::function<NoiseSample(std::size_t epoch, const SirState& truth)>;

/// Everything one closed-loop run needs besides the initial state.
struct ClosedLoopSetup {
    PolicyKind kind = PolicyKind::Optimal;
    EpidemicParams truth;
    /// Parameters the policy believes: ignored for Optimal, (beta_max, gamma_min)
    /// for Robust, point estimates for Misestimated.
    EpidemicParams assumed;
    double i_bar = 0.01;
    ControlBounds bounds;
    NoiseAmplitude amplitude; ///< envelope widths used by Robust
    MeasurementChannel channel; ///< empty means noise-free measurements
    IntegratorConfig integrator;
    std::size_t measure_every = 1; ///< integration steps per measurement epoch

    void validate() const;
};

struct ClosedLoopRun {
    Trajectory trajectory;                 ///< uniform grid, t_k = k * step
    std::vector<MeasuredSample> measured;  ///< one per trajectory sample
    std::vector<Stage> stages;             ///< stage in force at each sample
    PolicyTrace trace;
    StateBounds envelope;                  ///< observed envelope at every trace knot
    FeasibilityReport feasibility;
};

/// Drives the true dynamics with the policy of `setup.kind`.
///
/// The rate is recomputed at every measurement epoch and at every stage
/// switch and held in between. Stage switches are located inside the
/// integration step by bisection on the observed channel (true state plus the
/// noise drawn at the latest epoch), and the step is split at the switch.
/// Stage 3 is latched.
ClosedLoopRun simulate_closed_loop(const ClosedLoopSetup& setup, const SirState& init);

} // namespace sirctl

#endif // SIRCTL_CONTROL_HPP
