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
#ifndef SIRCTL_SIR_HPP
#define SIRCTL_SIR_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace sirctl {

/// Transmission rate beta and removal rate gamma, both per unit time.
struct EpidemicParams {
    double beta = 0.0;
    double gamma = 0.0;

    /// Throws InvalidArgument unless both rates are finite and positive.
    void validate() const;
};

/// Population fractions at time t.
struct SirState {
    double t = 0.0;
    double s = 1.0;
    double i = 0.0;
    double r = 0.0;

    /// Throws InvalidArgument if a fraction leaves [0,1] or the sum drifts from 1 by more than 1e-9.
    void validate() const;
};

/// Upper bound on the isolation rate; the lower bound is always 0.
struct ControlBounds {
    double u_max = 1.0;

    void validate() const;
    double clamp(double u) const;
};

struct Derivative {
    double ds = 0.0;
    double di = 0.0;
    double dr = 0.0;
};

enum class Method { RungeKutta4, ForwardEuler };

struct IntegratorConfig {
    Method method = Method::RungeKutta4;
    double step = 0.01;
    double horizon = 1200.0;

    void validate() const;
    /// Number of steps needed to cover the horizon.
    std::size_t step_count() const;
};

struct TrajectorySample {
    SirState state;
    double u = 0.0; ///< rate held over [t, t + step)
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double step = 0.0;
    Method method = Method::RungeKutta4;
    std::size_t clamp_events = 0;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
    const SirState& state(std::size_t k) const { return samples[k].state; }
    double u(std::size_t k) const { return samples[k].u; }
    double max_infection() const;
};

/// Feedback law evaluated at the start of each integration step.
using Policy = std::function<double(double t, const SirState& state)>;

Derivative rhs(const SirState& state, const EpidemicParams& params, double u);

/// One forward-Euler step of length h with the rate held at u.
SirState euler_step(const SirState& state, const EpidemicParams& params, double u, double h);

/// One classical fourth-order Runge-Kutta step of length h with the rate held at u.
SirState rk4_step(const SirState& state, const EpidemicParams& params, double u, double h);

SirState advance(Method method, const SirState& state, const EpidemicParams& params, double u, double h);

/// Integrates the controlled SIR system from `init` over the configured horizon.
///
/// The policy is sampled once per step and held (zero-order hold). Returned
/// rates are clamped to [0, bounds.u_max]; each clamp increments
/// Trajectory::clamp_events. Throws NonFiniteState on NaN/inf rates or states.
Trajectory integrate(const EpidemicParams& params, const Policy& policy, const SirState& init,
                     const IntegratorConfig& config, const ControlBounds& bounds = {});

/// Peak of I under a constant isolation rate u_fix starting from `start`.
///
/// Returns rho*(ln rho - 1 - ln S) + S + I with rho = (gamma + u_fix)/beta.
/// When beta*S <= gamma + u_fix the infection is already non-increasing and
/// start.i is returned. Throws InvalidArgument for start.s <= 0.
double peak_infection(const EpidemicParams& params, const SirState& start, double u_fix);

} // namespace sirctl

#endif // SIRCTL_SIR_HPP
