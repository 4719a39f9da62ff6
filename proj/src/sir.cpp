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
#include "sirctl/sir.hpp"

#include "sirctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sirctl {

namespace {

constexpr double kConservationTolerance = 1e-9;

bool is_fraction(double x)
{
    return std::isfinite(x) && x >= 0.0 && x <= 1.0;
}

void check_finite(const SirState& s)
{
    if (!std::isfinite(s.s) || !std::isfinite(s.i) || !std::isfinite(s.r)) {
        throw NonFiniteState("non-finite state at t=" + std::to_string(s.t));
    }
}

} // namespace

void EpidemicParams::validate() const
{
    if (!(std::isfinite(beta) && beta > 0.0)) {
        throw InvalidArgument("beta must be finite and positive");
    }
    if (!(std::isfinite(gamma) && gamma > 0.0)) {
        throw InvalidArgument("gamma must be finite and positive");
    }
}

void SirState::validate() const
{
    if (!is_fraction(s) || !is_fraction(i) || !is_fraction(r)) {
        throw InvalidArgument("state fractions must lie in [0, 1]");
    }
    if (std::abs(s + i + r - 1.0) > kConservationTolerance) {
        throw InvalidArgument("state fractions must sum to 1");
    }
}

void ControlBounds::validate() const
{
    if (!(u_max > 0.0 && u_max <= 1.0)) {
        throw InvalidArgument("u_max must lie in (0, 1]");
    }
}

double ControlBounds::clamp(double u) const
{
    return std::clamp(u, 0.0, u_max);
}

void IntegratorConfig::validate() const
{
    if (!(std::isfinite(step) && step > 0.0)) {
        throw InvalidArgument("integration step must be positive");
    }
    if (!(std::isfinite(horizon) && horizon > 0.0)) {
        throw InvalidArgument("horizon must be positive");
    }
}

std::size_t IntegratorConfig::step_count() const
{
    // tolerate horizons that are an integer multiple of the step up to rounding
    return static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
}

double Trajectory::max_infection() const
{
    double peak = 0.0;
    for (const auto& sample : samples) {
        peak = std::max(peak, sample.state.i);
    }
    return peak;
}

Derivative rhs(const SirState& state, const EpidemicParams& params, double u)
{
    const double infection = params.beta * state.s * state.i;
    const double removal = (params.gamma + u) * state.i;
    return {-infection, infection - removal, removal};
}

SirState euler_step(const SirState& state, const EpidemicParams& params, double u, double h)
{
    const Derivative d = rhs(state, params, u);
    return {state.t + h, state.s + h * d.ds, state.i + h * d.di, state.r + h * d.dr};
}

SirState rk4_step(const SirState& state, const EpidemicParams& params, double u, double h)
{
    auto shifted = [&](const Derivative& d, double scale) {
        return SirState{state.t, state.s + scale * d.ds, state.i + scale * d.di, state.r + scale * d.dr};
    };
    const Derivative k1 = rhs(state, params, u);
    const Derivative k2 = rhs(shifted(k1, 0.5 * h), params, u);
    const Derivative k3 = rhs(shifted(k2, 0.5 * h), params, u);
    const Derivative k4 = rhs(shifted(k3, h), params, u);
    const double w = h / 6.0;
    return {state.t + h,
            state.s + w * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds),
            state.i + w * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di),
            state.r + w * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr)};
}

SirState advance(Method method, const SirState& state, const EpidemicParams& params, double u, double h)
{
    return method == Method::RungeKutta4 ? rk4_step(state, params, u, h) : euler_step(state, params, u, h);
}

Trajectory integrate(const EpidemicParams& params, const Policy& policy, const SirState& init,
                     const IntegratorConfig& config, const ControlBounds& bounds)
{
    params.validate();
    init.validate();
    config.validate();
    bounds.validate();

    Trajectory traj;
    traj.step = config.step;
    traj.method = config.method;
    const std::size_t n = config.step_count();
    traj.samples.reserve(n + 1);

    SirState x = init;
    for (std::size_t k = 0; k <= n; ++k) {
        // time stamps are computed, not accumulated, so sample k sits exactly at t0 + k h
        x.t = init.t + static_cast<double>(k) * config.step;
        double u = 0.0;
        if (k < n) {
            const double raw = policy ? policy(x.t, x) : 0.0;
            if (!std::isfinite(raw)) {
                throw NonFiniteState("policy returned a non-finite rate at t=" + std::to_string(x.t));
            }
            u = bounds.clamp(raw);
            if (u != raw) {
                ++traj.clamp_events;
            }
        }
        traj.samples.push_back({x, u});
        if (k < n) {
            x = advance(config.method, x, params, u, config.step);
            check_finite(x);
        }
    }
    return traj;
}

double peak_infection(const EpidemicParams& params, const SirState& start, double u_fix)
{
    params.validate();
    if (!(start.s > 0.0)) {
        throw InvalidArgument("peak_infection needs S > 0");
    }
    if (!(u_fix >= 0.0)) {
        throw InvalidArgument("u_fix must be non-negative");
    }
    const double rho = (params.gamma + u_fix) / params.beta;
    if (start.s <= rho) {
        return start.i;
    }
    return rho * (std::log(rho) - 1.0 - std::log(start.s)) + start.s + start.i;
}

} // namespace sirctl
