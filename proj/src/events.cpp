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
#include "sirctl/events.hpp"

#include "sirctl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sirctl {

namespace {

void check_threshold(double threshold)
{
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw InvalidArgument("threshold must lie in (0, 1)");
    }
}

} // namespace

double bisect_step(Method method, const SirState& from, const EpidemicParams& params, double u, double h,
                   const EventFunction& g)
{
    double lo = 0.0;
    double hi = h;
    const double width = 1e-13 * std::max(1.0, h);
    for (int iter = 0; iter < 200 && hi - lo > width; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double value = g(advance(method, from, params, u, mid));
        if (value >= 0.0) {
            hi = mid;
            if (value <= kEventTolerance) {
                break;
            }
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::optional<double> locate_event(const Trajectory& traj, const EpidemicParams& params, const EventFunction& g)
{
    if (traj.empty()) {
        return std::nullopt;
    }
    if (g(traj.state(0)) >= 0.0) {
        return traj.state(0).t;
    }
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        if (g(traj.state(k + 1)) < 0.0) {
            continue;
        }
        const SirState& from = traj.state(k);
        const double h = traj.state(k + 1).t - from.t;
        if (g(advance(traj.method, from, params, traj.u(k), h)) < 0.0) {
            // the stored step was not a single held-rate step; fall back to the grid
            return traj.state(k + 1).t;
        }
        return from.t + bisect_step(traj.method, from, params, traj.u(k), h, g);
    }
    return std::nullopt;
}

std::optional<double> find_threshold_crossing(const Trajectory& traj, const EpidemicParams& params,
                                              double threshold, double offset)
{
    check_threshold(threshold);
    return locate_event(traj, params, [&](const SirState& x) { return x.i + offset - threshold; });
}

std::optional<double> find_threshold_crossing(const Trajectory& traj, double threshold, double offset)
{
    check_threshold(threshold);
    if (traj.empty()) {
        return std::nullopt;
    }
    auto value = [&](std::size_t k) { return traj.state(k).i + offset - threshold; };
    if (value(0) >= 0.0) {
        return traj.state(0).t;
    }
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const double a = value(k);
        const double b = value(k + 1);
        if (b >= 0.0) {
            const double t0 = traj.state(k).t;
            const double t1 = traj.state(k + 1).t;
            return t0 + (t1 - t0) * (-a) / (b - a);
        }
    }
    return std::nullopt;
}

double find_herd_immunity(const Trajectory& traj, const EpidemicParams& params, double beta_eff, double gamma_eff)
{
    if (!(beta_eff > 0.0 && gamma_eff > 0.0)) {
        throw InvalidArgument("effective rates must be positive");
    }
    auto t = locate_event(traj, params, [&](const SirState& x) { return gamma_eff - beta_eff * x.s; });
    if (!t) {
        throw NotReached("herd immunity not reached within the horizon");
    }
    return *t;
}

SirState state_at(const Trajectory& traj, const EpidemicParams& params, double t)
{
    if (traj.empty()) {
        throw InvalidArgument("empty trajectory");
    }
    const double t0 = traj.state(0).t;
    const double t_end = traj.samples.back().state.t;
    if (t < t0 || t > t_end) {
        throw InvalidArgument("time outside the trajectory");
    }
    auto it = std::upper_bound(traj.samples.begin(), traj.samples.end(), t,
                               [](double value, const TrajectorySample& s) { return value < s.state.t; });
    const auto k = static_cast<std::size_t>(std::distance(traj.samples.begin(), it)) - 1;
    const SirState& from = traj.state(k);
    if (t == from.t) {
        return from;
    }
    return advance(traj.method, from, params, traj.u(k), t - from.t);
}

} // namespace sirctl
