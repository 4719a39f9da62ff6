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
#ifndef SIRCTL_EVENTS_HPP
#define SIRCTL_EVENTS_HPP

#include "sirctl/sir.hpp"

#include <functional>
#include <optional>

namespace sirctl {

/// Scalar function of the state whose first upward crossing of zero is sought.
using EventFunction = std::function<double(const SirState&)>;

/// Tolerance on the event function value after bisection.
inline constexpr double kEventTolerance = 1e-10;

/// Locates the first time g(state) >= 0 along a trajectory.
///
/// Inside the bracketing step the trajectory is re-integrated from the left
/// sample with that sample's held rate, so the refined time is consistent with
/// the integrator rather than with linear interpolation. Returns the start
/// time if g is already non-negative there, nullopt if never reached.
std::optional<double> locate_event(const Trajectory& traj, const EpidemicParams& params,
                                   const EventFunction& g);

/// Bisection on [0, h] for the first root of g along one held-rate step from `from`.
/// Requires g(from) < 0 <= g(advance(from, h)). Returns the step fraction tau.
double bisect_step(Method method, const SirState& from, const EpidemicParams& params, double u, double h,
                   const EventFunction& g);

/// First time the series I(t) + offset reaches `threshold`; nullopt if never.
///
/// A positive offset models an inflated upper envelope of I; its crossing is
/// never later than the crossing of the raw series.
std::optional<double> find_threshold_crossing(const Trajectory& traj, const EpidemicParams& params,
                                              double threshold, double offset = 0.0);

/// Grid-only variant for series without known dynamics (linear interpolation).
std::optional<double> find_threshold_crossing(const Trajectory& traj, double threshold, double offset = 0.0);

/// First time beta_eff * S(t) <= gamma_eff. Throws NotReached if S stays above gamma_eff / beta_eff.
double find_herd_immunity(const Trajectory& traj, const EpidemicParams& params, double beta_eff,
                          double gamma_eff);

/// State at an arbitrary time inside the trajectory, re-integrated from the preceding sample.
SirState state_at(const Trajectory& traj, const EpidemicParams& params, double t);

} // namespace sirctl

#endif // SIRCTL_EVENTS_HPP
