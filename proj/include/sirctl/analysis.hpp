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
#ifndef SIRCTL_ANALYSIS_HPP
#define SIRCTL_ANALYSIS_HPP

#include "sirctl/control.hpp"
#include "sirctl/sir.hpp"

#include <optional>
#include <span>

namespace sirctl {

/// Trapezoidal integral of samples (t_k, y_k) over [a, b]; linear interpolation at the ends.
double trapezoid(std::span<const double> t, std::span<const double> y, double a, double b);

struct TotalCost {
    double value = 0.0;
    /// False when the rate is still non-zero at the end of the trace (tail not converged).
    bool converged = true;
};

/// Integral of the applied rate. The rate is zero-order held, so the
/// integral is the exact sum of knot values times knot durations.
TotalCost total_cost(const PolicyTrace& trace);

/// Integral of (u_robust - u_optimal) over the common horizon.
/// Throws InvalidArgument when the traces cover different horizons.
double gap_direct(const PolicyTrace& robust, const PolicyTrace& optimal);

inline constexpr double kInfectionFloor = 1e-12;

/// Cost gap from states alone:
///   int_{tb}^{th} beta (S - S*) dt - log I(th) + log I*(th)
/// with [tb, th] the robust switching window (th truncated at the horizon if
/// herd immunity was not reached). Throws InvalidArgument when I < 1e-12 at th
/// or the grids differ.
double gap_lemma4(const Trajectory& robust, const Trajectory& optimal, double beta, const SwitchingTimes& robust_times);

struct EnvelopeGap {
    double c = 0.0;       ///< piecewise form of the gap
    double c_upper = 0.0; ///< closed-form upper bound
};

/// Gap written through the robust envelope, the optimal susceptible series and
/// the four switching times, together with its closed-form bound.
/// Requires t_b_robust <= t_b_opt <= t_h_opt <= t_h_robust; throws InvalidArgument otherwise.
EnvelopeGap gap_thm4(const StateBounds& bounds, double beta_max, double gamma_min, const EpidemicParams& truth,
                 const Trajectory& s_star, const SwitchingTimes& robust_times, const SwitchingTimes& optimal_times);

struct CumulativeInfectedReport {
    bool holds = true;          ///< I + R <= I* + R* + 1e-6 everywhere on [0, t_h*]
    double max_violation = 0.0; ///< max of (I + R) - (I* + R*), may be negative
    double worst_time = 0.0;
};

CumulativeInfectedReport cumulative_infected_check(const Trajectory& robust, const Trajectory& optimal,
                                                   double t_h_star);

/// One row of the cost table.
struct CostReport {
    PolicyKind policy = PolicyKind::Optimal;
    double total_cost = 0.0;
    bool cost_converged = true;
    std::optional<double> gap_direct;
    std::optional<double> gap_lemma4;
    std::optional<double> gap_thm4;
    std::optional<double> gap_upper;
    SwitchingTimes times;
    bool feasible = false;
};

/// Cost row for a run measured against the optimal run. Gap columns are
/// filled for Robust runs whose switching times bracket the optimal ones.
CostReport compare_to_optimal(const ClosedLoopRun& run, const ClosedLoopRun& optimal, const EpidemicParams& truth,
                              const EpidemicParams& assumed);

CostReport cost_row(const ClosedLoopRun& run);

} // namespace sirctl

#endif // SIRCTL_ANALYSIS_HPP
