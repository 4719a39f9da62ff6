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
#include "sirctl/analysis.hpp"

#include "sirctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace sirctl {

namespace {

constexpr double kTimeTol = 1e-9;

void check_grid(std::span<const double> t, std::span<const double> y)
{
    if (t.size() != y.size() || t.empty()) {
        throw InvalidArgument("integration samples must be non-empty and of equal length");
    }
}

double interpolate(std::span<const double> t, std::span<const double> y, double x)
{
    if (x <= t.front()) {
        return y.front();
    }
    if (x >= t.back()) {
        return y.back();
    }
    const auto k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin());
    const double w = (x - t[k - 1]) / (t[k] - t[k - 1]);
    return (1.0 - w) * y[k - 1] + w * y[k];
}

void check_range(std::span<const double> t, double a, double b)
{
    if (a < t.front() - kTimeTol || b > t.back() + kTimeTol) {
        throw InvalidArgument("integration range outside the sampled interval");
    }
}

/// Integral of a zero-order held signal with values y_k on [t_k, t_{k+1}).
double held_integral(std::span<const double> t, std::span<const double> y, double a, double b)
{
    check_grid(t, y);
    if (b < a) {
        return -held_integral(t, y, b, a);
    }
    check_range(t, a, b);
    double total = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double lo = std::max(a, t[k]);
        const double hi = std::min(b, k + 1 < t.size() ? t[k + 1] : b);
        if (hi > lo) {
            total += y[k] * (hi - lo);
        }
    }
    return total;
}

std::vector<double> times_of(const Trajectory& traj)
{
    std::vector<double> t;
    t.reserve(traj.size());
    for (const auto& sample : traj.samples) {
        t.push_back(sample.state.t);
    }
    return t;
}

void check_same_grid(const Trajectory& a, const Trajectory& b)
{
    if (a.size() != b.size() || a.empty()) {
        throw InvalidArgument("trajectories must share a non-empty grid");
    }
    if (std::abs(a.state(0).t - b.state(0).t) > kTimeTol || std::abs(a.state(a.size() - 1).t - b.state(b.size() - 1).t) > kTimeTol) {
        throw InvalidArgument("trajectories must share a grid");
    }
}

double log_infection_at(const Trajectory& traj, const std::vector<double>& t, double at)
{
    if (t.size() < 2) {
        throw InvalidArgument("need at least two samples to evaluate log I");
    }
    auto k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), at) - t.begin());
    k = std::clamp<std::size_t>(k, 1, t.size() - 1);
    const double i0 = traj.state(k - 1).i;
    const double i1 = traj.state(k).i;
    if (!(i0 >= kInfectionFloor && i1 >= kInfectionFloor)) {
        throw InvalidArgument("infected fraction below 1e-12 at the gap evaluation time");
    }
    if (t[k] == t[k - 1]) {
        return std::log(i1);
    }
    // log I is piecewise smooth, so interpolate it rather than I
    const double w = std::clamp((at - t[k - 1]) / (t[k] - t[k - 1]), 0.0, 1.0);
    return (1.0 - w) * std::log(i0) + w * std::log(i1);
}

} // namespace

double trapezoid(std::span<const double> t, std::span<const double> y, double a, double b)
{
    check_grid(t, y);
    if (b < a) {
        return -trapezoid(t, y, b, a);
    }
    check_range(t, a, b);
    double prev_t = a;
    double prev_y = interpolate(t, y, a);
    double total = 0.0;
    auto k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), a) - t.begin());
    for (; k < t.size() && t[k] < b; ++k) {
        total += 0.5 * (prev_y + y[k]) * (t[k] - prev_t);
        prev_t = t[k];
        prev_y = y[k];
    }
    total += 0.5 * (prev_y + interpolate(t, y, b)) * (b - prev_t);
    return total;
}

TotalCost total_cost(const PolicyTrace& trace)
{
    TotalCost cost;
    if (trace.knots.empty()) {
        return cost;
    }
    for (std::size_t k = 0; k < trace.knots.size(); ++k) {
        const double end = k + 1 < trace.knots.size() ? trace.knots[k + 1].t : trace.end_time;
        cost.value += trace.knots[k].u * std::max(0.0, end - trace.knots[k].t);
    }
    cost.converged = trace.knots.back().u == 0.0;
    return cost;
}

double gap_direct(const PolicyTrace& robust, const PolicyTrace& optimal)
{
    if (std::abs(robust.end_time - optimal.end_time) > kTimeTol) {
        throw InvalidArgument("gap_direct needs traces over the same horizon");
    }
    if (!robust.knots.empty() && !optimal.knots.empty() && std::abs(robust.knots.front().t - optimal.knots.front().t) > kTimeTol) {
        throw InvalidArgument("gap_direct needs traces with the same start time");
    }
    return total_cost(robust).value - total_cost(optimal).value;
}

double gap_lemma4(const Trajectory& robust, const Trajectory& optimal, double beta, const SwitchingTimes& robust_times)
{
    check_same_grid(robust, optimal);
    if (!robust_times.t_b) {
        throw InvalidArgument("robust run never entered the outbreak stage");
    }
    const double tb = *robust_times.t_b;
    const double th = robust_times.t_h_or_horizon();
    const std::vector<double> t = times_of(robust);
    std::vector<double> diff;
    diff.reserve(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        diff.push_back(beta * (robust.state(k).s - optimal.state(k).s));
    }
    const double integral = trapezoid(t, diff, tb, th);
    return integral - log_infection_at(robust, t, th) + log_infection_at(optimal, t, th);
}

EnvelopeGap gap_thm4(const StateBounds& bounds, double beta_max, double gamma_min, const EpidemicParams& truth,
                 const Trajectory& s_star, const SwitchingTimes& robust_times, const SwitchingTimes& optimal_times)
{
    if (!robust_times.t_b || !optimal_times.t_b || !optimal_times.t_h) {
        throw InvalidArgument("gap_thm4 needs both switching times of both runs");
    }
    const double hb = *robust_times.t_b;
    const double hh = robust_times.t_h_or_horizon();
    const double sb = *optimal_times.t_b;
    const double sh = *optimal_times.t_h;
    if (!(hb <= sb + kTimeTol && sb <= sh + kTimeTol && sh <= hh + kTimeTol)) {
        throw InvalidArgument("switching times out of order for gap_thm4");
    }
    if (bounds.size() == 0 || s_star.empty()) {
        throw InvalidArgument("gap_thm4 needs a non-empty envelope and optimal trajectory");
    }

    // both series are held between their knots, the same way the policies apply them
    const std::vector<double> ts = times_of(s_star);
    std::vector<double> ss;
    ss.reserve(s_star.size());
    for (const auto& sample : s_star.samples) {
        ss.push_back(sample.state.s);
    }
    auto s_hat_int = [&](double a, double b) { return held_integral(bounds.t, bounds.s_max, a, b); };
    auto s_star_int = [&](double a, double b) {
        // start from the interpolated value at a so the first partial interval is not biased
        std::vector<double> t2{a};
        std::vector<double> y2{interpolate(ts, ss, a)};
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (ts[k] > a && ts[k] < b) {
                t2.push_back(ts[k]);
                y2.push_back(ss[k]);
            }
        }
        t2.push_back(b);
        y2.push_back(interpolate(ts, ss, b));
        return held_integral(t2, y2, a, b);
    };

    const double outside = (sb - hb) + (hh - sh);
    const double inside = sh - sb;
    EnvelopeGap gap;
    gap.c = -gamma_min * outside + (truth.gamma - gamma_min) * inside +
            beta_max * (s_hat_int(hb, sb) + s_hat_int(sh, hh)) + beta_max * s_hat_int(sb, sh) -
            truth.beta * s_star_int(sb, sh);

    const double s_hat_b = bounds.s_max_at(hb);
    const double s_star_h = interpolate(ts, ss, sh);
    gap.c_upper = (s_hat_b * beta_max - gamma_min) * outside +
                  (s_hat_b * beta_max - gamma_min - s_star_h * truth.beta + truth.gamma) * inside;
    return gap;
}

CumulativeInfectedReport cumulative_infected_check(const Trajectory& robust, const Trajectory& optimal,
                                                   double t_h_star)
{
    check_same_grid(robust, optimal);
    CumulativeInfectedReport report;
    report.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < robust.size(); ++k) {
        const SirState& a = robust.state(k);
        if (a.t > t_h_star + kTimeTol) {
            break;
        }
        const SirState& b = optimal.state(k);
        const double v = (a.i + a.r) - (b.i + b.r);
        if (v > report.max_violation) {
            report.max_violation = v;
            report.worst_time = a.t;
        }
    }
    if (!std::isfinite(report.max_violation)) {
        report.max_violation = 0.0;
    }
    report.holds = report.max_violation <= 1e-6;
    return report;
}

CostReport cost_row(const ClosedLoopRun& run)
{
    CostReport row;
    row.policy = run.trace.kind;
    const TotalCost cost = total_cost(run.trace);
    row.total_cost = cost.value;
    row.cost_converged = cost.converged;
    row.times = run.trace.times;
    row.feasible = run.feasibility.feasible;
    return row;
}

CostReport compare_to_optimal(const ClosedLoopRun& run, const ClosedLoopRun& optimal, const EpidemicParams& truth,
                              const EpidemicParams& assumed)
{
    CostReport row = cost_row(run);
    if (run.trace.kind == PolicyKind::Optimal) {
        return row;
    }
    row.gap_direct = gap_direct(run.trace, optimal.trace);
    if (run.trace.kind != PolicyKind::Robust) {
        return row;
    }
    try {
        row.gap_lemma4 = gap_lemma4(run.trajectory, optimal.trajectory, truth.beta, run.trace.times);
    } catch (const InvalidArgument&) {
        row.gap_lemma4.reset();
    }
    try {
        const EnvelopeGap g = gap_thm4(run.envelope, assumed.beta, assumed.gamma, truth, optimal.trajectory,
                                   run.trace.times, optimal.trace.times);
        row.gap_thm4 = g.c;
        row.gap_upper = g.c_upper;
    } catch (const InvalidArgument&) {
        row.gap_thm4.reset();
        row.gap_upper.reset();
    }
    return row;
}

} // namespace sirctl
