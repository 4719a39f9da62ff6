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
#include "sirctl/control.hpp"

#include "sirctl/errors.hpp"
#include "sirctl/events.hpp"

#include <algorithm>
#include <cmath>

namespace sirctl {

std::string to_string(PolicyKind kind)
{
    switch (kind) {
    case PolicyKind::Optimal:
        return "optimal";
    case PolicyKind::Robust:
        return "robust";
    case PolicyKind::Misestimated:
        return "misestimated";
    }
    return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name)
{
    if (name == "optimal") {
        return PolicyKind::Optimal;
    }
    if (name == "robust") {
        return PolicyKind::Robust;
    }
    if (name == "misestimated") {
        return PolicyKind::Misestimated;
    }
    throw InvalidArgument("unknown policy kind '" + name + "'");
}

void NoiseAmplitude::validate() const
{
    for (double v : {delta_s, delta_i, rel_s, rel_i}) {
        if (!(std::isfinite(v) && v >= 0.0)) {
            throw InvalidArgument("noise amplitudes must be non-negative");
        }
    }
    if (!(rel_s < 1.0 && rel_i < 1.0)) {
        throw InvalidArgument("relative noise amplitude must be below 1");
    }
}

// |x_hat - x| <= delta + rel * x  <=>  (x_hat - delta) / (1 + rel) <= x <= (x_hat + delta) / (1 - rel)
double NoiseAmplitude::upper_s(double s_hat) const
{
    return std::clamp((s_hat + delta_s) / (1.0 - rel_s), 0.0, 1.0);
}

double NoiseAmplitude::lower_s(double s_hat) const
{
    return std::clamp((s_hat - delta_s) / (1.0 + rel_s), 0.0, 1.0);
}

double NoiseAmplitude::upper_i(double i_hat) const
{
    return std::clamp((i_hat + delta_i) / (1.0 - rel_i), 0.0, 1.0);
}

double NoiseAmplitude::lower_i(double i_hat) const
{
    return std::clamp((i_hat - delta_i) / (1.0 + rel_i), 0.0, 1.0);
}

double StateBounds::s_max_at(double time) const
{
    if (t.empty()) {
        throw InvalidArgument("empty state bounds");
    }
    if (time <= t.front()) {
        return s_max.front();
    }
    if (time >= t.back()) {
        return s_max.back();
    }
    auto it = std::upper_bound(t.begin(), t.end(), time);
    const auto k = static_cast<std::size_t>(std::distance(t.begin(), it));
    const double t0 = t[k - 1];
    const double t1 = t[k];
    if (t1 == t0) {
        return s_max[k];
    }
    const double w = (time - t0) / (t1 - t0);
    return (1.0 - w) * s_max[k - 1] + w * s_max[k];
}

StateBounds construct_state_bounds(const std::vector<MeasuredSample>& measured, const NoiseAmplitude& amplitude)
{
    amplitude.validate();
    StateBounds bounds;
    bounds.t.reserve(measured.size());
    for (const auto& m : measured) {
        bounds.t.push_back(m.t);
        bounds.s_min.push_back(amplitude.lower_s(m.s_hat));
        bounds.s_max.push_back(amplitude.upper_s(m.s_hat));
        bounds.i_min.push_back(amplitude.lower_i(m.i_hat));
        bounds.i_max.push_back(amplitude.upper_i(m.i_hat));
    }
    return bounds;
}

double PolicyTrace::rate_at(double t) const
{
    if (knots.empty() || t < knots.front().t) {
        return 0.0;
    }
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double value, const PolicyKnot& k) { return value < k.t; });
    return std::prev(it)->u;
}

Stage PolicyTrace::stage_at(double t) const
{
    if (knots.empty() || t < knots.front().t) {
        return Stage::Early;
    }
    auto it = std::upper_bound(knots.begin(), knots.end(), t,
                               [](double value, const PolicyKnot& k) { return value < k.t; });
    return std::prev(it)->stage;
}

double optimal_rate(double t, const SirState& state, const EpidemicParams& params, const SwitchingTimes& times,
                    double u_max)
{
    if (!times.t_b || t < *times.t_b) {
        return 0.0;
    }
    if (times.t_h && t >= *times.t_h) {
        return 0.0;
    }
    return std::clamp(params.beta * state.s - params.gamma, 0.0, u_max);
}

double robust_rate(double t, double s_max_at_t, double beta_max, double gamma_min, const SwitchingTimes& times,
                   double u_max)
{
    if (!times.t_b || t < *times.t_b) {
        return 0.0;
    }
    if (times.t_h && t >= *times.t_h) {
        return 0.0;
    }
    return std::clamp(beta_max * s_max_at_t - gamma_min, 0.0, u_max);
}

ThresholdRateCheck feasibility_check(const EpidemicParams& params, const SirState& state_at_tb, double u_max)
{
    ThresholdRateCheck check;
    check.required_rate = params.beta * state_at_tb.s - params.gamma;
    check.feasible = check.required_rate <= u_max;
    return check;
}

void ClosedLoopSetup::validate() const
{
    truth.validate();
    if (kind != PolicyKind::Optimal) {
        if (!(std::isfinite(assumed.beta) && assumed.beta > 0.0) || !std::isfinite(assumed.gamma)) {
            throw InvalidArgument("assumed beta must be positive and gamma finite");
        }
    }
    if (!(i_bar > 0.0 && i_bar < 1.0)) {
        throw InvalidArgument("infection threshold must lie in (0, 1)");
    }
    bounds.validate();
    amplitude.validate();
    integrator.validate();
    if (measure_every == 0) {
        throw InvalidArgument("measure_every must be at least 1");
    }
}

namespace {

struct Observation {
    double s = 0.0;
    double i = 0.0;
};

/// Stage machine shared by all policy kinds; only the observation and the
/// believed parameters differ between kinds.
class StagedController {
public:
    explicit StagedController(const ClosedLoopSetup& setup)
        : setup_(setup)
        , params_(setup.kind == PolicyKind::Optimal ? setup.truth : setup.assumed)
    {
    }

    Observation observe(const SirState& x, const NoiseSample& v) const
    {
        switch (setup_.kind) {
        case PolicyKind::Optimal:
            return {x.s, x.i};
        case PolicyKind::Robust:
            return {setup_.amplitude.upper_s(x.s + v.v_s), setup_.amplitude.upper_i(x.i + v.v_i)};
        case PolicyKind::Misestimated:
            return {x.s + v.v_s, x.i + v.v_i};
        }
        return {x.s, x.i};
    }

    /// Non-negative once the current stage should end.
    double switch_function(const SirState& x, const NoiseSample& v) const
    {
        const Observation o = observe(x, v);
        switch (stage_) {
        case Stage::Early:
            return o.i - setup_.i_bar;
        case Stage::Outbreak:
            return params_.gamma - params_.beta * o.s;
        case Stage::PostHerd:
            return -1.0;
        }
        return -1.0;
    }

    /// Applies every transition due at state x; returns true if the stage changed.
    bool update_stage(const SirState& x, const NoiseSample& v, PolicyTrace& trace)
    {
        bool changed = false;
        while (stage_ != Stage::PostHerd && switch_function(x, v) >= 0.0) {
            if (stage_ == Stage::Early) {
                stage_ = Stage::Outbreak;
                trace.times.t_b = x.t;
                trace.state_at_tb = x;
            } else {
                stage_ = Stage::PostHerd;
                trace.times.t_h = x.t;
                trace.state_at_th = x;
            }
            changed = true;
        }
        return changed;
    }

    double rate(const Observation& o)
    {
        if (stage_ != Stage::Outbreak) {
            return 0.0;
        }
        const double raw = params_.beta * o.s - params_.gamma;
        const double u = setup_.bounds.clamp(raw);
        if (u != raw) {
            ++clamp_events_;
        }
        return u;
    }

    Stage stage() const { return stage_; }
    std::size_t clamp_events() const { return clamp_events_; }

private:
    const ClosedLoopSetup& setup_;
    EpidemicParams params_;
    Stage stage_ = Stage::Early;
    std::size_t clamp_events_ = 0;
};

} // namespace

ClosedLoopRun simulate_closed_loop(const ClosedLoopSetup& setup, const SirState& init)
{
    setup.validate();
    init.validate();

    const IntegratorConfig& cfg = setup.integrator;
    const std::size_t n = cfg.step_count();
    const double h = cfg.step;
    const EpidemicParams& truth = setup.truth;

    ClosedLoopRun run;
    run.trajectory.step = h;
    run.trajectory.method = cfg.method;
    run.trajectory.samples.reserve(n + 1);
    run.measured.reserve(n + 1);
    run.stages.reserve(n + 1);
    run.trace.kind = setup.kind;
    run.trace.knots.reserve(n + 8);
    run.trace.end_time = init.t + static_cast<double>(n) * h;
    run.trace.times.horizon_end = run.trace.end_time;

    StagedController controller(setup);
    NoiseSample noise;
    double u = 0.0;
    double max_i = init.i;

    auto add_knot = [&](const SirState& x, const Observation& o) {
        run.trace.knots.push_back({x.t, u, controller.stage(), o.s, o.i});
        const double s_hat = x.s + noise.v_s;
        const double i_hat = x.i + noise.v_i;
        run.envelope.t.push_back(x.t);
        run.envelope.s_min.push_back(setup.amplitude.lower_s(s_hat));
        run.envelope.s_max.push_back(setup.amplitude.upper_s(s_hat));
        run.envelope.i_min.push_back(setup.amplitude.lower_i(i_hat));
        run.envelope.i_max.push_back(setup.amplitude.upper_i(i_hat));
    };

    SirState x = init;
    for (std::size_t k = 0; k <= n; ++k) {
        x.t = init.t + static_cast<double>(k) * h;
        const bool epoch = k % setup.measure_every == 0;
        if (epoch && setup.channel) {
            noise = setup.channel(k / setup.measure_every, x);
        }
        Observation obs = controller.observe(x, noise);
        const bool changed = controller.update_stage(x, noise, run.trace);
        if (epoch || changed || k == 0) {
            u = controller.rate(obs);
        }

        run.trajectory.samples.push_back({x, u});
        run.measured.push_back({x.t, x.s + noise.v_s, x.i + noise.v_i, u});
        run.stages.push_back(controller.stage());
        add_knot(x, obs);
        max_i = std::max(max_i, x.i);
        if (k == n) {
            break;
        }

        // one grid step, split at every stage switch found inside it
        SirState cur = x;
        double remaining = h;
        for (int guard = 0; guard < 4 && remaining > 0.0; ++guard) {
            const SirState next = advance(cfg.method, cur, truth, u, remaining);
            auto g = [&](const SirState& y) { return controller.switch_function(y, noise); };
            if (controller.stage() == Stage::PostHerd || g(next) < 0.0) {
                cur = next;
                remaining = 0.0;
                break;
            }
            const double tau = bisect_step(cfg.method, cur, truth, u, remaining, g);
            if (tau >= remaining) {
                // crossing sits on the grid node; the node check of the next step handles it
                cur = next;
                remaining = 0.0;
                break;
            }
            SirState at_event = advance(cfg.method, cur, truth, u, tau);
            at_event.t = cur.t + tau;
            controller.update_stage(at_event, noise, run.trace);
            obs = controller.observe(at_event, noise);
            u = controller.rate(obs);
            add_knot(at_event, obs);
            max_i = std::max(max_i, at_event.i);
            remaining -= tau;
            cur = at_event;
        }
        if (remaining > 0.0) {
            cur = advance(cfg.method, cur, truth, u, remaining);
        }
        if (!std::isfinite(cur.s) || !std::isfinite(cur.i) || !std::isfinite(cur.r)) {
            throw NonFiniteState("closed-loop state became non-finite");
        }
        x = cur;
    }

    run.trajectory.clamp_events = controller.clamp_events();

    FeasibilityReport& rep = run.feasibility;
    rep.u_max = setup.bounds.u_max;
    rep.i_bar = setup.i_bar;
    rep.max_infection_attained = max_i;
    rep.clamp_events = controller.clamp_events();
    rep.feasible = max_i <= setup.i_bar + kFeasibilitySlack;
    if (run.trace.state_at_tb) {
        const ThresholdRateCheck check = feasibility_check(truth, *run.trace.state_at_tb, setup.bounds.u_max);
        rep.required_rate_at_tb = check.required_rate;
        rep.threshold_rate_feasible = check.feasible;
    }
    return run;
}

} // namespace sirctl
