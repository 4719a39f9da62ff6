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
// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "support.hpp"

#include "sirctl/csv.hpp"
#include "sirctl/errors.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace sirctl;
namespace fs = std::filesystem;

namespace {

constexpr double kPeakTol = 1e-4;
constexpr double kRecoveryTol = 1e-10;
constexpr double kFeasibleSlack = 1e-6;
constexpr double kInfeasibleMargin = 1e-3;
constexpr double kDominanceTol = 1e-9;
constexpr double kPinTol = 1e-4;
constexpr double kGapRelTol = 1e-3;
constexpr double kBoundSlack = 1e-6;
constexpr double kCollapseTol = 1e-8;
constexpr double kCollapseGapTol = 1e-6;
constexpr double kCumulativeTol = 1e-6;
constexpr double kConservationTol = 1e-9;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

int failures = 0;

void report(int id, const std::string& name, double budget_s, const std::function<Outcome()>& check)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = check();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0.0 && secs > budget_s) {
        out.pass = false;
        out.detail += "; over time budget " + num(budget_s) + " s";
    }
    failures += out.pass ? 0 : 1;
    std::printf("%s  %2d  %-32s %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", id, name.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
}

const RunArtifacts& policy_compare()
{
    return sirctl::testing::policy_compare();
}

const RunArtifacts& fig1()
{
    static const RunArtifacts art = run_scenario(preset("fig1"));
    return art;
}

/// Robust runs at the truth with noise switched off, next to their optimal twin.
const RunArtifacts& collapsed(const std::string& name)
{
    static std::map<std::string, RunArtifacts> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        ScenarioConfig c = preset(name);
        c.noise.kind = NoiseKind::None;
        c.bounds.beta_mult = 1.0;
        c.bounds.gamma_mult = 1.0;
        c.include_misestimated = false;
        it = cache.emplace(name, run_scenario(c)).first;
    }
    return it->second;
}

std::set<double> knot_times(const PolicyTrace& a, const PolicyTrace& b)
{
    std::set<double> times;
    for (const auto& k : a.knots) {
        times.insert(k.t);
    }
    for (const auto& k : b.knots) {
        times.insert(k.t);
    }
    return times;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome peak_oracle()
{
    std::mt19937_64 rng(1);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto o = sirctl::testing::random_outbreak(rng);
        const double u = o.u_fix;
        const Trajectory traj = integrate(o.params, [u](double, const SirState&) { return u; }, o.init,
                                          {Method::RungeKutta4, 0.02, 3000.0});
        worst = std::max(worst, std::abs(peak_infection(o.params, o.init, u) - traj.max_infection()));
    }
    return {worst <= kPeakTol, "100 scenarios, max |err|=" + num(worst) + " (tol " + num(kPeakTol) + ")"};
}

Outcome exact_recovery()
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    int used = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const EpidemicParams p{0.05 + 0.5 * unit(rng), 0.01 + 0.2 * unit(rng)};
        auto state = [&](double t) {
            const double s = 0.2 + 0.7 * unit(rng);
            const double i = 0.01 + (1.0 - s - 0.01) * 0.5 * unit(rng);
            return SirState{t, s, i, 1.0 - s - i};
        };
        const double h = 0.01;
        const SirState xi = state(80.0);
        const SirState xj = state(90.0);
        const double ui = 0.1 * unit(rng);
        const double uj = 0.1 * unit(rng);
        const SirState xi1 = euler_step(xi, p, ui, h);
        const SirState xj1 = euler_step(xj, p, uj, h);
        const RegressionBatch batch = build_regressor_batch({xi.t, xi.s, xi.i, ui}, {xi1.t, xi1.s, xi1.i, ui},
                                                            {xj.t, xj.s, xj.i, uj}, {xj1.t, xj1.s, xj1.i, uj}, h);
        if (gram_min_eigenvalue(batch) < 1e-8) {
            continue;
        }
        const ParamEstimate est = estimate_params(batch);
        worst = std::max(worst, std::hypot(est.beta_hat - p.beta, est.gamma_hat - p.gamma));
        ++used;
    }
    return {worst <= kRecoveryTol && used > 900,
            std::to_string(used) + " batches, max error=" + num(worst) + " (tol " + num(kRecoveryTol) + ")"};
}

Outcome bound_validity()
{
    const std::vector<int> alphas{1, 10, 50, 100, 200};
    ScenarioConfig clean = preset("param-est");
    clean.estimation.alpha_list = alphas;
    ScenarioConfig noisy = preset("bound-sweep");
    noisy.estimation.alpha_list = alphas;
    const auto a = sweep_h(clean);
    const auto b = sweep_h(noisy);

    bool clean_ok = true;
    for (std::size_t k = 0; k < a.size(); ++k) {
        clean_ok = clean_ok && a[k].contained;
        if (k > 0) {
            clean_ok = clean_ok && a[k].err_norm >= a[k - 1].err_norm && a[k].bound_b >= a[k - 1].bound_b;
        }
    }
    bool noisy_ok = true;
    std::size_t argmin = 0;
    for (std::size_t k = 0; k < b.size(); ++k) {
        noisy_ok = noisy_ok && b[k].contained;
        if (b[k].bound_b < b[argmin].bound_b) {
            argmin = k;
        }
    }
    const bool interior = argmin > 0 && argmin + 1 < b.size();
    std::ostringstream d;
    d << "noise-free contained+monotone=" << (clean_ok ? "yes" : "no") << "; 100 dB contained="
      << (noisy_ok ? "yes" : "no") << ", bound min at alpha=" << b[argmin].alpha << " (b=" << num(b[argmin].bound_b)
      << ")";
    return {clean_ok && noisy_ok && interior, d.str()};
}

Outcome feasibility_dichotomy()
{
    const auto& art = policy_compare();
    const double robust = art.find(PolicyKind::Robust)->feasibility.max_infection_attained;
    const double mis = art.find(PolicyKind::Misestimated)->feasibility.max_infection_attained;
    const bool ok = robust <= 0.01 + kFeasibleSlack && mis > 0.01 + kInfeasibleMargin;
    return {ok, "robust max I=" + num(robust) + ", misestimated max I=" + num(mis)};
}

Outcome check_dominance(const RunArtifacts& art, std::string& detail)
{
    const ClosedLoopRun& opt = *art.find(PolicyKind::Optimal);
    const ClosedLoopRun& rob = *art.find(PolicyKind::Robust);
    double worst = 0.0;
    for (double t : knot_times(opt.trace, rob.trace)) {
        worst = std::max(worst, opt.trace.rate_at(t) - rob.trace.rate_at(t));
    }
    const SwitchingTimes& hat = rob.trace.times;
    const SwitchingTimes& star = opt.trace.times;
    const bool ordered = hat.t_b && star.t_b && star.t_h && *hat.t_b <= *star.t_b && *star.t_b <= *star.t_h &&
                         *star.t_h <= hat.t_h_or_horizon();
    detail += "max(u*-u^)=" + num(worst) + (ordered ? ", ordered" : ", ORDER VIOLATED") +
              (hat.t_h ? "" : " (t^_h beyond horizon)");
    return {worst <= kDominanceTol && ordered, ""};
}

Outcome dominance()
{
    std::string d55 = "55 dB: ";
    std::string dfig = "; fig1: ";
    const bool a = check_dominance(policy_compare(), d55).pass;
    const bool b = check_dominance(fig1(), dfig).pass;
    return {a && b, d55 + dfig};
}

Outcome pinning()
{
    double worst = 0.0;
    std::string detail;
    for (const RunArtifacts* art : {&policy_compare(), &fig1()}) {
        const ClosedLoopRun& opt = *art->find(PolicyKind::Optimal);
        const double tb = *opt.trace.times.t_b;
        const double th = *opt.trace.times.t_h;
        for (const auto& sample : opt.trajectory.samples) {
            if (sample.state.t >= tb && sample.state.t <= th) {
                worst = std::max(worst, std::abs(sample.state.i - 0.01));
            }
        }
    }
    return {worst <= kPinTol, "max |I*-Ibar| on [t*_b, t*_h]=" + num(worst) + " (tol " + num(kPinTol) + ")"};
}

Outcome gap_consistency()
{
    const CostReport& row = fig1().costs.at(1);
    if (!row.gap_direct || !row.gap_lemma4 || !row.gap_thm4 || !row.gap_upper) {
        return {false, "gap columns missing"};
    }
    const double d = *row.gap_direct;
    const double r4 = std::abs(d - *row.gap_lemma4) / d;
    const double rt = std::abs(d - *row.gap_thm4) / d;
    const bool bound = *row.gap_thm4 <= *row.gap_upper + kBoundSlack;
    std::ostringstream s;
    s << "gap=" << num(d) << ", rel lemma4=" << num(r4) << ", rel thm4=" << num(rt) << ", C=" << num(*row.gap_thm4)
      << " <= Cbar=" << num(*row.gap_upper) << (row.times.t_h ? "" : " (truncated at horizon)");
    return {d > 0.0 && r4 <= kGapRelTol && rt <= kGapRelTol && bound, s.str()};
}

Outcome collapse()
{
    double trace_dev = 0.0;
    double state_dev = 0.0;
    double gaps = 0.0;
    double interval_term = 0.0;
    for (const std::string name : {"policy-compare", "fig1"}) {
        const RunArtifacts& art = collapsed(name);
        const ClosedLoopRun& opt = *art.find(PolicyKind::Optimal);
        const ClosedLoopRun& rob = *art.find(PolicyKind::Robust);
        for (double t : knot_times(opt.trace, rob.trace)) {
            trace_dev = std::max(trace_dev, std::abs(opt.trace.rate_at(t) - rob.trace.rate_at(t)));
        }
        for (std::size_t k = 0; k < opt.trajectory.size(); ++k) {
            const SirState& a = opt.trajectory.state(k);
            const SirState& b = rob.trajectory.state(k);
            state_dev = std::max({state_dev, std::abs(a.s - b.s), std::abs(a.i - b.i), std::abs(a.r - b.r)});
        }
        const CostReport& row = art.costs.at(1);
        for (const auto& g : {row.gap_direct, row.gap_lemma4, row.gap_thm4}) {
            gaps = std::max(gaps, g ? std::abs(*g) : INFINITY);
        }
        // the bound keeps its middle term beta (S*(t_b) - S*(t_h)) (t_h - t_b); only the switching-interval term vanishes
        const double tb = *opt.trace.times.t_b;
        const double th = *opt.trace.times.t_h;
        const double middle = art.robust_params.beta * (opt.trace.state_at_tb->s - opt.trace.state_at_th->s) * (th - tb);
        interval_term = std::max(interval_term, row.gap_upper ? std::abs(*row.gap_upper - middle) : INFINITY);
    }
    const bool ok = trace_dev <= kCollapseTol && state_dev <= kCollapseTol && gaps <= kCollapseGapTol &&
                    interval_term <= kCollapseGapTol;
    return {ok, "max rate dev=" + num(trace_dev) + ", max state dev=" + num(state_dev) +
                    ", max |gap|=" + num(gaps) + ", Cbar interval term=" + num(interval_term)};
}

Outcome cumulative()
{
    double worst = -INFINITY;
    for (const RunArtifacts* art : {&policy_compare(), &fig1()}) {
        const ClosedLoopRun& opt = *art->find(PolicyKind::Optimal);
        const ClosedLoopRun& rob = *art->find(PolicyKind::Robust);
        const auto rep = cumulative_infected_check(rob.trajectory, opt.trajectory, *opt.trace.times.t_h);
        worst = std::max(worst, rep.max_violation);
    }
    return {worst <= kCumulativeTol, "max (I+R)-(I*+R*) on [0, t*_h]=" + num(worst)};
}

Outcome conservation_and_determinism()
{
    double worst = 0.0;
    for (const RunArtifacts* art : {&policy_compare(), &fig1(), &collapsed("fig1")}) {
        for (const auto& run : art->runs) {
            for (const auto& sample : run.trajectory.samples) {
                const SirState& x = sample.state;
                worst = std::max(worst, std::abs(x.s + x.i + x.r - 1.0));
            }
        }
    }
    const fs::path root = fs::temp_directory_path() / "sirctl_acceptance";
    fs::remove_all(root);
    const auto first = emit_csv(run_scenario(preset("policy-compare")), root / "a");
    emit_csv(run_scenario(preset("policy-compare")), root / "b");
    bool identical = !first.empty();
    for (const auto& f : first) {
        const fs::path twin = root / "b" / fs::relative(f, root / "a");
        identical = identical && slurp(f) == slurp(twin);
    }
    fs::remove_all(root);
    return {worst <= kConservationTol && identical,
            "max |S+I+R-1|=" + num(worst) + ", " + std::to_string(first.size()) + " CSVs " +
                (identical ? "byte-identical" : "DIFFER")};
}

} // namespace

int main()
{
    report(1, "peak-infection oracle", 5.0, peak_oracle);
    report(2, "exact recovery", 1.0, exact_recovery);
    report(3, "bound validity", 10.0, bound_validity);
    report(4, "feasibility dichotomy", 10.0, feasibility_dichotomy);
    report(5, "pointwise dominance", 0.0, dominance);
    report(6, "stage-2 pinning", 0.0, pinning);
    report(7, "gap consistency", 0.0, gap_consistency);
    report(8, "zero-at-truth collapse", 0.0, collapse);
    report(9, "cumulative-infection ordering", 0.0, cumulative);
    report(10, "conservation and determinism", 0.0, conservation_and_determinism);
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
