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
#include "support.hpp"

#include "sirctl/errors.hpp"
#include "sirctl/estimation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sirctl;
using sirctl::testing::start;
using sirctl::testing::zero_policy;

namespace {

const EpidemicParams kParams{0.16, 1.0 / 30.0};

MeasuredSample measure(const SirState& x, double u = 0.0)
{
    return {x.t, x.s, x.i, u};
}

/// Batch whose four samples come from single Euler steps of the model itself.
RegressionBatch euler_batch(const EpidemicParams& p, const SirState& xi, const SirState& xj, double h, double ui,
                            double uj)
{
    const SirState xi1 = euler_step(xi, p, ui, h);
    const SirState xj1 = euler_step(xj, p, uj, h);
    return build_regressor_batch(measure(xi, ui), measure(xi1, ui), measure(xj, uj), measure(xj1, uj), h);
}

/// Open-loop record of the estimation example on a 0.01 grid.
const Trajectory& record()
{
    static const Trajectory traj = integrate(kParams, zero_policy(), start(), {Method::RungeKutta4, 0.01, 110.0});
    return traj;
}

RegressionBatch record_batch(int alpha)
{
    const Trajectory& r = record();
    const auto a = static_cast<std::size_t>(alpha);
    return build_regressor_batch(measure(r.state(8000)), measure(r.state(8000 + a)), measure(r.state(9000)),
                                 measure(r.state(9000 + a)), 0.01 * alpha);
}

double f_norm(const SirState& x)
{
    const Derivative d = rhs(x, kParams, 0.0);
    return std::sqrt(d.ds * d.ds + d.di * d.di + d.dr * d.dr);
}

} // namespace

TEST_CASE("exact recovery from Euler-generated samples")
{
    const RegressionBatch batch =
        euler_batch(kParams, {0.0, 0.9, 0.05, 0.05}, {1.0, 0.7, 0.08, 0.22}, 0.01, 0.0, 0.0);
    const ParamEstimate est = estimate_params(batch);
    CHECK(std::abs(est.beta_hat - kParams.beta) <= 1e-10);
    CHECK(std::abs(est.gamma_hat - kParams.gamma) <= 1e-10);
    // L = Theta Z h exactly
    const Eigen::RowVector2d lhs = kParams.beta * batch.z.row(0) - kParams.gamma * batch.z.row(1);
    CHECK((batch.l - Eigen::RowVector2d(kParams.beta, kParams.gamma) * batch.z * batch.h).norm() <= 1e-15);
    CHECK(lhs.size() == 2);
}

TEST_CASE("property: exact recovery with control and random states")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const EpidemicParams p{0.05 + 0.5 * unit(rng), 0.01 + 0.2 * unit(rng)};
        auto state = [&](double t) {
            const double s = 0.2 + 0.7 * unit(rng);
            const double i = 0.01 + (1.0 - s - 0.01) * 0.5 * unit(rng);
            return SirState{t, s, i, 1.0 - s - i};
        };
        const double h = 0.01 + 0.5 * unit(rng);
        const RegressionBatch batch = euler_batch(p, state(3.0), state(9.0), h, 0.2 * unit(rng), 0.2 * unit(rng));
        if (gram_min_eigenvalue(batch) < 1e-8) {
            continue;
        }
        const ParamEstimate est = estimate_params(batch);
        CHECK(std::hypot(est.beta_hat - p.beta, est.gamma_hat - p.gamma) <= 1e-10);
    }
}

TEST_CASE("regressor batch validation")
{
    const SirState x{0.0, 0.9, 0.05, 0.05};
    const SirState y{1.0, 0.8, 0.06, 0.14};
    const SirState x_late{0.02, 0.9, 0.05, 0.05};
    const SirState y_late{1.01, 0.8, 0.06, 0.14};
    CHECK_THROWS_AS(build_regressor_batch(measure(x), measure(x_late), measure(y), measure(y_late), 0.01),
                    InvalidArgument);
    CHECK_THROWS_AS(build_regressor_batch(measure(x), measure(x_late), measure(x), measure(x_late), 0.02),
                    InvalidArgument);
}

TEST_CASE("zero infections at both base times make the regressors singular")
{
    const SirState a{0.0, 0.9, 0.0, 0.1};
    const SirState a1{0.5, 0.9, 0.0, 0.1};
    const SirState b{2.0, 0.8, 0.0, 0.2};
    const SirState b1{2.5, 0.8, 0.0, 0.2};
    const RegressionBatch batch = build_regressor_batch(measure(a), measure(a1), measure(b), measure(b1), 0.5);
    CHECK_THROWS_AS(estimate_params(batch), SingularRegressors);
}

TEST_CASE("estimation on the open-loop wave at windows 80 and 90")
{
    const RegressionBatch fine = record_batch(1);
    CHECK(gram_min_eigenvalue(fine) > 0.0);
    const ParamEstimate e1 = estimate_params(fine);
    const ParamEstimate e200 = estimate_params(record_batch(200));
    const double err1 = std::hypot(e1.beta_hat - kParams.beta, e1.gamma_hat - kParams.gamma);
    const double err200 = std::hypot(e200.beta_hat - kParams.beta, e200.gamma_hat - kParams.gamma);
    CHECK(err1 < 1e-3);
    CHECK(err200 > 10.0 * err1);
}

TEST_CASE("lipschitz constant")
{
    CHECK(lipschitz_constant({0.0, 0.0}, 1.0, 0.1, 0.0) == 0.0);
    CHECK(lipschitz_constant(kParams, 1.0, 0.1, 0.0) == doctest::Approx(0.77067).epsilon(1e-5));
    CHECK_THROWS_AS(lipschitz_constant(kParams, -1.0, 0.1, 0.0), InvalidArgument);
}

TEST_CASE("discretization error bound")
{
    CHECK(discretization_error_bound(1.0, 0.055, 0.05) == doctest::Approx(0.00291).epsilon(1e-3));
    CHECK(discretization_error_bound(0.0, 0.055, 0.05) == 0.0);
    const double a = discretization_error_bound(1e-3, 0.055, 0.05);
    const double b = discretization_error_bound(2e-3, 0.055, 0.05);
    CHECK(b / a == doctest::Approx(4.0).epsilon(1e-3));
    CHECK_THROWS_AS(discretization_error_bound(20.0, 0.055, 0.05), InvalidArgument);
    CHECK_THROWS_AS(discretization_error_bound(1.0 / 0.055, 0.055, 0.05), InvalidArgument);
}

TEST_CASE("one Euler step stays within the discretization bound of the true flow")
{
    const Trajectory& r = record();
    // zeta from the Jacobian bound with the largest state norm, valid for every h below 1/zeta
    const double zeta = lipschitz_constant(kParams, 1.0, 0.1, 0.0);
    for (int alpha = 1; alpha <= 120; alpha += 7) {
        const double h = 0.01 * alpha;
        for (std::size_t base : {std::size_t{8000}, std::size_t{9000}}) {
            const auto a = static_cast<std::size_t>(alpha);
            double f_max = 0.0;
            for (std::size_t k = base; k <= base + a; ++k) {
                f_max = std::max(f_max, f_norm(r.state(k)));
            }
            const SirState euler = euler_step(r.state(base), kParams, 0.0, h);
            const SirState& flow = r.state(base + a);
            const double gap = std::sqrt(std::pow(euler.s - flow.s, 2) + std::pow(euler.i - flow.i, 2) +
                                         std::pow(euler.r - flow.r, 2));
            CHECK(gap <= discretization_error_bound(h, zeta, f_max));
        }
    }
}

TEST_CASE("error bound terms")
{
    BoundInputs in;
    in.h = 0.5;
    in.zeta = 0.055;
    in.f_max = 0.01;
    in.v_max = 0.0;
    in.c = 0.3;
    in.lambda_min = 1e-3;
    const BoundTerms t0 = error_bound_terms(in);
    CHECK(t0.noise_difference == 0.0);
    CHECK(t0.noise_coupling == 0.0);
    CHECK(error_bound_b(in) == doctest::Approx(2 * 0.5 * 0.055 * 0.01 / (std::sqrt(1e-3) * (1 - 0.0275))));

    in.v_max = 1e-4;
    const BoundTerms t1 = error_bound_terms(in);
    CHECK(t1.noise_difference == doctest::Approx(4e-4 / (0.5 * std::sqrt(1e-3))));
    CHECK(t1.noise_coupling == doctest::Approx(1e-4 * 0.3 / std::sqrt(1e-3)));
    CHECK(t1.total() == doctest::Approx(t1.discretization + t1.noise_difference + t1.noise_coupling));

    in.lambda_min = 0.0;
    CHECK_THROWS_AS(error_bound_b(in), InvalidArgument);
    in.lambda_min = 1e-3;
    in.h = 20.0;
    CHECK_THROWS_AS(error_bound_b(in), InvalidArgument);
}

TEST_CASE("noise-free bound is strictly increasing in h")
{
    BoundInputs in;
    in.zeta = 0.055;
    in.f_max = 0.01;
    in.lambda_min = 1e-3;
    double prev = -1.0;
    for (double h = 0.01; h < 1.0 / 0.055; h += 0.25) {
        in.h = h;
        const double b = error_bound_b(in);
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("composite constant")
{
    const MeasuredSample a{0.0, 0.9, 0.01, 0.0};
    const MeasuredSample b{1.0, 0.8, 0.02, 0.0};
    const double c = composite_constant(kParams, a, b, 0.001, 0.1);
    CHECK(c == doctest::Approx(0.2 + 2.0 / 30.0 + 0.16 * (0.9 + 0.8 + 0.002 + 0.01 + 0.02)));
}

TEST_CASE("parameter intervals")
{
    const ParamIntervals iv = param_intervals({0.16, 1.0 / 30.0}, 0.01);
    CHECK(iv.beta_lo == doctest::Approx(0.15));
    CHECK(iv.beta_hi == doctest::Approx(0.17));
    CHECK(iv.gamma_lo == doctest::Approx(0.02333).epsilon(1e-4));
    CHECK(iv.gamma_hi == doctest::Approx(0.04333).epsilon(1e-4));
    CHECK(iv.beta_hi - iv.beta_lo == doctest::Approx(0.02));
    CHECK(iv.gamma_hi - iv.gamma_lo == doctest::Approx(0.02));
    CHECK(iv.beta_max() == iv.beta_hi);
    CHECK(iv.gamma_min() == iv.gamma_lo);

    const ParamIntervals point = param_intervals({0.2, 0.1}, 0.0);
    CHECK(point.beta_lo == 0.2);
    CHECK(point.beta_hi == 0.2);
    CHECK(point.gamma_lo == 0.1);
    CHECK(point.contains({0.2, 0.1}));
    CHECK_FALSE(point.contains({0.2, 0.11}));
    CHECK_THROWS_AS(param_intervals({0.2, 0.1}, -1.0), InvalidArgument);
}

TEST_CASE("decomposition identity: estimate error equals (E + W) Z^T (Z Z^T)^-1 / h")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> small(-1e-4, 1e-4);
    const RegressionBatch clean = record_batch(10);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::RowVector2d e(small(rng), small(rng));
        const Eigen::RowVector2d w(small(rng), small(rng));
        RegressionBatch batch = clean;
        batch.l = Eigen::RowVector2d(kParams.beta, kParams.gamma) * batch.z * batch.h + e + w;
        const ParamEstimate est = estimate_params(batch);
        const Eigen::RowVector2d direct = est.theta() - Eigen::RowVector2d(kParams.beta, kParams.gamma);
        CHECK((direct - error_from_residuals(batch, e, w)).norm() <= 1e-10);
    }
}

TEST_CASE("lambda_min equals the inverse squared norm of the pseudo-inverse")
{
    for (int alpha : {1, 10, 100}) {
        const RegressionBatch batch = record_batch(alpha);
        const double n = pseudo_inverse_norm(batch);
        CHECK(gram_min_eigenvalue(batch) == doctest::Approx(1.0 / (n * n)).epsilon(1e-9));
    }
}

TEST_CASE("negative estimates are returned and flagged")
{
    RegressionBatch batch = record_batch(1);
    batch.l = Eigen::RowVector2d(-0.1, 0.05) * batch.z * batch.h;
    const ParamEstimate est = estimate_params(batch);
    CHECK(est.beta_hat == doctest::Approx(-0.1));
    CHECK(est.has_negative());
}
