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
#include "sirctl/estimation.hpp"

#include "sirctl/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace sirctl {

namespace {

bool same_time(double a, double b)
{
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

Eigen::Vector2d gram_eigenvalues(const RegressionBatch& batch)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(batch.gram(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues(); // ascending
}

void require_regular(const RegressionBatch& batch)
{
    if (!(batch.h > 0.0)) {
        throw InvalidArgument("regression batch has non-positive h");
    }
    const Eigen::Vector2d ev = gram_eigenvalues(batch);
    if (!(ev(1) > 0.0) || !(ev(0) > kSingularityRatio * ev(1))) {
        throw SingularRegressors("Z Z^T is singular (lambda_min=" + std::to_string(ev(0)) +
                                 ", lambda_max=" + std::to_string(ev(1)) + ")");
    }
}

Eigen::Matrix2d right_pseudo_inverse(const RegressionBatch& batch)
{
    // Z^T (Z Z^T)^{-1}; the Gram matrix is symmetric so (G^{-1} Z)^T is the same thing
    const Eigen::Matrix2d g = batch.gram();
    return g.ldlt().solve(batch.z).transpose();
}

} // namespace

void BoundInputs::validate() const
{
    for (double v : {h, zeta, f_max, v_max, u_max_local, x_max, r, c}) {
        if (!(std::isfinite(v) && v >= 0.0)) {
            throw InvalidArgument("bound inputs must be finite and non-negative");
        }
    }
    if (!(h > 0.0)) {
        throw InvalidArgument("sample step h must be positive");
    }
    if (!(lambda_min > 0.0)) {
        throw InvalidArgument("lambda_min must be positive");
    }
    if (!(zeta * h < 1.0)) {
        throw InvalidArgument("zeta * h must be below 1 for the discretization bound to hold");
    }
}

bool ParamIntervals::contains(const EpidemicParams& truth) const
{
    return truth.beta >= beta_lo && truth.beta <= beta_hi && truth.gamma >= gamma_lo && truth.gamma <= gamma_hi;
}

RegressionBatch build_regressor_batch(const MeasuredSample& at_i, const MeasuredSample& at_i_plus_h,
                                      const MeasuredSample& at_j, const MeasuredSample& at_j_plus_h, double h)
{
    if (!(h > 0.0)) {
        throw InvalidArgument("sample step h must be positive");
    }
    if (!same_time(at_i_plus_h.t, at_i.t + h) || !same_time(at_j_plus_h.t, at_j.t + h)) {
        throw InvalidArgument("sample time stamps are not h apart");
    }
    if (same_time(at_i.t, at_j.t)) {
        throw InvalidArgument("base times i and j must differ");
    }

    auto l_of = [h](const MeasuredSample& now, const MeasuredSample& next) {
        return next.i_hat - now.i_hat + h * now.u * now.i_hat;
    };
    RegressionBatch batch;
    batch.h = h;
    batch.t_i = at_i.t;
    batch.t_j = at_j.t;
    batch.l << l_of(at_i, at_i_plus_h), l_of(at_j, at_j_plus_h);
    batch.z << at_i.s_hat * at_i.i_hat, at_j.s_hat * at_j.i_hat,
               -at_i.i_hat, -at_j.i_hat;
    return batch;
}

double gram_min_eigenvalue(const RegressionBatch& batch)
{
    return gram_eigenvalues(batch)(0);
}

double pseudo_inverse_norm(const RegressionBatch& batch)
{
    require_regular(batch);
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(right_pseudo_inverse(batch));
    return svd.singularValues()(0);
}

ParamEstimate estimate_params(const RegressionBatch& batch)
{
    require_regular(batch);
    const Eigen::RowVector2d theta = batch.l * right_pseudo_inverse(batch) / batch.h;
    return {theta(0), theta(1)};
}

Eigen::RowVector2d error_from_residuals(const RegressionBatch& batch, const Eigen::RowVector2d& e,
                                        const Eigen::RowVector2d& w)
{
    require_regular(batch);
    return (e + w) * right_pseudo_inverse(batch) / batch.h;
}

double lipschitz_constant(const EpidemicParams& params_guess, double x_max, double r, double u_max_local)
{
    for (double v : {params_guess.beta, params_guess.gamma, x_max, r, u_max_local}) {
        if (!(std::isfinite(v) && v >= 0.0)) {
            throw InvalidArgument("lipschitz_constant inputs must be non-negative");
        }
    }
    return 4.0 * params_guess.beta * (x_max + r) + 2.0 * u_max_local + 2.0 * params_guess.gamma;
}

double discretization_error_bound(double h, double zeta, double f_norm)
{
    if (!(h >= 0.0 && zeta >= 0.0 && f_norm >= 0.0)) {
        throw InvalidArgument("discretization bound inputs must be non-negative");
    }
    if (!(zeta * h < 1.0)) {
        throw InvalidArgument("zeta * h must be below 1");
    }
    return h * h * zeta * f_norm / (1.0 - zeta * h);
}

double composite_constant(const EpidemicParams& params_guess, const MeasuredSample& at_i,
                          const MeasuredSample& at_j, double v_max, double u_max_local)
{
    return 2.0 * u_max_local + 2.0 * params_guess.gamma +
           params_guess.beta * (at_i.s_hat + at_j.s_hat + 2.0 * v_max + at_i.i_hat + at_j.i_hat);
}

BoundTerms error_bound_terms(const BoundInputs& inputs)
{
    inputs.validate();
    const double root = std::sqrt(inputs.lambda_min);
    BoundTerms terms;
    terms.discretization = 2.0 * inputs.h * inputs.zeta * inputs.f_max / (root * (1.0 - inputs.zeta * inputs.h));
    terms.noise_difference = 4.0 * inputs.v_max / (inputs.h * root);
    terms.noise_coupling = inputs.v_max * inputs.c / root;
    return terms;
}

double error_bound_b(const BoundInputs& inputs)
{
    return error_bound_terms(inputs).total();
}

ParamIntervals param_intervals(const ParamEstimate& est, double b)
{
    if (!(b >= 0.0)) {
        throw InvalidArgument("bound b must be non-negative");
    }
    ParamIntervals iv;
    iv.b = b;
    iv.beta_hat = est.beta_hat;
    iv.gamma_hat = est.gamma_hat;
    iv.beta_lo = est.beta_hat - b;
    iv.beta_hi = est.beta_hat + b;
    iv.gamma_lo = est.gamma_hat - b;
    iv.gamma_hi = est.gamma_hat + b;
    return iv;
}

} // namespace sirctl
