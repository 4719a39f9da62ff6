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
#ifndef SIRCTL_ESTIMATION_HPP
#define SIRCTL_ESTIMATION_HPP

#include "sirctl/sir.hpp"

#include <Eigen/Core>

namespace sirctl {

/// Noisy observation of (S, I) at time t, with the rate held over [t, t + h).
struct MeasuredSample {
    double t = 0.0;
    double s_hat = 0.0;
    double i_hat = 0.0;
    double u = 0.0;
};

/// Two-point regression batch: L = Theta * Z * h + E + W.
///
/// Column k of Z is z(t_k) = [s_hat * i_hat, -i_hat]^T and
/// l(t_k) = i_hat(t_k + h) - i_hat(t_k) + h * u(t_k) * i_hat(t_k).
struct RegressionBatch {
    Eigen::RowVector2d l = Eigen::RowVector2d::Zero();
    Eigen::Matrix2d z = Eigen::Matrix2d::Zero();
    double h = 0.0;
    double t_i = 0.0;
    double t_j = 0.0;

    Eigen::Matrix2d gram() const { return z * z.transpose(); }
};

struct ParamEstimate {
    double beta_hat = 0.0;
    double gamma_hat = 0.0;

    /// Noise can drive an estimate below zero; such estimates are kept and flagged.
    bool has_negative() const { return beta_hat < 0.0 || gamma_hat < 0.0; }
    Eigen::RowVector2d theta() const { return {beta_hat, gamma_hat}; }
};

/// Quantities entering the estimation error bound b.
struct BoundInputs {
    double h = 0.0;
    double zeta = 0.0;         ///< Lipschitz constant of the dynamics near the samples
    double f_max = 0.0;        ///< max ||f(x, u)|| over the two sample windows
    double v_max = 0.0;        ///< bound on |measurement error| over the eight samples
    double u_max_local = 0.0;  ///< max |u| at the two base times
    double x_max = 0.0;        ///< max ||x|| at the two base times
    double r = 0.0;            ///< radius of the Lipschitz ball
    double c = 0.0;            ///< see composite_constant()
    double lambda_min = 0.0;   ///< smallest eigenvalue of Z Z^T

    void validate() const;
};

/// The three additive parts of b: sampling, noise differencing, noise coupling.
struct BoundTerms {
    double discretization = 0.0;
    double noise_difference = 0.0;
    double noise_coupling = 0.0;

    double total() const { return discretization + noise_difference + noise_coupling; }
};

/// [beta_hat - b, beta_hat + b] x [gamma_hat - b, gamma_hat + b].
struct ParamIntervals {
    double b = 0.0;
    double beta_hat = 0.0;
    double gamma_hat = 0.0;
    double beta_lo = 0.0;
    double beta_hi = 0.0;
    double gamma_lo = 0.0;
    double gamma_hi = 0.0;

    double beta_max() const { return beta_hi; }
    double gamma_min() const { return gamma_lo; }
    bool contains(const EpidemicParams& truth) const;
};

/// Relative eigenvalue floor below which Z Z^T counts as singular.
inline constexpr double kSingularityRatio = 1e-12;

/// Assembles L and Z from the two sample pairs (t_i, t_i + h) and (t_j, t_j + h).
/// Throws InvalidArgument on inconsistent time stamps or t_i == t_j.
RegressionBatch build_regressor_batch(const MeasuredSample& at_i, const MeasuredSample& at_i_plus_h,
                                      const MeasuredSample& at_j, const MeasuredSample& at_j_plus_h, double h);

/// Smallest eigenvalue of the symmetric Gram matrix Z Z^T.
double gram_min_eigenvalue(const RegressionBatch& batch);

/// ||Z^T (Z Z^T)^{-1}||, the spectral norm of the right pseudo-inverse.
double pseudo_inverse_norm(const RegressionBatch& batch);

/// Closed-form least squares Theta_hat = L Z^T (Z Z^T)^{-1} / h.
/// Throws SingularRegressors when lambda_min(Z Z^T) <= kSingularityRatio * lambda_max.
ParamEstimate estimate_params(const RegressionBatch& batch);

/// Reconstructs Theta_hat - Theta = (E + W) Z^T (Z Z^T)^{-1} / h from known error rows.
Eigen::RowVector2d error_from_residuals(const RegressionBatch& batch, const Eigen::RowVector2d& e,
                                        const Eigen::RowVector2d& w);

/// 4 beta (x_max + r) + 2 u_max + 2 gamma, a bound on the Jacobian norm in the ball.
double lipschitz_constant(const EpidemicParams& params_guess, double x_max, double r, double u_max_local);

/// One-step Euler error bound h^2 zeta ||f|| / (1 - zeta h). Throws InvalidArgument if zeta h >= 1.
double discretization_error_bound(double h, double zeta, double f_norm);

/// c = 2 u_max + 2 gamma + beta (S_i + S_j + 2 v_max + I_i + I_j), using measured base-time values.
double composite_constant(const EpidemicParams& params_guess, const MeasuredSample& at_i,
                          const MeasuredSample& at_j, double v_max, double u_max_local);

BoundTerms error_bound_terms(const BoundInputs& inputs);

/// The estimation error bound b; throws InvalidArgument for lambda_min <= 0 or zeta h >= 1.
double error_bound_b(const BoundInputs& inputs);

ParamIntervals param_intervals(const ParamEstimate& est, double b);

} // namespace sirctl

#endif // SIRCTL_ESTIMATION_HPP
