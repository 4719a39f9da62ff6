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
#ifndef SIRCTL_NOISE_HPP
#define SIRCTL_NOISE_HPP

#include "sirctl/control.hpp"
#include "sirctl/estimation.hpp"
#include "sirctl/sir.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace sirctl {

enum class NoiseKind {
    None,
    SnrDb,          ///< constant sigma per series from a target signal-to-noise ratio
    ScaledVariance, ///< sigma proportional to the current state: sigma = x / divisor
};

struct NoiseConfig {
    NoiseKind kind = NoiseKind::None;
    double snr_db = 0.0;
    double divisor = 100.0;

    void validate() const;
};

/// Gaussian noise is truncated at this many standard deviations.
inline constexpr double kTruncationSigmas = 3.0;

/// Per-series noise scale resolved against a noise-free reference series.
struct NoiseLevels {
    NoiseKind kind = NoiseKind::None;
    double sigma_s = 0.0; ///< SnrDb only
    double sigma_i = 0.0; ///< SnrDb only
    double rel = 0.0;     ///< ScaledVariance only: sigma = rel * x

    bool silent() const;
    /// Amplitude bound implied by the truncation, for envelope construction.
    NoiseAmplitude amplitude() const;
    /// Largest possible |v| for states bounded by 1 (the v_max of the error bound).
    double v_max() const;
};

/// Mean power of S and I over the reference sets sigma^2 = power / 10^(snr/10).
NoiseLevels resolve_noise(const NoiseConfig& config, const Trajectory& reference);

/// Derives an independent stream seed from a base seed and a stream id.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Truncated Gaussian measurement channel; deterministic for a given seed.
class GaussianChannel {
public:
    GaussianChannel(NoiseLevels levels, std::uint64_t seed);

    NoiseSample operator()(std::size_t epoch, const SirState& truth);

private:
    double draw(double sigma);

    NoiseLevels levels_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Builds a measurement channel for the closed loop; empty for silent levels.
MeasurementChannel make_channel(const NoiseLevels& levels, std::uint64_t seed);

/// Measured (S, I) for every sample of `traj`, using the trajectory itself as the SNR reference.
std::vector<MeasuredSample> inject_noise(const Trajectory& traj, const NoiseConfig& config, std::uint64_t seed);

/// Same with explicit noise levels.
std::vector<MeasuredSample> inject_noise(const Trajectory& traj, const NoiseLevels& levels, std::uint64_t seed);

} // namespace sirctl

#endif // SIRCTL_NOISE_HPP
