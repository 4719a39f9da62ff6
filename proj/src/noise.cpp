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
#include "sirctl/noise.hpp"

#include "sirctl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace sirctl {

void NoiseConfig::validate() const
{
    switch (kind) {
    case NoiseKind::None:
        return;
    case NoiseKind::SnrDb:
        if (!std::isfinite(snr_db)) {
            throw InvalidArgument("snr_db must be finite");
        }
        return;
    case NoiseKind::ScaledVariance:
        if (!(std::isfinite(divisor) && divisor > kTruncationSigmas)) {
            throw InvalidArgument("noise divisor must exceed 3");
        }
        return;
    }
}

bool NoiseLevels::silent() const
{
    return kind == NoiseKind::None || (sigma_s == 0.0 && sigma_i == 0.0 && rel == 0.0);
}

NoiseAmplitude NoiseLevels::amplitude() const
{
    NoiseAmplitude a;
    if (kind == NoiseKind::SnrDb) {
        a.delta_s = kTruncationSigmas * sigma_s;
        a.delta_i = kTruncationSigmas * sigma_i;
    } else if (kind == NoiseKind::ScaledVariance) {
        a.rel_s = kTruncationSigmas * rel;
        a.rel_i = kTruncationSigmas * rel;
    }
    return a;
}

double NoiseLevels::v_max() const
{
    if (kind == NoiseKind::SnrDb) {
        return kTruncationSigmas * std::max(sigma_s, sigma_i);
    }
    if (kind == NoiseKind::ScaledVariance) {
        return kTruncationSigmas * rel;
    }
    return 0.0;
}

NoiseLevels resolve_noise(const NoiseConfig& config, const Trajectory& reference)
{
    config.validate();
    NoiseLevels levels;
    levels.kind = config.kind;
    if (config.kind == NoiseKind::SnrDb) {
        if (reference.empty()) {
            throw InvalidArgument("SNR noise needs a non-empty reference trajectory");
        }
        double ps = 0.0;
        double pi = 0.0;
        for (const auto& sample : reference.samples) {
            ps += sample.state.s * sample.state.s;
            pi += sample.state.i * sample.state.i;
        }
        const double n = static_cast<double>(reference.size());
        const double ratio = std::pow(10.0, config.snr_db / 10.0);
        levels.sigma_s = std::sqrt(ps / n / ratio);
        levels.sigma_i = std::sqrt(pi / n / ratio);
    } else if (config.kind == NoiseKind::ScaledVariance) {
        levels.rel = 1.0 / config.divisor;
    }
    return levels;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
    // splitmix64 finalizer over the combined key
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

GaussianChannel::GaussianChannel(NoiseLevels levels, std::uint64_t seed)
    : levels_(levels)
    , rng_(seed)
{
}

double GaussianChannel::draw(double sigma)
{
    if (!(sigma > 0.0)) {
        return 0.0;
    }
    for (;;) {
        const double z = normal_(rng_);
        if (std::abs(z) <= kTruncationSigmas) {
            return sigma * z;
        }
    }
}

NoiseSample GaussianChannel::operator()(std::size_t /*epoch*/, const SirState& truth)
{
    NoiseSample v;
    if (levels_.kind == NoiseKind::SnrDb) {
        v.v_s = draw(levels_.sigma_s);
        v.v_i = draw(levels_.sigma_i);
    } else if (levels_.kind == NoiseKind::ScaledVariance) {
        v.v_s = draw(levels_.rel * truth.s);
        v.v_i = draw(levels_.rel * truth.i);
    }
    return v;
}

MeasurementChannel make_channel(const NoiseLevels& levels, std::uint64_t seed)
{
    if (levels.silent()) {
        return {};
    }
    auto channel = std::make_shared<GaussianChannel>(levels, seed);
    return [channel](std::size_t epoch, const SirState& truth) { return (*channel)(epoch, truth); };
}

std::vector<MeasuredSample> inject_noise(const Trajectory& traj, const NoiseLevels& levels, std::uint64_t seed)
{
    GaussianChannel channel(levels, seed);
    std::vector<MeasuredSample> out;
    out.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const SirState& x = traj.samples[k].state;
        const NoiseSample v = levels.silent() ? NoiseSample{} : channel(k, x);
        out.push_back({x.t, x.s + v.v_s, x.i + v.v_i, traj.samples[k].u});
    }
    return out;
}

std::vector<MeasuredSample> inject_noise(const Trajectory& traj, const NoiseConfig& config, std::uint64_t seed)
{
    return inject_noise(traj, resolve_noise(config, traj), seed);
}

} // namespace sirctl
