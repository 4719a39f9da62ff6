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
#ifndef SIRCTL_TESTS_SUPPORT_HPP
#define SIRCTL_TESTS_SUPPORT_HPP

#include "sirctl/scenario.hpp"

#include <cstdint>
#include <random>

namespace sirctl::testing {

inline Policy zero_policy()
{
    return [](double, const SirState&) { return 0.0; };
}

inline SirState start(double i0 = 1e-5)
{
    return {0.0, 1.0 - i0, i0, 0.0};
}

/// Random scenario with an outbreak: beta * S(0) > gamma + u_fix.
struct RandomOutbreak {
    EpidemicParams params;
    SirState init;
    double u_fix = 0.0;
};

inline RandomOutbreak random_outbreak(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> beta(0.1, 0.5);
    std::uniform_real_distribution<double> frac(0.05, 0.7);
    std::uniform_real_distribution<double> i0(1e-5, 1e-2);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (;;) {
        RandomOutbreak o;
        o.params.beta = beta(rng);
        o.params.gamma = o.params.beta * frac(rng);
        o.init = start(i0(rng));
        o.u_fix = o.params.beta * u(rng) * (o.init.s - o.params.gamma / o.params.beta);
        if (o.params.beta * o.init.s > o.params.gamma + o.u_fix + 0.02) {
            return o;
        }
    }
}

/// The three-policy comparison at 55 dB, computed once per test binary.
inline const RunArtifacts& policy_compare()
{
    static const RunArtifacts art = run_scenario(preset("policy-compare"));
    return art;
}

} // namespace sirctl::testing

#endif // SIRCTL_TESTS_SUPPORT_HPP
