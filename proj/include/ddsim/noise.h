// Copyright 2026 The ddsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DDSIM_NOISE_H
#define DDSIM_NOISE_H

#include <cstdint>
#include <string>
#include <vector>

namespace ddsim {

/// Stationary Ornstein-Uhlenbeck dephasing field.
struct OUParams {
    double b_rms = 0.0;  ///< rad/s, stationary standard deviation
    double tau_c = 1e-4; ///< s
    uint64_t seed = 0;

    bool operator==(const OUParams&) const = default;
};

void validate(const OUParams& params);

/// Lorentzian power spectral density 2 b^2 tau_c / (1 + w^2 tau_c^2).
double ou_psd(const OUParams& params, double omega);

/// Sampled field b_z(t). Between samples the field is the linear interpolant.
struct NoiseTrajectory {
    std::vector<double> times;
    std::vector<double> values;
    OUParams params;

    double end_time() const { return times.back(); }
    /// Integral of the interpolant over [t0, t1]; throws RangeError outside the sampled span.
    double integral(double t0, double t1) const;
    double mean(double t0, double t1) const;

    std::vector<double> cumulative;  ///< running integral at each sample
};

/// Builds a trajectory from samples (times strictly increasing, values finite).
NoiseTrajectory make_trajectory(std::vector<double> times, std::vector<double> values, OUParams params = {});

/// Constant field b over [0, duration].
NoiseTrajectory constant_trajectory(double b, double duration);

/// Exact-discretization OU path on the grid k*dt, covering at least [0, duration].
/// Requires 0 < dt <= tau_c / 10.
NoiseTrajectory ou_trajectory(const OUParams& params, double duration, double dt);

/// Seed for item `index` of stream `stream` under `master` (splitmix64 finalizer chain).
uint64_t derive_seed(uint64_t master, uint64_t index, uint64_t stream = 0);

/// Two columns `t b`.
std::string export_trajectory(const NoiseTrajectory& trajectory);

}  // namespace ddsim

#endif
