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

#ifndef DDSIM_SIMKERNEL_H
#define DDSIM_SIMKERNEL_H

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddsim/noise.h"
#include "ddsim/seq_ir.h"

namespace ddsim {

using Unitary = Eigen::Matrix2cd;
using Spinor = Eigen::Vector2cd;
using Bloch = Eigen::Vector3d;

struct ControlErrors {
    double flip_fraction = 0.0;      ///< pulse angles scale by (1 + flip_fraction)
    double offset = 0.0;             ///< rad/s, detuning during pulses and delays
    double inhomogeneity_rms = 0.0;  ///< spread of flip_fraction drawn once per trajectory

    bool operator==(const ControlErrors&) const = default;
};

void validate(const ControlErrors& errors);

enum class InitAxis { kX, kY };
enum class SampleAt { kCycleBoundaries, kEveryEvent };

/// exp(-i t h.S) with S = sigma / 2.
Unitary su2_exp(const Eigen::Vector3d& h, double t);

/// Delay with accumulated z phase phi = integral of (offset + b_z).
Unitary delay_propagator(double phi);

/// Pulse starting at t0. Noise comes from `noise` (may be null for none); `noise_step` bounds
/// the substep length. Zero-duration pulses are instantaneous rotations by angle (1 + eps).
Unitary pulse_propagator(const PulseEvent& pulse, double eps, double offset, const NoiseTrajectory* noise,
                         double t0, double noise_step);

/// Cycle propagator under a static field (rad/s, lab frame) with optional flip error.
Unitary static_unitary(const SequenceProgram& program, const Eigen::Vector3d& field, const ControlErrors& errors = {});

/// Noise-free, error-free propagator of one cycle.
Unitary ideal_unitary(const SequenceProgram& program);

/// min over alpha of the Frobenius norm of U - e^{i alpha} V.
double phase_min_deviation(const Unitary& u, const Unitary& v);

Bloch to_bloch(const Spinor& psi);
Spinor spinor_for(InitAxis axis);
Bloch bloch_for(InitAxis axis);
/// Rotation of Bloch vectors induced by U.
Eigen::Matrix3d rotation_of(const Unitary& u);

struct EvolutionSample {
    double time = 0.0;
    Bloch state;
};

/// Runs `cycles` back-to-back copies of `program` through `noise` starting at t = 0. Records the
/// initial state and then either every cycle end or every event end.
std::vector<EvolutionSample> evolve(const SequenceProgram& program, const NoiseTrajectory& noise,
                                    const ControlErrors& errors, const Bloch& init, SampleAt sample_at,
                                    int cycles = 1);

struct DecayCurve {
    std::vector<double> times;
    std::vector<double> signal_mean;
    std::vector<double> signal_stderr;
    int n_traj = 0;
    std::string digest;
};

struct EnsembleOptions {
    int n_traj = 100;
    uint64_t master_seed = 1;
    int threads = 0;  ///< 0 = hardware concurrency
};

/// Signal at t = 0 and after each of `cycles` repetitions of `program`. The signal is the
/// projection of the Bloch vector onto the noise-free, error-free image of the initial axis.
DecayCurve ensemble_signal(const SequenceProgram& program, int cycles, const OUParams& ou,
                           const ControlErrors& errors, InitAxis axis, const EnsembleOptions& options);

/// One point per program (time = its cycle time), every program driven by the same noise path
/// within a trajectory. Used for Hahn and FID decays where tau changes with the time point.
DecayCurve ensemble_signal(const std::vector<SequenceProgram>& points, const OUParams& ou,
                           const ControlErrors& errors, InitAxis axis, const EnsembleOptions& options);

/// exp(-b^2 tau_c^2 (t / tau_c - 1 + e^{-t / tau_c})).
double ou_fid_coherence(const OUParams& ou, double t);

/// max over fields of 1 - |Tr(U_A^dag U_B)| / 2. Both programs must use instantaneous pulses.
double ideal_equivalence(const SequenceProgram& a, const SequenceProgram& b,
                         const std::vector<Eigen::Vector3d>& static_fields);

/// Three columns `t signal stderr`.
std::string export_curve(const DecayCurve& curve);

/// Noise grid spacing used by the ensemble runners.
double noise_dt(const OUParams& ou);

}  // namespace ddsim

#endif
