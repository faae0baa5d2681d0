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

#ifndef DDSIM_CONFIG_H
#define DDSIM_CONFIG_H

#include <cstdint>
#include <string>
#include <vector>

#include "ddsim/noise.h"
#include "ddsim/seq_ir.h"
#include "ddsim/simkernel.h"

namespace ddsim {

/// Nominal pi-pulse length and the matching Rabi frequency at the desk operating point.
inline constexpr double kDeskPulseLength = 10e-6;
inline constexpr double kDeskRabi = kPi / kDeskPulseLength;  // 2 pi x 50 kHz
inline constexpr double kDeskTauC = 100e-6;
inline constexpr double kDeskInhomogeneity = 0.10;
/// b_rms giving an FID 1/e time of 300 us at tau_c = 100 us (analytic OU coherence).
inline constexpr double kDeskBRms = 6985.0;

struct SequenceSpec {
    Family family = Family::kCdd;
    int order = 2;
    bool symmetric = false;
    double tau = 10e-6;
    double tau_p = kDeskPulseLength;
    int n_pulses = 2;  ///< CPMG only

    bool operator==(const SequenceSpec&) const = default;
};

/// Short names such as "cdd2", "vcdd3s", "xy16s", "kdd", "kdd2", "cpmg20", "hahn", "fid".
SequenceSpec parse_sequence_spec(std::string_view text);
std::string sequence_spec_name(const SequenceSpec& spec);

/// One cycle of the spec (FID: a free evolution of length tau).
SequenceProgram build_sequence(const SequenceSpec& spec);

struct ExperimentConfig {
    SequenceSpec sequence;
    ControlErrors errors{0.0, 0.0, kDeskInhomogeneity};
    OUParams bath{kDeskBRms, kDeskTauC, 0};
    int n_traj = 10000;
    uint64_t master_seed = 1;
    int threads = 0;

    // readout
    int cycles = 0;        ///< fixed number of cycles; 0 = derived from pulse_budget or horizon
    int pulse_budget = 0;  ///< pulses to apply, rounded to whole cycles
    double horizon = 0.0;  ///< s, decay readout span
    int points = 40;       ///< time points for FID and Hahn decays

    // scans
    std::string axis = "flip";
    std::vector<double> axis_values;
    std::vector<double> taus;
    std::vector<SequenceSpec> sequences;
    std::vector<int> orders;

    std::string out;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Grid text: whitespace or comma separated numbers, or "lin:a:b:n" / "log:a:b:n".
std::vector<double> parse_grid(std::string_view text);

/// Sectioned key = value text ([sequence], [errors], [bath], [run], [scan], [output]).
/// Keys not listed here are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string format_config(const ExperimentConfig& config);

/// Structural checks: grids nonempty and strictly increasing where present.
void validate(const ExperimentConfig& config);

}  // namespace ddsim

#endif
