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

#ifndef DDSIM_HARNESS_H
#define DDSIM_HARNESS_H

#include <map>
#include <string>
#include <vector>

#include "ddsim/config.h"
#include "ddsim/simkernel.h"

namespace ddsim {

inline constexpr const char* kVersion = "ddsim 0.1.0";

/// Whole cycles closest to `budget` pulses (at least one). Throws InvalidParameter when the
/// budget is smaller than one cycle.
int cycles_for_budget(const SequenceProgram& cycle, int budget);

/// FID and Hahn: `points` equally spaced times up to the horizon, plus t = 0.
/// Other families: signal at every cycle boundary, for `cycles`, the pulse budget or the horizon.
DecayCurve run_decay(const ExperimentConfig& config);

struct T1e {
    double value = 0.0;        ///< s
    double uncertainty = 0.0;  ///< s, from the stderr of the two bracketing samples
    bool lower_bound = false;  ///< no crossing: value is the last sampled time
};

/// First 1/e crossing of the mean, log-linear between the bracketing samples.
T1e extract_t1e(const DecayCurve& curve);

/// 1/e time of the analytic OU free-induction decay.
double ou_fid_t1e(const OUParams& ou);

struct TauScan {
    std::vector<std::string> sequences;
    std::vector<double> taus;
    std::vector<std::vector<T1e>> t1e;  ///< [sequence][tau]
    std::vector<size_t> best;           ///< index of the largest t1e per sequence
    std::vector<bool> edge;             ///< best sits at a grid end: maximum not bracketed
};

TauScan scan_tau(const ExperimentConfig& config, const std::vector<SequenceSpec>& sequences,
                 const std::vector<double>& taus);

struct ScanGrid {
    std::string axis1;
    std::vector<double> axis1_values;
    std::string axis2 = "tau";
    std::vector<double> axis2_values;
    std::vector<std::vector<double>> signal;  ///< [axis1][axis2]
    std::vector<std::vector<double>> stderr_;
    std::string digest;
};

/// Final-state signal on an (error axis) x tau grid. axis: "flip" sets flip_fraction,
/// "pulse-length" sets the pulse duration at the Rabi frequency of the configured tau_p,
/// "offset" sets the detuning in rad/s. pulse_budget 0 reads out after one cycle.
ScanGrid scan_map(const ExperimentConfig& config, const SequenceSpec& sequence, const std::string& axis,
                  const std::vector<double>& axis_values, const std::vector<double>& taus, int pulse_budget);

struct OrderScan {
    std::string family;
    std::vector<int> orders;
    std::vector<double> best_tau;
    std::vector<T1e> best_t1e;
    std::vector<bool> edge;
    TauScan detail;
};

OrderScan scan_order(const ExperimentConfig& config, Family family, bool symmetric, const std::vector<int>& orders,
                     const std::vector<double>& taus);

struct Calibration {
    OUParams bath;
    double achieved_t1e = 0.0;
    int iterations = 0;
};

/// Bisection on b_rms in [0, b_max] (tau_c fixed) until the simulated FID 1/e time is within
/// 2% of the target. Common random numbers across iterations.
Calibration calibrate_bath(double target_t1e, double tau_c, double b_max, int n_traj, uint64_t seed, int threads = 0);

std::string export_tau_scan(const TauScan& scan);
/// Long-form rows `axis1 axis2 signal stderr`.
std::string export_scan_grid(const ScanGrid& grid);
std::string export_order_scan(const OrderScan& scan);

/// Hex digest of arbitrary text (FNV-1a 64).
std::string digest_of(const std::string& text);

using CommandArgs = std::map<std::string, std::string>;

/// Writes `contents` to `path` and `path + ".manifest.json"` next to it. The manifest records
/// the command and its extra arguments, the resolved config, seed, version, output digest and
/// wall-clock.
void write_output(const std::string& path, const std::string& contents, const std::string& command,
                  const CommandArgs& args, const ExperimentConfig& config, double wall_seconds);

struct Manifest {
    std::string command;
    CommandArgs args;
    std::string config_text;
    std::string output;
    std::string digest;
};
Manifest read_manifest(const std::string& path);

}  // namespace ddsim

#endif
