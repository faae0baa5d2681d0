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

#ifndef DDSIM_SEQ_IR_H
#define DDSIM_SEQ_IR_H

#include <array>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ddsim {

inline constexpr double kPi = std::numbers::pi;

/// Sequence families understood by the generators and the serializer.
enum class Family { kFid, kHahn, kCpmg, kXy4, kXy16, kCdd, kCdds, kVcdd, kVcdds, kKdd, kKdd2 };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);

double deg_to_rad(double degrees);
double rad_to_deg(double radians);

/// Reduces a phase to [0, 2pi). Phases within 1e-9 rad of a whole degree are snapped onto that
/// degree so that sums like pi/2 + pi compare equal to 3pi/2. Idempotent.
double canonical_phase(double radians);

/// Unit rotation axis (cos phase, sin phase, 0). Exact for multiples of 90 degrees.
std::array<double, 3> pulse_axis(double phase);

/// One control pulse. A barred pulse (reversed sense of rotation) is stored as phase + pi;
/// `sense` only records how the pulse was written and takes no part in comparisons.
struct PulseEvent {
    double phase = 0.0;     // rotation axis in the xy-plane, radians
    double angle = kPi;     // nominal rotation angle, radians
    double duration = 0.0;  // seconds, 0 = instantaneous
    int sense = 1;
    bool generating = false;  // pulse belongs to a CDD generating sequence
    double flip_error = 0.0;  // per-pulse relative amplitude error, added to the run-wide value

    bool operator==(const PulseEvent& other) const;
};

struct DelayEvent {
    double duration = 0.0;

    bool operator==(const DelayEvent& other) const = default;
};

using Event = std::variant<PulseEvent, DelayEvent>;

double event_duration(const Event& event);
inline bool is_pulse(const Event& event) { return std::holds_alternative<PulseEvent>(event); }

/// Ordered control events plus the parameters they were generated from. Immutable by convention:
/// every transformation returns a new program.
struct SequenceProgram {
    std::vector<Event> events;
    Family family = Family::kFid;
    int order = 0;
    bool symmetric = false;
    double tau = 0.0;
    double tau_p = 0.0;
    int repetitions = 1;

    bool operator==(const SequenceProgram& other) const = default;
};

SequenceProgram gen_xy4(double tau, double tau_p, bool symmetric);
SequenceProgram gen_xy16(double tau, double tau_p, bool symmetric);
SequenceProgram gen_cdd(int order, double tau, double tau_p, bool symmetric);
SequenceProgram gen_vcdd(int order, double tau, double tau_p, bool symmetric);
SequenceProgram gen_kdd(double tau, double tau_p);
SequenceProgram gen_kdd2(double tau, double tau_p);
/// tau - P - 2tau - P - ... - P - tau, all pulses about `phase`.
SequenceProgram gen_cpmg(double tau, double tau_p, int n_pulses, double phase = 0.0);
SequenceProgram gen_hahn(double tau, double tau_p = 0.0, double phase = 0.0);
SequenceProgram gen_fid(double duration);

/// The five adjacent pulses of the Knill composite pi pulse about `phase`, without delays.
std::vector<PulseEvent> knill_composite(double phase, double tau_p);

/// Moves every generating pulse of a CDD program to the end of the cycle by conjugating the
/// pulses it passes, then drops the (cancelling) generating pulses.
SequenceProgram virtualize(const SequenceProgram& program);

/// Concatenates the event list k times. Delays meeting at a joint are merged.
SequenceProgram repeat(const SequenceProgram& program, int k);

SequenceProgram canonicalize(const SequenceProgram& program);

int pulse_count(const SequenceProgram& program);
double cycle_time(const SequenceProgram& program);
/// Total pulse time over total time, summed left to right in event order. 0 for empty programs.
double duty_cycle(const SequenceProgram& program);

/// Builds any family from its parameters. `order` is ignored by families without one and
/// `n_pulses` is used by CPMG only.
SequenceProgram make_sequence(Family family, int order, bool symmetric, double tau, double tau_p,
                              int n_pulses = 2);

/// Line-oriented text form: `#key value` headers, then `P <phase_deg> <angle_deg> <dur_s> [G]
/// [eps=<x>]` and `D <dur_s>` lines. parse_program(serialize(p)) == p bit for bit.
std::string serialize(const SequenceProgram& program);
SequenceProgram parse_program(std::string_view text);

}  // namespace ddsim

#endif
