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

#ifndef DDSIM_TOGGLE_H
#define DDSIM_TOGGLE_H

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddsim/seq_ir.h"

namespace ddsim {

enum class Axis { kX = 0, kY = 1, kZ = 2 };

enum class IntervalKind { kDelay, kPulse };

/// One delay or pulse of the program as seen in the toggling frame of the ideal pulses.
///
/// `f[u]` is the coefficient of S_u in the toggling-frame image of S_u: +-1 for the XY family,
/// a cosine for phases off the axes (KDD). During a pulse only the component along the pulse's
/// own rotation axis is defined (it does not move); the others are std::nullopt.
/// `image[u]` is the full toggling-frame image of S_u at the start of the interval.
struct TrackInterval {
    double start = 0.0;
    double end = 0.0;
    double duration = 0.0;  // exact event duration; end - start may carry rounding
    IntervalKind kind = IntervalKind::kDelay;
    std::array<std::optional<double>, 3> f;
    std::array<std::array<double, 3>, 3> image{};
    int pulse_index = -1;
};

struct ToggleTracks {
    std::vector<TrackInterval> intervals;
    /// Per real pulse, the toggling-frame image of its rotation axis S_phi.
    std::vector<std::array<double, 3>> pulse_error_axes;
    double total_time = 0.0;
};

/// Requires every pulse to be a nominal pi rotation; throws UnsupportedSequence otherwise.
ToggleTracks compute_tracks(const SequenceProgram& program);

/// Time-weighted mean of f_u over [start, end], counting only intervals where f_u is defined.
/// Pulse intervals are skipped unless include_pulses. Returns 0 when nothing in the window
/// carries a defined value. Throws RangeError for windows outside [0, total_time].
double block_average(const ToggleTracks& tracks, Axis component, double start, double end, bool include_pulses);

/// Sum of toggling-frame error axes over all pulses, or over pulses [first, first + count).
/// The zeroth-order flip-angle error Hamiltonian is (delta_omega_p tau_p / T) times this vector.
std::array<double, 3> pulse_error_sum(const ToggleTracks& tracks);
std::array<double, 3> pulse_error_sum(const ToggleTracks& tracks, size_t first, size_t count);

enum class FilterComponent { kX, kY, kZ, kAll };

enum class SpectrumMode {
    kWindow,    // |int_0^T f(t) exp(i w t) dt|^2 of one pass through the tracks
    kPeriodic,  // harmonic power of the tracks repeated indefinitely, binned onto the grid
};

struct FilterSpectrum {
    std::vector<double> omegas;  // rad/s
    std::vector<double> values;
    double total_time = 0.0;
    SpectrumMode mode = SpectrumMode::kWindow;
};

/// Closed-form finite-window filter function with pulses collapsed to zero width. kAll sums the
/// three diagonal components.
FilterSpectrum filter_function(const ToggleTracks& tracks, std::span<const double> omegas,
                               FilterComponent component = FilterComponent::kZ);

/// Steady-state filter of the cycle repeated without end. Harmonic k*2pi/T carries |c_k|^2, with
/// c_k the Fourier coefficient of the cycle; every harmonic is added to the grid point whose bin
/// (midpoints between neighbours) contains it.
FilterSpectrum periodic_filter_function(const ToggleTracks& tracks, std::span<const double> omegas,
                                        FilterComponent component = FilterComponent::kAll);

/// Peaks below this fraction of the global maximum are ignored by fundamental_frequency.
inline constexpr double kPeakThreshold = 1e-6;

/// Lowest omega > 0 at an interior local maximum of the spectrum above kPeakThreshold * max.
double fundamental_frequency(const FilterSpectrum& spectrum);

/// `start end kind fx fy fz`, `?` where undefined.
std::string export_tracks(const ToggleTracks& tracks);
/// `omega value`
std::string export_spectrum(const FilterSpectrum& spectrum);

std::vector<double> linear_grid(double lo, double hi, size_t points);

}  // namespace ddsim

#endif
