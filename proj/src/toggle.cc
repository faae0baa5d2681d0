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

#include "ddsim/toggle.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "ddsim/errors.h"
#include "ddsim/numeric.h"
#include "ddsim/text_io.h"

namespace ddsim {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 pi_rotation(const std::array<double, 3>& n) {
    Mat3 m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m[i][j] = 2.0 * n[i] * n[j] - (i == j ? 1.0 : 0.0);
        }
    }
    return m;
}

Mat3 mul(const Mat3& a, const Mat3& b) {
    Mat3 c{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (int k = 0; k < 3; ++k) {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return c;
}

// Integral of exp(i w t) over [a, b], stable at w -> 0.
std::complex<double> phase_integral(double w, double a, double b) {
    const double len = b - a;
    if (w == 0.0) {
        return {len, 0.0};
    }
    const double half = 0.5 * w * len;
    const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
    return std::polar(len * sinc, 0.5 * w * (a + b));
}

// Delay intervals on the pulse-collapsed time axis, with their f values.
struct CollapsedSegment {
    double a;
    double b;
    std::array<double, 3> f;
};

std::vector<CollapsedSegment> collapse(const ToggleTracks& tracks) {
    std::vector<CollapsedSegment> out;
    double t = 0.0;
    for (const TrackInterval& iv : tracks.intervals) {
        if (iv.kind != IntervalKind::kDelay) {
            continue;
        }
        out.push_back({t, t + iv.duration, {*iv.f[0], *iv.f[1], *iv.f[2]}});
        t += iv.duration;
    }
    return out;
}

std::vector<int> components_of(FilterComponent c) {
    switch (c) {
        case FilterComponent::kX: return {0};
        case FilterComponent::kY: return {1};
        case FilterComponent::kZ: return {2};
        case FilterComponent::kAll: return {0, 1, 2};
    }
    return {};
}

double power_at(const std::vector<CollapsedSegment>& segs, const std::vector<int>& comps, double w) {
    double total = 0.0;
    for (int u : comps) {
        std::complex<double> acc = 0.0;
        for (const auto& s : segs) {
            acc += s.f[u] * phase_integral(w, s.a, s.b);
        }
        total += std::norm(acc);
    }
    return total;
}

void check_grid(std::span<const double> omegas) {
    if (omegas.empty()) {
        throw InvalidParameter("filter function needs a nonempty omega grid");
    }
    for (size_t i = 0; i < omegas.size(); ++i) {
        if (!std::isfinite(omegas[i]) || omegas[i] < 0.0 || (i > 0 && !(omegas[i] > omegas[i - 1]))) {
            throw InvalidParameter("omega grid must be finite, nonnegative and strictly increasing");
        }
    }
}

}  // namespace

ToggleTracks compute_tracks(const SequenceProgram& program) {
    ToggleTracks tracks;
    Mat3 frame{};
    for (int i = 0; i < 3; ++i) {
        frame[i][i] = 1.0;
    }
    double t = 0.0;
    int pulse_index = 0;
    for (const Event& e : program.events) {
        TrackInterval iv;
        iv.start = t;
        iv.duration = event_duration(e);
        iv.end = t + iv.duration;
        iv.image = frame;
        if (const auto* p = std::get_if<PulseEvent>(&e)) {
            if (std::abs(p->angle - kPi) > 1e-12) {
                throw UnsupportedSequence("toggling-frame tracks require pi pulses");
            }
            const auto n = pulse_axis(p->phase);
            iv.kind = IntervalKind::kPulse;
            iv.pulse_index = pulse_index++;
            for (int u = 0; u < 3; ++u) {
                if (std::abs(n[u]) == 1.0) {
                    iv.f[u] = frame[u][u];
                }
            }
            std::array<double, 3> axis{};
            for (int v = 0; v < 3; ++v) {
                for (int k = 0; k < 3; ++k) {
                    axis[v] += frame[k][v] * n[k];
                }
            }
            tracks.pulse_error_axes.push_back(axis);
            frame = mul(pi_rotation(n), frame);
        } else {
            iv.kind = IntervalKind::kDelay;
            for (int u = 0; u < 3; ++u) {
                iv.f[u] = frame[u][u];
            }
        }
        tracks.intervals.push_back(iv);
        t = iv.end;
    }
    tracks.total_time = t;
    return tracks;
}

double block_average(const ToggleTracks& tracks, Axis component, double start, double end, bool include_pulses) {
    const double tol = 1e-12 * std::max(1.0, tracks.total_time);
    if (!(start <= end) || start < -tol || end > tracks.total_time + tol) {
        throw RangeError("block_average window outside the program");
    }
    const int u = static_cast<int>(component);
    CompensatedSum num;
    CompensatedSum den;
    for (const TrackInterval& iv : tracks.intervals) {
        if (iv.end <= start + tol || iv.start >= end - tol) continue;
        if (iv.kind == IntervalKind::kPulse && !include_pulses) continue;
        if (!iv.f[u]) continue;
        double w = iv.duration;
        if (iv.start < start - tol || iv.end > end + tol) {
            w = std::min(iv.end, end) - std::max(iv.start, start);
        }
        if (w <= 0.0) continue;
        num.add(*iv.f[u] * w);
        den.add(w);
    }
    return den.value() > 0.0 ? num.value() / den.value() : 0.0;
}

std::array<double, 3> pulse_error_sum(const ToggleTracks& tracks) {
    return pulse_error_sum(tracks, 0, tracks.pulse_error_axes.size());
}

std::array<double, 3> pulse_error_sum(const ToggleTracks& tracks, size_t first, size_t count) {
    if (first + count > tracks.pulse_error_axes.size()) {
        throw RangeError("pulse range outside the program");
    }
    std::array<double, 3> sum{};
    for (size_t i = first; i < first + count; ++i) {
        for (int v = 0; v < 3; ++v) {
            sum[v] += tracks.pulse_error_axes[i][v];
        }
    }
    return sum;
}

FilterSpectrum filter_function(const ToggleTracks& tracks, std::span<const double> omegas,
                               FilterComponent component) {
    check_grid(omegas);
    const auto segs = collapse(tracks);
    const auto comps = components_of(component);
    FilterSpectrum out;
    out.mode = SpectrumMode::kWindow;
    out.omegas.assign(omegas.begin(), omegas.end());
    out.total_time = segs.empty() ? 0.0 : segs.back().b;
    out.values.reserve(omegas.size());
    for (double w : omegas) {
        out.values.push_back(power_at(segs, comps, w));
    }
    return out;
}

FilterSpectrum periodic_filter_function(const ToggleTracks& tracks, std::span<const double> omegas,
                                        FilterComponent component) {
    check_grid(omegas);
    const auto segs = collapse(tracks);
    const auto comps = components_of(component);
    FilterSpectrum out;
    out.mode = SpectrumMode::kPeriodic;
    out.omegas.assign(omegas.begin(), omegas.end());
    out.values.assign(omegas.size(), 0.0);
    const double period = segs.empty() ? 0.0 : segs.back().b;
    out.total_time = period;
    if (period <= 0.0) {
        return out;
    }
    const double base = 2 * kPi / period;
    const size_t n = omegas.size();
    auto lower_edge = [&](size_t j) {
        if (j > 0) return 0.5 * (omegas[j - 1] + omegas[j]);
        return n > 1 ? omegas[0] - 0.5 * (omegas[1] - omegas[0]) : omegas[0] - 0.5 * base;
    };
    auto upper_edge = [&](size_t j) {
        if (j + 1 < n) return 0.5 * (omegas[j] + omegas[j + 1]);
        return n > 1 ? omegas[n - 1] + 0.5 * (omegas[n - 1] - omegas[n - 2]) : omegas[0] + 0.5 * base;
    };
    const double lo = std::max(0.0, lower_edge(0));
    const double hi = upper_edge(n - 1);
    size_t j = 0;
    for (long long k = static_cast<long long>(std::ceil(lo / base)); k * base < hi; ++k) {
        const double w = k * base;
        while (j < n && w >= upper_edge(j)) ++j;
        if (j >= n) break;
        if (w < lower_edge(j)) continue;
        out.values[j] += power_at(segs, comps, w) / (period * period);
    }
    return out;
}

double fundamental_frequency(const FilterSpectrum& spectrum) {
    const auto& v = spectrum.values;
    if (v.size() < 3) {
        throw NoPeakError("spectrum too short to contain an interior peak");
    }
    const double peak = *std::max_element(v.begin(), v.end());
    if (!(peak > 0.0)) {
        throw NoPeakError("spectrum is identically zero");
    }
    for (size_t i = 1; i + 1 < v.size(); ++i) {
        if (spectrum.omegas[i] > 0.0 && v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > kPeakThreshold * peak) {
            return spectrum.omegas[i];
        }
    }
    throw NoPeakError("no local maximum above threshold");
}

std::string export_tracks(const ToggleTracks& tracks) {
    std::ostringstream out;
    for (const TrackInterval& iv : tracks.intervals) {
        out << format_double(iv.start) << ' ' << format_double(iv.end) << ' '
            << (iv.kind == IntervalKind::kDelay ? "delay" : "pulse");
        for (const auto& f : iv.f) {
            out << ' ' << (f ? format_double(*f) : std::string("?"));
        }
        out << '\n';
    }
    return out.str();
}

std::string export_spectrum(const FilterSpectrum& spectrum) {
    std::ostringstream out;
    for (size_t i = 0; i < spectrum.omegas.size(); ++i) {
        out << format_double(spectrum.omegas[i]) << ' ' << format_double(spectrum.values[i]) << '\n';
    }
    return out.str();
}

std::vector<double> linear_grid(double lo, double hi, size_t points) {
    if (points == 0 || !(hi >= lo)) {
        throw InvalidParameter("linear_grid needs points > 0 and hi >= lo");
    }
    std::vector<double> g(points);
    for (size_t i = 0; i < points; ++i) {
        g[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return g;
}

}  // namespace ddsim
