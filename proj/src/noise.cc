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

#include "ddsim/noise.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "ddsim/errors.h"
#include "ddsim/text_io.h"

namespace ddsim {

namespace {

uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

void validate(const OUParams& params) {
    if (!std::isfinite(params.b_rms) || params.b_rms < 0.0) {
        throw InvalidParameter("b_rms must be finite and >= 0");
    }
    if (!std::isfinite(params.tau_c) || params.tau_c <= 0.0) {
        throw InvalidParameter("tau_c must be finite and > 0");
    }
}

double ou_psd(const OUParams& params, double omega) {
    const double wt = omega * params.tau_c;
    return 2.0 * params.b_rms * params.b_rms * params.tau_c / (1.0 + wt * wt);
}

double NoiseTrajectory::integral(double t0, double t1) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(end_time())) + 1e-18;
    if (t0 > t1 || t0 < times.front() - slack || t1 > end_time() + slack) {
        throw RangeError("integral window outside the noise trajectory");
    }
    auto running = [&](double t) {
        t = std::clamp(t, times.front(), end_time());
        auto it = std::upper_bound(times.begin(), times.end(), t);
        size_t k = it == times.begin() ? 0 : static_cast<size_t>(it - times.begin()) - 1;
        if (k + 1 >= times.size()) return cumulative.back();
        const double h = times[k + 1] - times[k];
        const double s = t - times[k];
        const double slope = (values[k + 1] - values[k]) / h;
        return cumulative[k] + s * (values[k] + 0.5 * slope * s);
    };
    return running(t1) - running(t0);
}

double NoiseTrajectory::mean(double t0, double t1) const {
    if (t1 <= t0) {
        const double t = std::clamp(t0, times.front(), end_time());
        auto it = std::upper_bound(times.begin(), times.end(), t);
        size_t k = it == times.begin() ? 0 : static_cast<size_t>(it - times.begin()) - 1;
        if (k + 1 >= times.size()) return values.back();
        const double w = (t - times[k]) / (times[k + 1] - times[k]);
        return values[k] + w * (values[k + 1] - values[k]);
    }
    return integral(t0, t1) / (t1 - t0);
}

NoiseTrajectory make_trajectory(std::vector<double> times, std::vector<double> values, OUParams params) {
    if (times.size() < 2 || times.size() != values.size()) {
        throw InvalidParameter("trajectory needs at least two matching samples");
    }
    for (size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || !std::isfinite(values[k])) {
            throw InvalidParameter("trajectory samples must be finite");
        }
        if (k > 0 && !(times[k] > times[k - 1])) {
            throw InvalidParameter("trajectory times must be strictly increasing");
        }
    }
    NoiseTrajectory out;
    out.cumulative.assign(times.size(), 0.0);
    for (size_t k = 1; k < times.size(); ++k) {
        out.cumulative[k] = out.cumulative[k - 1] + 0.5 * (times[k] - times[k - 1]) * (values[k] + values[k - 1]);
    }
    out.times = std::move(times);
    out.values = std::move(values);
    out.params = params;
    return out;
}

NoiseTrajectory constant_trajectory(double b, double duration) {
    if (!(duration > 0.0)) {
        throw InvalidParameter("duration must be > 0");
    }
    OUParams p;
    p.b_rms = 0.0;
    p.tau_c = 1e300;
    return make_trajectory({0.0, duration}, {b, b}, p);
}

NoiseTrajectory ou_trajectory(const OUParams& params, double duration, double dt) {
    validate(params);
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw InvalidParameter("duration must be > 0");
    }
    if (!(dt > 0.0)) {
        throw InvalidParameter("dt must be > 0");
    }
    if (dt > params.tau_c / 10.0 * (1.0 + 1e-12)) {
        throw InvalidParameter("dt too coarse: must be <= tau_c / 10");
    }
    const auto steps = static_cast<size_t>(std::ceil(duration / dt * (1.0 - 1e-12)));
    const size_t n = std::max<size_t>(steps, 1) + 1;
    std::vector<double> times(n), values(n);
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal;
    const double decay = std::exp(-dt / params.tau_c);
    const double kick = params.b_rms * std::sqrt(-std::expm1(-2.0 * dt / params.tau_c));
    values[0] = params.b_rms * normal(rng);
    for (size_t k = 0; k < n; ++k) {
        times[k] = static_cast<double>(k) * dt;
        if (k > 0) values[k] = values[k - 1] * decay + kick * normal(rng);
    }
    return make_trajectory(std::move(times), std::move(values), params);
}

uint64_t derive_seed(uint64_t master, uint64_t index, uint64_t stream) {
    return splitmix(splitmix(splitmix(master) ^ index) ^ (stream * 0xd6e8feb86659fd93ULL));
}

std::string export_trajectory(const NoiseTrajectory& trajectory) {
    std::string out;
    for (size_t k = 0; k < trajectory.times.size(); ++k) {
        out += format_double(trajectory.times[k]);
        out += ' ';
        out += format_double(trajectory.values[k]);
        out += '\n';
    }
    return out;
}

}  // namespace ddsim
