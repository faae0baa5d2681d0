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

#include "ddsim/simkernel.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "ddsim/errors.h"
#include "ddsim/numeric.h"
#include "ddsim/text_io.h"

namespace ddsim {

namespace {

using C = std::complex<double>;

Eigen::Vector3d inplane(double phase) {
    const auto a = pulse_axis(phase);
    return {a[0], a[1], a[2]};
}

template <typename F>
void parallel_for(int n, int threads, F&& body) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, std::max(1, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += workers) body(i);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

struct Trajectory {
    NoiseTrajectory noise;
    double eps = 0.0;
};

Trajectory draw(const OUParams& ou, const ControlErrors& errors, uint64_t master, int index, double duration) {
    Trajectory t;
    OUParams p = ou;
    p.seed = derive_seed(master, static_cast<uint64_t>(index), 0);
    t.noise = ou.b_rms > 0.0 ? ou_trajectory(p, duration, noise_dt(ou)) : constant_trajectory(0.0, duration);
    t.eps = errors.flip_fraction;
    if (errors.inhomogeneity_rms > 0.0) {
        std::mt19937_64 rng(derive_seed(master, static_cast<uint64_t>(index), 1));
        t.eps += errors.inhomogeneity_rms * std::normal_distribution<double>()(rng);
    }
    return t;
}

DecayCurve reduce(const std::vector<std::vector<double>>& per_traj, std::vector<double> times) {
    DecayCurve curve;
    curve.times = std::move(times);
    const size_t n = per_traj.size();
    curve.n_traj = static_cast<int>(n);
    for (size_t k = 0; k < curve.times.size(); ++k) {
        CompensatedSum sum;
        for (const auto& row : per_traj) sum.add(row[k]);
        const double mean = sum.value() / static_cast<double>(n);
        CompensatedSum sq;
        for (const auto& row : per_traj) sq.add((row[k] - mean) * (row[k] - mean));
        const double var = n > 1 ? sq.value() / static_cast<double>(n - 1) : 0.0;
        curve.signal_mean.push_back(mean);
        curve.signal_stderr.push_back(std::sqrt(var / static_cast<double>(n)));
    }
    return curve;
}

void check_options(const EnsembleOptions& options) {
    if (options.n_traj < 1) {
        throw InvalidParameter("n_traj must be >= 1");
    }
}

// Propagates one program starting at t0, applying `visit` after each event.
template <typename Visit>
double run_program(const SequenceProgram& program, const NoiseTrajectory& noise, double eps, double offset,
                   double t0, Spinor& psi, Visit&& visit) {
    const double step = noise.times[1] - noise.times[0];
    double t = t0;
    for (const auto& e : program.events) {
        if (const auto* d = std::get_if<DelayEvent>(&e)) {
            const double phi = offset * d->duration + noise.integral(t, t + d->duration);
            const C a = std::polar(1.0, -phi / 2);
            psi(0) *= a;
            psi(1) *= std::conj(a);
            t += d->duration;
        } else {
            const auto& p = std::get<PulseEvent>(e);
            psi = pulse_propagator(p, eps, offset, &noise, t, step) * psi;
            t += p.duration;
        }
        visit(t);
    }
    return t;
}

}  // namespace

void validate(const ControlErrors& errors) {
    if (!std::isfinite(errors.flip_fraction) || !std::isfinite(errors.offset)) {
        throw InvalidParameter("control errors must be finite");
    }
    if (!std::isfinite(errors.inhomogeneity_rms) || errors.inhomogeneity_rms < 0.0) {
        throw InvalidParameter("inhomogeneity_rms must be >= 0");
    }
}

Unitary su2_exp(const Eigen::Vector3d& h, double t) {
    const double norm = h.norm();
    const double half = 0.5 * norm * t;
    const double c = std::cos(half);
    // sin(half) / norm without dividing by zero
    const double s = norm > 0.0 ? std::sin(half) / norm : 0.5 * t;
    Unitary u;
    u(0, 0) = C(c, -s * h.z());
    u(1, 1) = C(c, s * h.z());
    u(0, 1) = C(-s * h.y(), -s * h.x());
    u(1, 0) = C(s * h.y(), -s * h.x());
    return u;
}

Unitary delay_propagator(double phi) {
    Unitary u = Unitary::Zero();
    u(0, 0) = std::polar(1.0, -phi / 2);
    u(1, 1) = std::polar(1.0, phi / 2);
    return u;
}

Unitary pulse_propagator(const PulseEvent& pulse, double eps, double offset, const NoiseTrajectory* noise, double t0,
                         double noise_step) {
    const double angle = pulse.angle * (1.0 + eps + pulse.flip_error);
    const Eigen::Vector3d n = inplane(pulse.phase);
    if (pulse.duration == 0.0) {
        return su2_exp(n, angle);
    }
    if (pulse.duration < 0.0) {
        throw InvalidParameter("pulse duration must be >= 0");
    }
    const double w1 = angle / pulse.duration;
    if (noise == nullptr) {
        return su2_exp(Eigen::Vector3d(w1 * n.x(), w1 * n.y(), offset), pulse.duration);
    }
    if (noise->values.size() == 2 && noise->values[0] == noise->values[1]) {
        return su2_exp(Eigen::Vector3d(w1 * n.x(), w1 * n.y(), offset + noise->values[0]), pulse.duration);
    }
    const double max_step = std::min(noise_step, pulse.duration / 4);
    const int m = std::max(4, static_cast<int>(std::ceil(pulse.duration / max_step * (1.0 - 1e-12))));
    const double h = pulse.duration / m;
    Unitary u = Unitary::Identity();
    for (int k = 0; k < m; ++k) {
        const double a = t0 + k * h;
        const double bz = noise->mean(a, a + h);
        u = su2_exp(Eigen::Vector3d(w1 * n.x(), w1 * n.y(), offset + bz), h) * u;
    }
    return u;
}

Unitary static_unitary(const SequenceProgram& program, const Eigen::Vector3d& field, const ControlErrors& errors) {
    Unitary u = Unitary::Identity();
    const Eigen::Vector3d drift = field + Eigen::Vector3d(0, 0, errors.offset);
    for (const auto& e : program.events) {
        if (const auto* d = std::get_if<DelayEvent>(&e)) {
            u = su2_exp(drift, d->duration) * u;
        } else {
            const auto& p = std::get<PulseEvent>(e);
            const double angle = p.angle * (1.0 + errors.flip_fraction + p.flip_error);
            const Eigen::Vector3d n = inplane(p.phase);
            if (p.duration == 0.0) {
                u = su2_exp(n, angle) * u;
            } else {
                u = su2_exp(n * (angle / p.duration) + drift, p.duration) * u;
            }
        }
    }
    return u;
}

Unitary ideal_unitary(const SequenceProgram& program) {
    Unitary u = Unitary::Identity();
    for (const auto& e : program.events) {
        if (const auto* p = std::get_if<PulseEvent>(&e)) {
            u = su2_exp(inplane(p->phase), p->angle) * u;
        }
    }
    return u;
}

double phase_min_deviation(const Unitary& u, const Unitary& v) {
    const double overlap = std::abs((v.adjoint() * u).trace());
    return std::sqrt(std::max(0.0, 4.0 - 2.0 * overlap));
}

Bloch to_bloch(const Spinor& psi) {
    const C cross = std::conj(psi(0)) * psi(1);
    return {2 * cross.real(), 2 * cross.imag(), std::norm(psi(0)) - std::norm(psi(1))};
}

Spinor spinor_for(InitAxis axis) {
    const double r = std::sqrt(0.5);
    return axis == InitAxis::kX ? Spinor(r, r) : Spinor(C(r, 0), C(0, r));
}

Bloch bloch_for(InitAxis axis) { return axis == InitAxis::kX ? Bloch(1, 0, 0) : Bloch(0, 1, 0); }

Eigen::Matrix3d rotation_of(const Unitary& u) {
    Eigen::Matrix3d r;
    for (int j = 0; j < 3; ++j) {
        Bloch e = Bloch::Zero();
        e(j) = 1.0;
        // Pure state with Bloch vector e.
        Spinor psi;
        const double theta = std::acos(std::clamp(e.z(), -1.0, 1.0));
        const double phi = std::atan2(e.y(), e.x());
        psi << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
        r.col(j) = to_bloch(u * psi);
    }
    return r;
}

std::vector<EvolutionSample> evolve(const SequenceProgram& program, const NoiseTrajectory& noise,
                                    const ControlErrors& errors, const Bloch& init, SampleAt sample_at, int cycles) {
    validate(errors);
    if (cycles < 1) {
        throw InvalidParameter("cycles must be >= 1");
    }
    const double total = cycles * cycle_time(program);
    if (noise.end_time() < total * (1.0 - 1e-12) || noise.times.front() > 0.0) {
        throw RangeError("noise trajectory shorter than the program");
    }
    if (std::abs(init.norm() - 1.0) > 1e-9) {
        throw InvalidParameter("initial Bloch vector must be pure");
    }
    Spinor psi;
    const double theta = std::acos(std::clamp(init.z(), -1.0, 1.0));
    psi << std::cos(theta / 2), std::polar(std::sin(theta / 2), std::atan2(init.y(), init.x()));
    std::vector<EvolutionSample> out{{0.0, to_bloch(psi)}};
    double t = 0.0;
    for (int c = 0; c < cycles; ++c) {
        t = run_program(program, noise, errors.flip_fraction, errors.offset, t, psi, [&](double now) {
            if (sample_at == SampleAt::kEveryEvent) out.push_back({now, to_bloch(psi)});
        });
        if (sample_at == SampleAt::kCycleBoundaries) out.push_back({t, to_bloch(psi)});
    }
    return out;
}

double noise_dt(const OUParams& ou) { return ou.tau_c / 100.0; }

DecayCurve ensemble_signal(const SequenceProgram& program, int cycles, const OUParams& ou,
                           const ControlErrors& errors, InitAxis axis, const EnsembleOptions& options) {
    validate(ou);
    validate(errors);
    check_options(options);
    if (cycles < 1) {
        throw InvalidParameter("cycles must be >= 1");
    }
    const double period = cycle_time(program);
    const double total = cycles * period;
    const Eigen::Matrix3d ideal = rotation_of(ideal_unitary(program));
    std::vector<Bloch> targets{bloch_for(axis)};
    for (int c = 0; c < cycles; ++c) targets.push_back(ideal * targets.back());
    std::vector<std::vector<double>> rows(options.n_traj);
    parallel_for(options.n_traj, options.threads, [&](int i) {
        const Trajectory tr = draw(ou, errors, options.master_seed, i, total);
        Spinor psi = spinor_for(axis);
        std::vector<double> row{to_bloch(psi).dot(targets[0])};
        double t = 0.0;
        for (int c = 0; c < cycles; ++c) {
            t = run_program(program, tr.noise, tr.eps, errors.offset, t, psi, [](double) {});
            row.push_back(to_bloch(psi).dot(targets[c + 1]));
        }
        rows[i] = std::move(row);
    });
    std::vector<double> times;
    for (int c = 0; c <= cycles; ++c) times.push_back(c * period);
    return reduce(rows, std::move(times));
}

DecayCurve ensemble_signal(const std::vector<SequenceProgram>& points, const OUParams& ou,
                           const ControlErrors& errors, InitAxis axis, const EnsembleOptions& options) {
    validate(ou);
    validate(errors);
    check_options(options);
    if (points.empty()) {
        throw InvalidParameter("no time points");
    }
    std::vector<double> times;
    std::vector<Bloch> targets;
    for (const auto& p : points) {
        times.push_back(cycle_time(p));
        targets.push_back(rotation_of(ideal_unitary(p)) * bloch_for(axis));
    }
    const double total = *std::max_element(times.begin(), times.end());
    std::vector<std::vector<double>> rows(options.n_traj);
    parallel_for(options.n_traj, options.threads, [&](int i) {
        const Trajectory tr = draw(ou, errors, options.master_seed, i, std::max(total, 1e-300));
        std::vector<double> row;
        for (size_t k = 0; k < points.size(); ++k) {
            Spinor psi = spinor_for(axis);
            run_program(points[k], tr.noise, tr.eps, errors.offset, 0.0, psi, [](double) {});
            row.push_back(to_bloch(psi).dot(targets[k]));
        }
        rows[i] = std::move(row);
    });
    return reduce(rows, std::move(times));
}

double ou_fid_coherence(const OUParams& ou, double t) {
    const double x = t / ou.tau_c;
    // x - 1 + e^{-x} loses precision for small x; expm1 keeps it.
    const double g = x + std::expm1(-x);
    return std::exp(-ou.b_rms * ou.b_rms * ou.tau_c * ou.tau_c * g);
}

double ideal_equivalence(const SequenceProgram& a, const SequenceProgram& b,
                         const std::vector<Eigen::Vector3d>& static_fields) {
    for (const auto* p : {&a, &b}) {
        for (const auto& e : p->events) {
            if (const auto* q = std::get_if<PulseEvent>(&e); q && (q->duration != 0.0 || q->flip_error != 0.0)) {
                throw PreconditionError("ideal_equivalence needs instantaneous error-free pulses");
            }
        }
    }
    double worst = 0.0;
    for (const auto& f : static_fields) {
        const Unitary ua = static_unitary(a, f);
        const Unitary ub = static_unitary(b, f);
        worst = std::max(worst, 1.0 - std::abs((ua.adjoint() * ub).trace()) / 2.0);
    }
    return worst;
}

std::string export_curve(const DecayCurve& curve) {
    std::string out;
    for (size_t k = 0; k < curve.times.size(); ++k) {
        out += format_double(curve.times[k]) + ' ' + format_double(curve.signal_mean[k]) + ' ' +
               format_double(curve.signal_stderr[k]) + '\n';
    }
    return out;
}

}  // namespace ddsim
