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

#include "ddsim/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include "json.hpp"

#include "ddsim/errors.h"
#include "ddsim/text_io.h"

namespace ddsim {

namespace {

EnsembleOptions options_of(const ExperimentConfig& c) {
    EnsembleOptions o;
    o.n_traj = c.n_traj;
    o.master_seed = c.master_seed;
    o.threads = c.threads;
    return o;
}

double default_horizon(const ExperimentConfig& c) {
    return c.bath.b_rms > 0.0 ? 3.0 * ou_fid_t1e(c.bath) : 1e-3;
}

std::string t1e_fields(const T1e& t) {
    return format_double(t.value) + ' ' + format_double(t.uncertainty) + ' ' + (t.lower_bound ? "1" : "0");
}

}  // namespace

int cycles_for_budget(const SequenceProgram& cycle, int budget) {
    const int per_cycle = pulse_count(cycle);
    if (per_cycle < 1) throw InvalidParameter("pulse budget needs a sequence with pulses");
    if (budget < per_cycle) {
        throw InvalidParameter("pulse budget " + std::to_string(budget) + " is smaller than one cycle (" +
                               std::to_string(per_cycle) + " pulses)");
    }
    return std::max(1, static_cast<int>(std::lround(static_cast<double>(budget) / per_cycle)));
}

DecayCurve run_decay(const ExperimentConfig& config) {
    validate(config);
    const auto& spec = config.sequence;
    const double horizon = config.horizon > 0.0 ? config.horizon : default_horizon(config);
    DecayCurve curve;
    if (spec.family == Family::kFid || spec.family == Family::kHahn) {
        std::vector<SequenceProgram> points;
        for (int k = 1; k <= config.points; ++k) {
            const double t = horizon * k / config.points;
            points.push_back(spec.family == Family::kFid ? gen_fid(t) : gen_hahn(t / 2, spec.tau_p));
        }
        curve = ensemble_signal(points, config.bath, config.errors, InitAxis::kX, options_of(config));
        curve.times.insert(curve.times.begin(), 0.0);
        curve.signal_mean.insert(curve.signal_mean.begin(), 1.0);
        curve.signal_stderr.insert(curve.signal_stderr.begin(), 0.0);
    } else {
        const SequenceProgram cycle = build_sequence(spec);
        int cycles = config.cycles;
        if (cycles == 0 && config.pulse_budget > 0) cycles = cycles_for_budget(cycle, config.pulse_budget);
        if (cycles == 0) cycles = std::max(1, static_cast<int>(std::ceil(horizon / cycle_time(cycle) * (1 - 1e-12))));
        curve = ensemble_signal(cycle, cycles, config.bath, config.errors, InitAxis::kX, options_of(config));
    }
    curve.digest = digest_of(format_config(config));
    return curve;
}

T1e extract_t1e(const DecayCurve& curve) {
    const size_t n = curve.times.size();
    if (n == 0 || curve.signal_mean.size() != n || curve.signal_stderr.size() != n) {
        throw DegenerateCurve("empty or malformed decay curve");
    }
    const double level = std::exp(-1.0);
    if (curve.signal_mean[0] < level) {
        throw DegenerateCurve("decay curve starts below 1/e");
    }
    for (size_t k = 1; k < n; ++k) {
        if (curve.signal_mean[k] >= level) continue;
        const double t0 = curve.times[k - 1], t1 = curve.times[k];
        const double m0 = curve.signal_mean[k - 1], m1 = curve.signal_mean[k];
        const double s0 = curve.signal_stderr[k - 1], s1 = curve.signal_stderr[k];
        const double dt = t1 - t0;
        T1e out;
        if (m1 > 0.0) {
            const double y0 = std::log(m0), y1 = std::log(m1);
            const double span = y1 - y0;
            out.value = t0 + (-1.0 - y0) / span * dt;
            // partial derivatives of the crossing time with respect to y0 and y1
            const double d0 = dt * (-1.0 - y1) / (span * span);
            const double d1 = -dt * (-1.0 - y0) / (span * span);
            out.uncertainty = std::hypot(d0 * s0 / m0, d1 * s1 / m1);
        } else {
            const double span = m1 - m0;
            out.value = t0 + (level - m0) / span * dt;
            const double d0 = dt * (level - m1) / (span * span);
            const double d1 = -dt * (level - m0) / (span * span);
            out.uncertainty = std::hypot(d0 * s0, d1 * s1);
        }
        return out;
    }
    return {curve.times.back(), 0.0, true};
}

double ou_fid_t1e(const OUParams& ou) {
    validate(ou);
    if (ou.b_rms == 0.0) throw InvalidParameter("a zero field never decays");
    // Solve b^2 tau_c^2 (x - 1 + e^{-x}) = 1 for x = t / tau_c; the left side is increasing.
    const double target = 1.0 / (ou.b_rms * ou.b_rms * ou.tau_c * ou.tau_c);
    auto g = [](double x) { return x + std::expm1(-x); };
    double lo = 0.0, hi = 1.0;
    while (g(hi) < target) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) * ou.tau_c;
}

TauScan scan_tau(const ExperimentConfig& config, const std::vector<SequenceSpec>& sequences,
                 const std::vector<double>& taus) {
    if (sequences.empty() || taus.empty()) throw InvalidParameter("scan_tau needs sequences and taus");
    TauScan scan;
    scan.taus = taus;
    for (const auto& base : sequences) {
        scan.sequences.push_back(sequence_spec_name(base));
        std::vector<T1e> row;
        for (double tau : taus) {
            ExperimentConfig c = config;
            c.sequence = base;
            c.sequence.tau = tau;
            c.sequence.tau_p = config.sequence.tau_p;
            c.cycles = 0;
            c.pulse_budget = 0;
            row.push_back(extract_t1e(run_decay(c)));
        }
        size_t best = 0;
        for (size_t i = 1; i < row.size(); ++i) {
            if (row[i].value > row[best].value) best = i;
        }
        scan.best.push_back(best);
        scan.edge.push_back(best == 0 || best + 1 == row.size());
        scan.t1e.push_back(std::move(row));
    }
    return scan;
}

ScanGrid scan_map(const ExperimentConfig& config, const SequenceSpec& sequence, const std::string& axis,
                  const std::vector<double>& axis_values, const std::vector<double>& taus, int pulse_budget) {
    if (axis_values.empty() || taus.empty()) throw InvalidParameter("scan_map needs nonempty grids");
    if (axis != "flip" && axis != "pulse-length" && axis != "offset") {
        throw InvalidParameter("scan axis must be flip, pulse-length or offset");
    }
    if (axis == "pulse-length" && !(config.sequence.tau_p > 0.0)) {
        throw InvalidParameter("pulse-length axis needs a nominal tau_p > 0");
    }
    ScanGrid grid;
    grid.axis1 = axis;
    grid.axis1_values = axis_values;
    grid.axis2_values = taus;
    for (double a : axis_values) {
        std::vector<double> row, err;
        for (double tau : taus) {
            SequenceSpec spec = sequence;
            spec.tau = tau;
            spec.tau_p = config.sequence.tau_p;
            ControlErrors errors = config.errors;
            if (axis == "flip") {
                errors.flip_fraction = a;
            } else if (axis == "offset") {
                errors.offset = a;
            } else {
                if (!(a >= 0.0)) throw InvalidParameter("pulse length must be >= 0");
                errors.flip_fraction = config.errors.flip_fraction + a / config.sequence.tau_p - 1.0;
                spec.tau_p = a;
            }
            const SequenceProgram cycle = build_sequence(spec);
            const int cycles = pulse_budget > 0 ? cycles_for_budget(cycle, pulse_budget) : 1;
            const DecayCurve c = ensemble_signal(cycle, cycles, config.bath, errors, InitAxis::kX, options_of(config));
            row.push_back(c.signal_mean.back());
            err.push_back(c.signal_stderr.back());
        }
        grid.signal.push_back(std::move(row));
        grid.stderr_.push_back(std::move(err));
    }
    grid.digest = digest_of(format_config(config) + sequence_spec_name(sequence) + axis + std::to_string(pulse_budget));
    return grid;
}

OrderScan scan_order(const ExperimentConfig& config, Family family, bool symmetric, const std::vector<int>& orders,
                     const std::vector<double>& taus) {
    if (family != Family::kCdd && family != Family::kVcdd) {
        throw InvalidParameter("order scans apply to CDD and VCDD");
    }
    if (orders.empty()) throw InvalidParameter("scan_order needs orders");
    std::vector<SequenceSpec> specs;
    for (int n : orders) {
        SequenceSpec s = config.sequence;
        s.family = family;
        s.order = n;
        s.symmetric = symmetric;
        specs.push_back(s);
    }
    OrderScan out;
    out.family = std::string(family_name(family)) + (symmetric ? "(s)" : "");
    out.orders = orders;
    out.detail = scan_tau(config, specs, taus);
    for (size_t i = 0; i < orders.size(); ++i) {
        out.best_tau.push_back(taus[out.detail.best[i]]);
        out.best_t1e.push_back(out.detail.t1e[i][out.detail.best[i]]);
        out.edge.push_back(out.detail.edge[i]);
    }
    return out;
}

Calibration calibrate_bath(double target_t1e, double tau_c, double b_max, int n_traj, uint64_t seed, int threads) {
    if (!(target_t1e > 0.0)) throw InvalidParameter("target t1e must be > 0");
    if (!(b_max >= 0.0)) throw InvalidParameter("b_max must be >= 0");
    ExperimentConfig c;
    c.sequence.family = Family::kFid;
    c.errors = {};
    c.bath = {0.0, tau_c, 0};
    c.n_traj = n_traj;
    c.master_seed = seed;
    c.threads = threads;
    c.horizon = 2.0 * target_t1e;
    c.points = 100;
    auto simulated = [&](double b) {
        c.bath.b_rms = b;
        if (b == 0.0) return T1e{c.horizon, 0.0, true};
        return extract_t1e(run_decay(c));
    };
    Calibration out;
    const T1e at_max = simulated(b_max);
    if (at_max.lower_bound || at_max.value > target_t1e) {
        throw CalibrationError("b_rms interval [0, " + format_double(b_max) + "] does not bracket t1e = " +
                               format_double(target_t1e) + " s");
    }
    double lo = 0.0, hi = b_max;
    double mid = hi;
    T1e t = at_max;
    for (int i = 0; i < 80; ++i) {
        out.iterations = i + 1;
        mid = 0.5 * (lo + hi);
        t = simulated(mid);
        if (!t.lower_bound && std::abs(t.value - target_t1e) <= 2e-3 * target_t1e) break;
        (t.lower_bound || t.value > target_t1e ? lo : hi) = mid;
        if (hi - lo <= 1e-6 * hi) break;
    }
    if (t.lower_bound || std::abs(t.value - target_t1e) > 0.02 * target_t1e) {
        throw CalibrationError("bisection did not reach the target within 2%");
    }
    out.bath = {mid, tau_c, 0};
    out.achieved_t1e = t.value;
    return out;
}

std::string export_tau_scan(const TauScan& scan) {
    std::string out = "# sequence tau t1e t1e_err lower_bound\n";
    for (size_t s = 0; s < scan.sequences.size(); ++s) {
        for (size_t i = 0; i < scan.taus.size(); ++i) {
            out += scan.sequences[s] + ' ' + format_double(scan.taus[i]) + ' ' + t1e_fields(scan.t1e[s][i]) + '\n';
        }
    }
    for (size_t s = 0; s < scan.sequences.size(); ++s) {
        out += "# optimal " + scan.sequences[s] + ' ' + format_double(scan.taus[scan.best[s]]) +
               (scan.edge[s] ? " edge: grid does not bracket a maximum" : "") + '\n';
    }
    return out;
}

std::string export_scan_grid(const ScanGrid& grid) {
    std::string out = "# " + grid.axis1 + ' ' + grid.axis2 + " signal stderr\n";
    for (size_t i = 0; i < grid.axis1_values.size(); ++i) {
        for (size_t j = 0; j < grid.axis2_values.size(); ++j) {
            out += format_double(grid.axis1_values[i]) + ' ' + format_double(grid.axis2_values[j]) + ' ' +
                   format_double(grid.signal[i][j]) + ' ' + format_double(grid.stderr_[i][j]) + '\n';
        }
    }
    return out;
}

std::string export_order_scan(const OrderScan& scan) {
    std::string out = "# family order best_tau t1e t1e_err lower_bound edge\n";
    for (size_t i = 0; i < scan.orders.size(); ++i) {
        out += scan.family + ' ' + std::to_string(scan.orders[i]) + ' ' + format_double(scan.best_tau[i]) + ' ' +
               t1e_fields(scan.best_t1e[i]) + ' ' + (scan.edge[i] ? "1" : "0") + '\n';
    }
    return out + export_tau_scan(scan.detail);
}

std::string digest_of(const std::string& text) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_output(const std::string& path, const std::string& contents, const std::string& command,
                  const CommandArgs& args, const ExperimentConfig& config, double wall_seconds) {
    write_text_file(path, contents);
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    nlohmann::ordered_json j;
    j["tool"] = "ddsim";
    j["version"] = kVersion;
    j["command"] = command;
    j["args"] = args;
    j["seed"] = config.master_seed;
    j["config"] = format_config(config);
    j["output"] = path;
    j["digest"] = digest_of(contents);
    j["wall_clock_s"] = wall_seconds;
    j["created_utc"] = stamp;
    write_text_file(path + ".manifest.json", j.dump(2) + "\n");
}

Manifest read_manifest(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw ParseError(e.what());
    }
    Manifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.args = j.at("args").get<CommandArgs>();
        m.config_text = j.at("config").get<std::string>();
        m.output = j.at("output").get<std::string>();
        m.digest = j.at("digest").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": incomplete manifest (" + e.what() + ")");
    }
    return m;
}

}  // namespace ddsim
