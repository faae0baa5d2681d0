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

// Command-line front end: sequence inspection and the simulation protocols.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ddsim/config.h"
#include "ddsim/errors.h"
#include "ddsim/harness.h"
#include "ddsim/seq_ir.h"
#include "ddsim/text_io.h"
#include "ddsim/toggle.h"

namespace {

using namespace ddsim;

// Per-command trajectory counts applied when neither --traj nor --config is given.
constexpr int kDecayTraj = 10000;
constexpr int kScanTraj = 2000;

struct Overrides {
    std::string config_path;
    std::string seq;
    std::optional<std::string> family;
    std::optional<int> order;
    bool symmetric = false;
    bool asymmetric = false;
    std::optional<double> tau, tau_p;
    std::optional<int> n_pulses;
    std::optional<double> flip_error, flip_deg, offset, inhomogeneity;
    std::optional<double> b_rms, tau_c;
    std::optional<int> traj, threads, cycles, pulse_budget, points;
    std::optional<uint64_t> seed;
    std::optional<double> horizon;
    std::optional<std::string> axis, values, taus, sequences, orders;
    std::string out;
};

void add_common(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--config", o.config_path, "Experiment config file");
    cmd.add_option("--seq", o.seq, "Sequence shorthand, e.g. cdd2, vcdd2s, xy16s, kdd2, cpmg20");
    cmd.add_option("--family", o.family, "Sequence family (FID HAHN CPMG XY4 XY16 CDD VCDD KDD KDD2)");
    cmd.add_option("--order", o.order, "Concatenation order");
    cmd.add_flag("--symmetric", o.symmetric, "Symmetric variant");
    cmd.add_flag("--asymmetric", o.asymmetric, "Asymmetric variant");
    cmd.add_option("--tau", o.tau, "Delay between pulses [s]");
    cmd.add_option("--tau-p", o.tau_p, "Pi-pulse length [s]; 0 for ideal delta pulses");
    cmd.add_option("--n-pulses", o.n_pulses, "CPMG pulse count");
    cmd.add_option("--flip-error", o.flip_error, "Fractional flip-angle error");
    cmd.add_option("--flip-deg", o.flip_deg, "Flip-angle error of a pi pulse [deg]");
    cmd.add_option("--offset", o.offset, "Static resonance offset [rad/s]");
    cmd.add_option("--inhomogeneity", o.inhomogeneity, "Relative rms spread of the Rabi frequency");
    cmd.add_option("--b-rms", o.b_rms, "Bath rms amplitude [rad/s]");
    cmd.add_option("--tau-c", o.tau_c, "Bath correlation time [s]");
    cmd.add_option("--traj", o.traj, "Trajectories per point");
    cmd.add_option("--seed", o.seed, "Master seed");
    cmd.add_option("--threads", o.threads, "Worker threads (0 = hardware)");
    cmd.add_option("--cycles", o.cycles, "Readout after this many cycles");
    cmd.add_option("--pulse-budget", o.pulse_budget, "Readout after about this many pulses");
    cmd.add_option("--horizon", o.horizon, "Readout horizon [s]");
    cmd.add_option("--points", o.points, "Sample count for FID and Hahn curves");
    cmd.add_option("--axis", o.axis, "Map axis: flip, offset or pulse-length");
    cmd.add_option("--values", o.values, "Map axis grid (list, lin:a:b:n or log:a:b:n)");
    cmd.add_option("--taus", o.taus, "Delay grid [s]");
    cmd.add_option("--sequences", o.sequences, "Comma separated sequence list for scan-tau");
    cmd.add_option("--orders", o.orders, "Concatenation orders for scan-order");
    cmd.add_option("-o,--out", o.out, "Output file (a manifest is written next to it); stdout if omitted");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::string item;
    for (char ch : text + ",") {
        if (ch == ',' || ch == ' ') {
            if (!item.empty()) items.push_back(item);
            item.clear();
        } else {
            item += ch;
        }
    }
    return items;
}

ExperimentConfig resolve(const Overrides& o, int default_traj) {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (o.config_path.empty()) c.n_traj = default_traj;
    SequenceSpec& s = c.sequence;
    if (!o.seq.empty()) {
        const SequenceSpec parsed = parse_sequence_spec(o.seq);
        s.family = parsed.family;
        s.order = parsed.order;
        s.symmetric = parsed.symmetric;
        s.n_pulses = parsed.n_pulses;
    }
    if (o.family) {
        s.family = parse_family(*o.family);
        if (s.family == Family::kCdds) s.family = Family::kCdd, s.symmetric = true;
        if (s.family == Family::kVcdds) s.family = Family::kVcdd, s.symmetric = true;
    }
    if (o.order) s.order = *o.order;
    if (o.symmetric && o.asymmetric) throw InvalidParameter("--symmetric and --asymmetric are exclusive");
    if (o.symmetric) s.symmetric = true;
    if (o.asymmetric) s.symmetric = false;
    if (o.tau) s.tau = *o.tau;
    if (o.tau_p) s.tau_p = *o.tau_p;
    if (o.n_pulses) s.n_pulses = *o.n_pulses;
    if (o.flip_error && o.flip_deg) throw InvalidParameter("--flip-error and --flip-deg are exclusive");
    if (o.flip_error) c.errors.flip_fraction = *o.flip_error;
    if (o.flip_deg) c.errors.flip_fraction = *o.flip_deg / 180.0;
    if (o.offset) c.errors.offset = *o.offset;
    if (o.inhomogeneity) c.errors.inhomogeneity_rms = *o.inhomogeneity;
    if (o.b_rms) c.bath.b_rms = *o.b_rms;
    if (o.tau_c) c.bath.tau_c = *o.tau_c;
    if (o.traj) c.n_traj = *o.traj;
    if (o.seed) c.master_seed = *o.seed;
    if (o.threads) c.threads = *o.threads;
    if (o.cycles) c.cycles = *o.cycles;
    if (o.pulse_budget) c.pulse_budget = *o.pulse_budget;
    if (o.horizon) c.horizon = *o.horizon;
    if (o.points) c.points = *o.points;
    if (o.axis) c.axis = *o.axis;
    if (o.values) c.axis_values = parse_grid(*o.values);
    if (o.taus) c.taus = parse_grid(*o.taus);
    if (o.sequences) {
        c.sequences.clear();
        for (const auto& name : split_list(*o.sequences)) c.sequences.push_back(parse_sequence_spec(name));
    }
    if (o.orders) {
        c.orders.clear();
        for (double v : parse_grid(*o.orders)) c.orders.push_back(static_cast<int>(v));
    }
    if (!o.out.empty()) c.out = o.out;
    validate(c);
    return c;
}

const std::string& arg_or(const CommandArgs& args, const std::string& key, const std::string& fallback) {
    const auto it = args.find(key);
    return it == args.end() ? fallback : it->second;
}

std::vector<double> require_taus(const ExperimentConfig& c) {
    if (c.taus.empty()) throw InvalidParameter("a delay grid is required (--taus or [scan] taus)");
    return c.taus;
}

SequenceProgram program_for(const ExperimentConfig& c, const CommandArgs& args) {
    const int reps = static_cast<int>(parse_int(arg_or(args, "repeat", "1")));
    SequenceProgram p = build_sequence(c.sequence);
    return reps == 1 ? p : repeat(p, reps);
}

FilterComponent parse_component(const std::string& name) {
    if (name == "x") return FilterComponent::kX;
    if (name == "y") return FilterComponent::kY;
    if (name == "z") return FilterComponent::kZ;
    if (name == "all") return FilterComponent::kAll;
    throw InvalidParameter("filter component must be x, y, z or all");
}

// Produces the output text of a command from its resolved inputs; shared by live runs and manifest replays.
std::string execute(const std::string& command, const ExperimentConfig& c, const CommandArgs& args) {
    if (command == "gen") return serialize(program_for(c, args));
    if (command == "toggle") return export_tracks(compute_tracks(program_for(c, args)));
    if (command == "filter") {
        const ToggleTracks tracks = compute_tracks(program_for(c, args));
        const double w_max_default = 40 * kPi / tracks.total_time;
        const double w_min = parse_double(arg_or(args, "w_min", "0"));
        const double w_max = parse_double(arg_or(args, "w_max", format_double(w_max_default)));
        const auto n = static_cast<size_t>(parse_int(arg_or(args, "w_points", "2001")));
        const auto grid = linear_grid(w_min, w_max, n);
        const FilterComponent component = parse_component(arg_or(args, "component", "all"));
        const std::string mode = arg_or(args, "mode", "periodic");
        if (mode == "periodic") return export_spectrum(periodic_filter_function(tracks, grid, component));
        if (mode == "window") return export_spectrum(filter_function(tracks, grid, component));
        throw InvalidParameter("filter mode must be periodic or window");
    }
    if (command == "decay") {
        const DecayCurve curve = run_decay(c);
        const T1e t = extract_t1e(curve);
        std::fprintf(stderr, "t1e %s %s%s\n", format_double(t.value).c_str(), format_double(t.uncertainty).c_str(),
                     t.lower_bound ? " (lower bound)" : "");
        return export_curve(curve);
    }
    if (command == "scan-tau") {
        const std::vector<SequenceSpec> seqs = c.sequences.empty() ? std::vector{c.sequence} : c.sequences;
        return export_tau_scan(scan_tau(c, seqs, require_taus(c)));
    }
    if (command == "scan-map") {
        if (c.axis_values.empty()) throw InvalidParameter("a map axis grid is required (--values or [scan] values)");
        return export_scan_grid(scan_map(c, c.sequence, c.axis, c.axis_values, require_taus(c), c.pulse_budget));
    }
    if (command == "scan-order") {
        const std::vector<int> orders = c.orders.empty() ? std::vector<int>{1, 2, 3} : c.orders;
        return export_order_scan(scan_order(c, c.sequence.family, c.sequence.symmetric, orders, require_taus(c)));
    }
    if (command == "calibrate") {
        const double target = parse_double(arg_or(args, "target", "300e-6"));
        const double b_max = parse_double(arg_or(args, "b_max", "1e6"));
        const Calibration cal = calibrate_bath(target, c.bath.tau_c, b_max, c.n_traj, c.master_seed, c.threads);
        return "# b_rms tau_c achieved_t1e iterations\n" + format_double(cal.bath.b_rms) + ' ' +
               format_double(cal.bath.tau_c) + ' ' + format_double(cal.achieved_t1e) + ' ' +
               std::to_string(cal.iterations) + '\n';
    }
    throw InvalidParameter("unknown command '" + command + "'");
}

void emit(const std::string& command, const ExperimentConfig& c, const CommandArgs& args, const std::string& path) {
    const auto start = std::chrono::steady_clock::now();
    const std::string text = execute(command, c, args);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (path.empty()) {
        std::cout << text;
    } else {
        write_output(path, text, command, args, c, wall);
        std::fprintf(stderr, "wrote %s (%.2f s)\n", path.c_str(), wall);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamical decoupling sequence compiler and single-spin simulator"};
    app.set_version_flag("--version", std::string(ddsim::kVersion));
    app.require_subcommand(1);

    Overrides o;
    CommandArgs args;
    std::string command;
    std::function<void()> action;

    struct Spec {
        const char* name;
        const char* help;
        int traj;
    };
    const Spec specs[] = {
        {"gen", "Emit the sequence program", 0},
        {"toggle", "Emit toggling-frame tracks", 0},
        {"filter", "Emit the filter-function spectrum", 0},
        {"decay", "Simulate a decay curve", kDecayTraj},
        {"scan-tau", "Decay time versus delay for one or more sequences", kScanTraj},
        {"scan-map", "Signal map over an error axis and the delay", kScanTraj},
        {"scan-order", "Optimal delay versus concatenation order", kScanTraj},
        {"calibrate", "Fit the bath amplitude to a target free-decay time", kDecayTraj},
    };

    int repeat_count = 1;
    double w_min = 0, w_max = 0, target = 300e-6, b_max = 1e6;
    size_t w_points = 2001;
    std::string component = "all", mode = "periodic";

    for (const Spec& s : specs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        add_common(*cmd, o);
        if (std::string(s.name) == "gen" || std::string(s.name) == "toggle" || std::string(s.name) == "filter") {
            cmd->add_option("--repeat", repeat_count, "Repeat the cycle this many times")->check(CLI::PositiveNumber);
        }
        if (std::string(s.name) == "filter") {
            cmd->add_option("--w-min", w_min, "Lowest angular frequency [rad/s]");
            cmd->add_option("--w-max", w_max, "Highest angular frequency [rad/s]; default 20 harmonics of the cycle");
            cmd->add_option("--w-points", w_points, "Grid points")->check(CLI::Range(2, 10000000));
            cmd->add_option("--component", component, "x, y, z or all");
            cmd->add_option("--mode", mode, "periodic (harmonic power) or window (single pass)");
        }
        if (std::string(s.name) == "calibrate") {
            cmd->add_option("--target", target, "Target free-decay 1/e time [s]");
            cmd->add_option("--b-max", b_max, "Upper end of the amplitude bracket [rad/s]");
        }
        const int traj = s.traj;
        const bool has_repeat = cmd->get_option_no_throw("--repeat") != nullptr;
        cmd->callback([&, cmd, traj, has_repeat] {
            command = cmd->get_name();
            if (has_repeat && cmd->count("--repeat") > 0) args["repeat"] = std::to_string(repeat_count);
            if (command == "filter") {
                if (cmd->count("--w-min")) args["w_min"] = ddsim::format_double(w_min);
                if (cmd->count("--w-max")) args["w_max"] = ddsim::format_double(w_max);
                args["w_points"] = std::to_string(w_points);
                args["component"] = component;
                args["mode"] = mode;
            }
            if (command == "calibrate") {
                args["target"] = ddsim::format_double(target);
                args["b_max"] = ddsim::format_double(b_max);
            }
            action = [&, traj] {
                const ddsim::ExperimentConfig c = resolve(o, traj ? traj : 1);
                emit(command, c, args, c.out);
            };
        });
    }

    std::string manifest_path, rerun_out;
    CLI::App* rerun = app.add_subcommand("rerun", "Reproduce an output from its manifest and compare digests");
    rerun->add_option("manifest", manifest_path, "Manifest file")->required();
    rerun->add_option("-o,--out", rerun_out, "Where to write the reproduced output; stdout if omitted");
    rerun->callback([&] {
        action = [&] {
            const ddsim::Manifest m = ddsim::read_manifest(manifest_path);
            const ddsim::ExperimentConfig c = ddsim::parse_config(m.config_text);
            const std::string text = execute(m.command, c, m.args);
            if (rerun_out.empty()) {
                std::cout << text;
            } else {
                ddsim::write_output(rerun_out, text, m.command, m.args, c, 0.0);
            }
            const bool same = ddsim::digest_of(text) == m.digest;
            std::fprintf(stderr, "%s digest %s\n", same ? "identical" : "DIFFERENT", ddsim::digest_of(text).c_str());
            if (!same) throw std::runtime_error("reproduced output differs from the manifest digest");
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        action();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ddsim: %s\n", e.what());
        return 1;
    }
    return 0;
}
