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

#include "ddsim/config.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ddsim/errors.h"
#include "ddsim/text_io.h"

namespace ddsim {

namespace {

namespace pt = boost::property_tree;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool parse_bool(std::string_view text) {
    const std::string v = lower(trim(text));
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ParseError("not a boolean: '" + std::string(text) + "'");
}

std::vector<std::string> split_list(std::string_view text) {
    std::string s(text);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::vector<std::string> out;
    for (auto tok : split_ws(s)) out.emplace_back(tok);
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

std::string grid_text(const std::vector<double>& values) {
    std::vector<std::string> items;
    for (double v : values) items.push_back(format_double(v));
    return join(items);
}

}  // namespace

SequenceSpec parse_sequence_spec(std::string_view text) {
    std::string s = lower(trim(text));
    SequenceSpec spec;
    spec.order = 0;
    auto take_symmetric = [&](size_t stem) {
        if (s.size() > stem && s.back() == 's') {
            spec.symmetric = true;
            s.pop_back();
        }
    };
    auto digits = [&](size_t from) -> int {
        const std::string rest = s.substr(from);
        if (rest.empty() || !std::all_of(rest.begin(), rest.end(), ::isdigit)) {
            throw ParseError("bad sequence name '" + std::string(text) + "'");
        }
        return static_cast<int>(parse_int(rest));
    };
    if (s == "fid") {
        spec.family = Family::kFid;
    } else if (s == "hahn") {
        spec.family = Family::kHahn;
    } else if (s == "kdd") {
        spec.family = Family::kKdd;
    } else if (s == "kdd2") {
        spec.family = Family::kKdd2;
    } else if (s.rfind("cpmg", 0) == 0) {
        spec.family = Family::kCpmg;
        spec.n_pulses = s.size() > 4 ? digits(4) : 2;
    } else if (s.rfind("xy16", 0) == 0) {
        take_symmetric(4);
        if (s != "xy16") throw ParseError("bad sequence name '" + std::string(text) + "'");
        spec.family = Family::kXy16;
    } else if (s.rfind("xy4", 0) == 0) {
        take_symmetric(3);
        if (s != "xy4") throw ParseError("bad sequence name '" + std::string(text) + "'");
        spec.family = Family::kXy4;
        spec.order = 1;
    } else if (s.rfind("vcdd", 0) == 0) {
        take_symmetric(4);
        spec.family = Family::kVcdd;
        spec.order = digits(4);
    } else if (s.rfind("cdd", 0) == 0) {
        take_symmetric(3);
        spec.family = Family::kCdd;
        spec.order = digits(3);
    } else {
        throw ParseError("unknown sequence '" + std::string(text) + "'");
    }
    if ((spec.family == Family::kCdd || spec.family == Family::kVcdd) && spec.order < 1) {
        throw ParseError("concatenation order must be >= 1 in '" + std::string(text) + "'");
    }
    if (spec.family == Family::kCpmg && spec.n_pulses < 1) {
        throw ParseError("CPMG needs at least one pulse");
    }
    return spec;
}

std::string sequence_spec_name(const SequenceSpec& spec) {
    const std::string sym = spec.symmetric ? "s" : "";
    switch (spec.family) {
        case Family::kFid: return "fid";
        case Family::kHahn: return "hahn";
        case Family::kKdd: return "kdd";
        case Family::kKdd2: return "kdd2";
        case Family::kCpmg: return "cpmg" + std::to_string(spec.n_pulses);
        case Family::kXy4: return "xy4" + sym;
        case Family::kXy16: return "xy16" + sym;
        case Family::kCdd: return "cdd" + std::to_string(spec.order) + sym;
        case Family::kCdds: return "cdd" + std::to_string(spec.order) + "s";
        case Family::kVcdd: return "vcdd" + std::to_string(spec.order) + sym;
        case Family::kVcdds: return "vcdd" + std::to_string(spec.order) + "s";
    }
    return "?";
}

SequenceProgram build_sequence(const SequenceSpec& spec) {
    return make_sequence(spec.family, spec.order, spec.symmetric, spec.tau, spec.tau_p, spec.n_pulses);
}

std::vector<double> parse_grid(std::string_view text) {
    const std::string t(trim(text));
    std::vector<double> out;
    if (t.rfind("lin:", 0) == 0 || t.rfind("log:", 0) == 0) {
        std::vector<std::string> parts;
        std::stringstream ss(t.substr(4));
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(item);
        if (parts.size() != 3) throw ParseError("grid '" + t + "' needs a:b:n");
        const double a = parse_double(parts[0]);
        const double b = parse_double(parts[1]);
        const long long n = parse_int(parts[2]);
        if (n < 1) throw ParseError("grid '" + t + "' needs n >= 1");
        const bool logarithmic = t[1] == 'o';
        if (logarithmic && !(a > 0.0 && b > 0.0)) throw ParseError("log grid needs positive ends");
        for (long long i = 0; i < n; ++i) {
            const double w = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
            out.push_back(logarithmic ? a * std::pow(b / a, w) : a + (b - a) * w);
        }
        if (n > 1) out.back() = b;
        return out;
    }
    for (const auto& tok : split_list(t)) out.push_back(parse_double(tok));
    return out;
}

ExperimentConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    static const std::set<std::string> known = {
        "sequence.family",     "sequence.order",     "sequence.symmetric", "sequence.tau",     "sequence.tau_p",
        "sequence.n_pulses",   "sequence.name",      "errors.flip_fraction", "errors.offset",
        "errors.inhomogeneity_rms", "bath.b_rms",    "bath.tau_c",         "run.n_traj",       "run.seed",
        "run.threads",         "run.cycles",         "run.pulse_budget",   "run.horizon",      "run.points",
        "scan.axis",           "scan.values",        "scan.taus",          "scan.sequences",   "scan.orders",
        "output.path"};
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ParseError("config: key '" + section + "' outside a section");
        }
        for (const auto& [key, value] : body) {
            if (!known.count(section + "." + key)) {
                throw ParseError("config: unknown key '" + key + "' in section [" + section + "]");
            }
        }
    }
    ExperimentConfig c;
    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
        return std::nullopt;
    };
    try {
        if (auto v = get("sequence.name")) {
            const SequenceSpec named = parse_sequence_spec(*v);
            c.sequence.family = named.family;
            c.sequence.order = named.order;
            c.sequence.symmetric = named.symmetric;
            c.sequence.n_pulses = named.n_pulses;
        }
        if (auto v = get("sequence.family")) c.sequence.family = parse_family(trim(*v));
        if (auto v = get("sequence.order")) c.sequence.order = static_cast<int>(parse_int(*v));
        if (auto v = get("sequence.symmetric")) c.sequence.symmetric = parse_bool(*v);
        if (auto v = get("sequence.tau")) c.sequence.tau = parse_double(*v);
        if (auto v = get("sequence.tau_p")) c.sequence.tau_p = parse_double(*v);
        if (auto v = get("sequence.n_pulses")) c.sequence.n_pulses = static_cast<int>(parse_int(*v));
        if (auto v = get("errors.flip_fraction")) c.errors.flip_fraction = parse_double(*v);
        if (auto v = get("errors.offset")) c.errors.offset = parse_double(*v);
        if (auto v = get("errors.inhomogeneity_rms")) c.errors.inhomogeneity_rms = parse_double(*v);
        if (auto v = get("bath.b_rms")) c.bath.b_rms = parse_double(*v);
        if (auto v = get("bath.tau_c")) c.bath.tau_c = parse_double(*v);
        if (auto v = get("run.n_traj")) c.n_traj = static_cast<int>(parse_int(*v));
        if (auto v = get("run.seed")) c.master_seed = static_cast<uint64_t>(parse_int(*v));
        if (auto v = get("run.threads")) c.threads = static_cast<int>(parse_int(*v));
        if (auto v = get("run.cycles")) c.cycles = static_cast<int>(parse_int(*v));
        if (auto v = get("run.pulse_budget")) c.pulse_budget = static_cast<int>(parse_int(*v));
        if (auto v = get("run.horizon")) c.horizon = parse_double(*v);
        if (auto v = get("run.points")) c.points = static_cast<int>(parse_int(*v));
        if (auto v = get("scan.axis")) c.axis = lower(trim(*v));
        if (auto v = get("scan.values")) c.axis_values = parse_grid(*v);
        if (auto v = get("scan.taus")) c.taus = parse_grid(*v);
        if (auto v = get("scan.sequences")) {
            for (const auto& tok : split_list(*v)) c.sequences.push_back(parse_sequence_spec(tok));
        }
        if (auto v = get("scan.orders")) {
            for (const auto& tok : split_list(*v)) c.orders.push_back(static_cast<int>(parse_int(tok)));
        }
        if (auto v = get("output.path")) c.out = std::string(trim(*v));
    } catch (const ParseError& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::runtime_error& e) {
        throw ParseError(e.what());
    }
    try {
        return parse_config(text);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string format_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[sequence]\n";
    out << "family = " << family_name(c.sequence.family) << '\n';
    out << "order = " << c.sequence.order << '\n';
    out << "symmetric = " << (c.sequence.symmetric ? "true" : "false") << '\n';
    out << "tau = " << format_double(c.sequence.tau) << '\n';
    out << "tau_p = " << format_double(c.sequence.tau_p) << '\n';
    out << "n_pulses = " << c.sequence.n_pulses << '\n';
    out << "\n[errors]\n";
    out << "flip_fraction = " << format_double(c.errors.flip_fraction) << '\n';
    out << "offset = " << format_double(c.errors.offset) << '\n';
    out << "inhomogeneity_rms = " << format_double(c.errors.inhomogeneity_rms) << '\n';
    out << "\n[bath]\n";
    out << "b_rms = " << format_double(c.bath.b_rms) << '\n';
    out << "tau_c = " << format_double(c.bath.tau_c) << '\n';
    out << "\n[run]\n";
    out << "n_traj = " << c.n_traj << '\n';
    out << "seed = " << c.master_seed << '\n';
    out << "threads = " << c.threads << '\n';
    out << "cycles = " << c.cycles << '\n';
    out << "pulse_budget = " << c.pulse_budget << '\n';
    out << "horizon = " << format_double(c.horizon) << '\n';
    out << "points = " << c.points << '\n';
    out << "\n[scan]\n";
    out << "axis = " << c.axis << '\n';
    if (!c.axis_values.empty()) out << "values = " << grid_text(c.axis_values) << '\n';
    if (!c.taus.empty()) out << "taus = " << grid_text(c.taus) << '\n';
    if (!c.sequences.empty()) {
        std::vector<std::string> names;
        for (const auto& s : c.sequences) names.push_back(sequence_spec_name(s));
        out << "sequences = " << join(names) << '\n';
    }
    if (!c.orders.empty()) {
        std::vector<std::string> names;
        for (int n : c.orders) names.push_back(std::to_string(n));
        out << "orders = " << join(names) << '\n';
    }
    if (!c.out.empty()) out << "\n[output]\npath = " << c.out << '\n';
    return out.str();
}

void validate(const ExperimentConfig& c) {
    validate(c.errors);
    validate(c.bath);
    if (c.n_traj < 1) throw InvalidParameter("n_traj must be >= 1");
    if (c.cycles < 0 || c.pulse_budget < 0 || c.points < 1 || c.horizon < 0.0) {
        throw InvalidParameter("readout settings must be nonnegative (points >= 1)");
    }
    if (!(c.sequence.tau > 0.0) || !(c.sequence.tau_p >= 0.0)) {
        throw InvalidParameter("sequence needs tau > 0 and tau_p >= 0");
    }
    for (const auto* grid : {&c.axis_values, &c.taus}) {
        for (size_t i = 1; i < grid->size(); ++i) {
            if (!((*grid)[i] > (*grid)[i - 1])) throw InvalidParameter("scan grids must be strictly increasing");
        }
    }
    for (double t : c.taus) {
        if (!(t > 0.0)) throw InvalidParameter("scan taus must be > 0");
    }
    for (size_t i = 1; i < c.orders.size(); ++i) {
        if (c.orders[i] <= c.orders[i - 1]) throw InvalidParameter("orders must be strictly increasing");
    }
    if (c.axis != "flip" && c.axis != "pulse-length" && c.axis != "offset") {
        throw InvalidParameter("scan axis must be flip, pulse-length or offset");
    }
}

}  // namespace ddsim
