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

#include "ddsim/seq_ir.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "ddsim/errors.h"
#include "ddsim/text_io.h"

namespace ddsim {

namespace {

constexpr double kSnapTolerance = 1e-9;

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 identity3() {
    Mat3 m{};
    for (int i = 0; i < 3; ++i) {
        m[i][i] = 1.0;
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

// Rotation by pi about an in-plane unit axis: 2 n n^T - 1.
Mat3 pi_rotation(const std::array<double, 3>& n) {
    Mat3 m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m[i][j] = 2.0 * n[i] * n[j] - (i == j ? 1.0 : 0.0);
        }
    }
    return m;
}

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(std::string(what) + " must be > 0");
    }
}

void require_nonnegative(double value, const char* what) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(std::string(what) + " must be >= 0");
    }
}

PulseEvent make_pulse(double phase_deg, double tau_p, int sense = 1, bool generating = false) {
    PulseEvent p;
    p.phase = canonical_phase(deg_to_rad(phase_deg));
    p.duration = tau_p;
    p.sense = sense;
    p.generating = generating;
    return p;
}

void push_delay(std::vector<Event>& events, double duration) {
    if (duration <= 0.0) {
        return;
    }
    if (!events.empty()) {
        if (auto* d = std::get_if<DelayEvent>(&events.back())) {
            d->duration += duration;
            return;
        }
    }
    events.emplace_back(DelayEvent{duration});
}

void append(std::vector<Event>& events, const std::vector<Event>& tail) {
    for (const Event& e : tail) {
        if (const auto* d = std::get_if<DelayEvent>(&e)) {
            push_delay(events, d->duration);
        } else {
            events.push_back(e);
        }
    }
}

// Evenly spaced pulses: tau before every pulse, or tau/2 - P - tau - ... - P - tau/2.
std::vector<Event> assemble(const std::vector<PulseEvent>& pulses, double tau, bool symmetric) {
    std::vector<Event> events;
    for (size_t i = 0; i < pulses.size(); ++i) {
        push_delay(events, (symmetric && i == 0) ? tau / 2 : tau);
        events.emplace_back(pulses[i]);
    }
    if (symmetric) {
        // The leading delay was tau/2, the last interior one needs no correction.
        push_delay(events, tau / 2);
    }
    return events;
}

SequenceProgram make_program(std::vector<Event> events, Family family, int order, bool symmetric,
                             double tau, double tau_p) {
    SequenceProgram p;
    p.events = std::move(events);
    p.family = family;
    p.order = order;
    p.symmetric = symmetric;
    p.tau = tau;
    p.tau_p = tau_p;
    return p;
}

// XY4 pulse with optional bars on the x and y roles.
PulseEvent xy_pulse(bool is_x, bool bar_x, bool bar_y, double tau_p) {
    const bool bar = is_x ? bar_x : bar_y;
    return make_pulse((is_x ? 0.0 : 90.0) + (bar ? 180.0 : 0.0), tau_p, bar ? -1 : 1);
}

// C_n = C_{n-1} X C_{n-1} Y C_{n-1} X C_{n-1} Y, C_0 = tau.
void cdd_asym(int n, double tau, double tau_p, std::vector<Event>& out) {
    if (n == 0) {
        push_delay(out, tau);
        return;
    }
    for (int k = 0; k < 4; ++k) {
        cdd_asym(n - 1, tau, tau_p, out);
        out.emplace_back(make_pulse(k % 2 == 0 ? 0.0 : 90.0, tau_p, 1, n >= 2));
    }
}

// Half cycle of C(s)_n: sqrt(C(s)_{n-1}) X C(s)_{n-1} Y sqrt(C(s)_{n-1}); the full cycle is the
// half cycle twice, since C(s)_{n-1} is itself the square of its half.
void cdds_half(int n, double tau, double tau_p, std::vector<Event>& out) {
    if (n == 0) {
        push_delay(out, tau / 2);
        return;
    }
    cdds_half(n - 1, tau, tau_p, out);
    out.emplace_back(make_pulse(0.0, tau_p, 1, n >= 2));
    cdds_half(n - 1, tau, tau_p, out);
    cdds_half(n - 1, tau, tau_p, out);
    out.emplace_back(make_pulse(90.0, tau_p, 1, n >= 2));
    cdds_half(n - 1, tau, tau_p, out);
}

// vC_n(X,Y) = vC_{n-1}(X,Y) vC_{n-1}(X,Ybar) vC_{n-1}(Xbar,Ybar) vC_{n-1}(Xbar,Y).
void vcdd_pulses(int n, bool bar_x, bool bar_y, double tau_p, std::vector<PulseEvent>& out) {
    if (n == 1) {
        for (int k = 0; k < 4; ++k) {
            out.push_back(xy_pulse(k % 2 == 0, bar_x, bar_y, tau_p));
        }
        return;
    }
    vcdd_pulses(n - 1, bar_x, bar_y, tau_p, out);
    vcdd_pulses(n - 1, bar_x, !bar_y, tau_p, out);
    vcdd_pulses(n - 1, !bar_x, !bar_y, tau_p, out);
    vcdd_pulses(n - 1, !bar_x, bar_y, tau_p, out);
}

// Symmetric vCDD: the first inner block is split at its time midpoint and its halves placed at
// both ends, mirroring the half-cycle convention of CDD(s).
std::vector<Event> vcdds_events(int n, bool bar_x, bool bar_y, double tau, double tau_p) {
    if (n == 1) {
        std::vector<PulseEvent> pulses;
        for (int k = 0; k < 4; ++k) {
            pulses.push_back(xy_pulse(k % 2 == 0, bar_x, bar_y, tau_p));
        }
        return assemble(pulses, tau, true);
    }
    std::vector<Event> inner = vcdds_events(n - 1, bar_x, bar_y, tau, tau_p);
    const size_t mid = inner.size() / 2;
    const double mid_delay = std::get<DelayEvent>(inner[mid]).duration;
    std::vector<Event> out(inner.begin(), inner.begin() + static_cast<std::ptrdiff_t>(mid));
    push_delay(out, mid_delay / 2);
    append(out, vcdds_events(n - 1, bar_x, !bar_y, tau, tau_p));
    append(out, vcdds_events(n - 1, !bar_x, !bar_y, tau, tau_p));
    append(out, vcdds_events(n - 1, !bar_x, bar_y, tau, tau_p));
    push_delay(out, mid_delay / 2);
    append(out, std::vector<Event>(inner.begin() + static_cast<std::ptrdiff_t>(mid) + 1, inner.end()));
    return out;
}

void append_knill_block(std::vector<PulseEvent>& out, double phase_deg, double tau_p) {
    for (double offset : {30.0, 0.0, 90.0, 0.0, 30.0}) {
        out.push_back(make_pulse(phase_deg + offset, tau_p));
    }
}

// Degrees are converted through long double on the text path so that the decimal written by
// degrees_text always parses back onto the same double.
double parse_degrees(std::string_view token) {
    const std::string t(trim(token));
    char* end = nullptr;
    const long double d = std::strtold(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) {
        throw ParseError("not a number: '" + t + "'");
    }
    return static_cast<double>(d * std::numbers::pi_v<long double> / 180.0L);
}

std::string degrees_text(double radians) {
    std::string text = format_double(rad_to_deg(radians));
    if (parse_degrees(text) == radians) {
        return text;
    }
    const long double deg = static_cast<long double>(radians) * 180.0L / std::numbers::pi_v<long double>;
    for (int digits = 17; digits <= 24; ++digits) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*Lg", digits, deg);
        if (parse_degrees(buf) == radians) {
            return buf;
        }
    }
    throw std::runtime_error("no exact degree representation for angle " + format_double(radians));
}

}  // namespace

std::string_view family_name(Family family) {
    switch (family) {
        case Family::kFid: return "FID";
        case Family::kHahn: return "HAHN";
        case Family::kCpmg: return "CPMG";
        case Family::kXy4: return "XY4";
        case Family::kXy16: return "XY16";
        case Family::kCdd: return "CDD";
        case Family::kCdds: return "CDDS";
        case Family::kVcdd: return "VCDD";
        case Family::kVcdds: return "VCDDS";
        case Family::kKdd: return "KDD";
        case Family::kKdd2: return "KDD2";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (Family f : {Family::kFid, Family::kHahn, Family::kCpmg, Family::kXy4, Family::kXy16, Family::kCdd,
                     Family::kCdds, Family::kVcdd, Family::kVcdds, Family::kKdd, Family::kKdd2}) {
        if (family_name(f) == upper) {
            return f;
        }
    }
    throw ParseError("unknown sequence family '" + std::string(name) + "'");
}

double deg_to_rad(double degrees) { return degrees * kPi / 180.0; }
double rad_to_deg(double radians) { return radians * 180.0 / kPi; }

double canonical_phase(double radians) {
    if (!std::isfinite(radians)) {
        throw InvalidParameter("phase must be finite");
    }
    double r = std::fmod(radians, 2 * kPi);
    if (r < 0) {
        r += 2 * kPi;
    }
    const double k = std::round(rad_to_deg(r));
    if (std::abs(r - deg_to_rad(k)) < kSnapTolerance) {
        return deg_to_rad(std::fmod(k, 360.0));
    }
    return r >= 2 * kPi ? 0.0 : r;
}

std::array<double, 3> pulse_axis(double phase) {
    const double p = canonical_phase(phase);
    if (p == deg_to_rad(0)) return {1.0, 0.0, 0.0};
    if (p == deg_to_rad(90)) return {0.0, 1.0, 0.0};
    if (p == deg_to_rad(180)) return {-1.0, 0.0, 0.0};
    if (p == deg_to_rad(270)) return {0.0, -1.0, 0.0};
    return {std::cos(p), std::sin(p), 0.0};
}

bool PulseEvent::operator==(const PulseEvent& other) const {
    return phase == other.phase && angle == other.angle && duration == other.duration &&
           generating == other.generating && flip_error == other.flip_error;
}

double event_duration(const Event& event) {
    return std::visit([](const auto& e) { return e.duration; }, event);
}

SequenceProgram gen_xy4(double tau, double tau_p, bool symmetric) {
    require_positive(tau, "tau");
    require_nonnegative(tau_p, "tau_p");
    std::vector<PulseEvent> pulses;
    for (int k = 0; k < 4; ++k) {
        pulses.push_back(make_pulse(k % 2 == 0 ? 0.0 : 90.0, tau_p));
    }
    return make_program(assemble(pulses, tau, symmetric), Family::kXy4, 1, symmetric, tau, tau_p);
}

SequenceProgram gen_xy16(double tau, double tau_p, bool symmetric) {
    require_positive(tau, "tau");
    require_nonnegative(tau_p, "tau_p");
    // XY8 = XY4 then XY4 reversed; XY16 = XY8 then XY8 with every phase advanced by pi.
    const double xy8[8] = {0, 90, 0, 90, 90, 0, 90, 0};
    std::vector<PulseEvent> pulses;
    for (int inverted = 0; inverted < 2; ++inverted) {
        for (double ph : xy8) {
            pulses.push_back(make_pulse(ph + 180.0 * inverted, tau_p, inverted ? -1 : 1));
        }
    }
    return make_program(assemble(pulses, tau, symmetric), Family::kXy16, 0, symmetric, tau, tau_p);
}

SequenceProgram gen_cdd(int order, double tau, double tau_p, bool symmetric) {
    if (order < 1) {
        throw InvalidParameter("CDD order must be >= 1");
    }
    require_positive(tau, "tau");
    require_nonnegative(tau_p, "tau_p");
    std::vector<Event> events;
    if (symmetric) {
        cdds_half(order, tau, tau_p, events);
        std::vector<Event> half = events;
        append(events, half);
    } else {
        cdd_asym(order, tau, tau_p, events);
    }
    return make_program(std::move(events), symmetric ? Family::kCdds : Family::kCdd, order, symmetric, tau,
                        tau_p);
}

SequenceProgram gen_vcdd(int order, double tau, double tau_p, bool symmetric) {
    if (order < 1) {
        throw InvalidParameter("vCDD order must be >= 1");
    }
    require_positive(tau, "tau");
    require_nonnegative(tau_p, "tau_p");
    std::vector<Event> events;
    if (symmetric) {
        events = vcdds_events(order, false, false, tau, tau_p);
    } else {
        std::vector<PulseEvent> pulses;
        vcdd_pulses(order, false, false, tau_p, pulses);
        events = assemble(pulses, tau, false);
    }
    return make_program(std::move(events), symmetric ? Family::kVcdds : Family::kVcdd, order, symmetric, tau,
                        tau_p);
}

std::vector<PulseEvent> knill_composite(double phase, double tau_p) {
    require_nonnegative(tau_p, "tau_p");
    std::vector<PulseEvent> out;
    append_knill_block(out, rad_to_deg(canonical_phase(phase)), tau_p);
    return out;
}

SequenceProgram gen_kdd(double tau, double tau_p) {
    require_positive(tau, "tau");
    require_nonnegative(tau_p, "tau_p");
    std::vector<PulseEvent> pulses;
    for (double phi : {0.0, 90.0, 0.0, 90.0}) {
        append_knill_block(pulses, phi, tau_p);
    }
    return make_program(assemble(pulses, tau, false), Family::kKdd, 0, false, tau, tau_p);
}

SequenceProgram gen_kdd2(double tau, double tau_p) {
    require_positive(tau, "tau");
    require_nonnegative(tau_p, "tau_p");
    std::vector<PulseEvent> pulses;
    for (int rep = 0; rep < 2; ++rep) {
        for (double phi : {30.0, 0.0, 90.0, 0.0, 30.0}) {
            append_knill_block(pulses, phi, tau_p);
        }
    }
    return make_program(assemble(pulses, tau, false), Family::kKdd2, 0, false, tau, tau_p);
}

SequenceProgram gen_cpmg(double tau, double tau_p, int n_pulses, double phase) {
    require_positive(tau, "tau");
    require_nonnegative(tau_p, "tau_p");
    if (n_pulses < 1) {
        throw InvalidParameter("CPMG needs at least one pulse");
    }
    std::vector<Event> events;
    PulseEvent p = make_pulse(0.0, tau_p);
    p.phase = canonical_phase(phase);
    for (int k = 0; k < n_pulses; ++k) {
        push_delay(events, k == 0 ? tau : 2 * tau);
        events.emplace_back(p);
    }
    push_delay(events, tau);
    return make_program(std::move(events), Family::kCpmg, 0, true, tau, tau_p);
}

SequenceProgram gen_hahn(double tau, double tau_p, double phase) {
    SequenceProgram p = gen_cpmg(tau, tau_p, 1, phase);
    p.family = Family::kHahn;
    return p;
}

SequenceProgram gen_fid(double duration) {
    require_positive(duration, "FID duration");
    return make_program({DelayEvent{duration}}, Family::kFid, 0, false, duration, 0.0);
}

SequenceProgram virtualize(const SequenceProgram& program) {
    if (program.family != Family::kCdd && program.family != Family::kCdds) {
        throw PreconditionError("virtualize expects a CDD program");
    }
    const bool tagged = std::any_of(program.events.begin(), program.events.end(), [](const Event& e) {
        const auto* p = std::get_if<PulseEvent>(&e);
        return p != nullptr && p->generating;
    });
    if (program.order >= 2 && !tagged) {
        throw PreconditionError("virtualize: CDD program has no tagged generating pulses");
    }

    // frame = rotation of the product of generating pulses passed so far (time order).
    Mat3 frame = identity3();
    std::vector<Event> events;
    for (const Event& e : program.events) {
        const auto* p = std::get_if<PulseEvent>(&e);
        if (p == nullptr) {
            push_delay(events, std::get<DelayEvent>(e).duration);
            continue;
        }
        if (p->angle != kPi) {
            throw UnsupportedSequence("virtualize supports pi pulses only");
        }
        if (p->generating) {
            frame = mul(pi_rotation(pulse_axis(p->phase)), frame);
            continue;
        }
        // The pulse axis seen through the accumulated frame: frame^T n.
        const auto n = pulse_axis(p->phase);
        double moved[3] = {0, 0, 0};
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 3; ++k) {
                moved[i] += frame[k][i] * n[k];
            }
        }
        if (std::abs(moved[2]) > 1e-12) {
            throw UnsupportedSequence("virtualize: conjugated pulse axis left the xy-plane");
        }
        PulseEvent q = *p;
        q.phase = canonical_phase(std::atan2(moved[1], moved[0]));
        const double flipped = std::abs(canonical_phase(q.phase - p->phase) - kPi);
        if (flipped < 1e-9) {
            q.sense = -p->sense;
        }
        events.emplace_back(q);
    }
    const Mat3 id = identity3();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (std::abs(frame[i][j] - id[i][j]) > 1e-9) {
                throw PreconditionError("virtualize: generating pulses do not close to the identity");
            }
        }
    }
    SequenceProgram out = program;
    out.events = std::move(events);
    out.family = program.family == Family::kCdd ? Family::kVcdd : Family::kVcdds;
    return out;
}

SequenceProgram repeat(const SequenceProgram& program, int k) {
    if (k < 1) {
        throw InvalidParameter("repeat count must be >= 1");
    }
    SequenceProgram out = program;
    out.events.clear();
    for (int i = 0; i < k; ++i) {
        append(out.events, program.events);
    }
    out.repetitions = program.repetitions * k;
    return out;
}

SequenceProgram canonicalize(const SequenceProgram& program) {
    SequenceProgram out = program;
    out.events.clear();
    for (const Event& e : program.events) {
        if (const auto* p = std::get_if<PulseEvent>(&e)) {
            PulseEvent q = *p;
            q.phase = canonical_phase(q.phase);
            out.events.emplace_back(q);
        } else {
            push_delay(out.events, std::get<DelayEvent>(e).duration);
        }
    }
    return out;
}

int pulse_count(const SequenceProgram& program) {
    return static_cast<int>(std::count_if(program.events.begin(), program.events.end(), is_pulse));
}

double cycle_time(const SequenceProgram& program) {
    double t = 0.0;
    for (const Event& e : program.events) {
        t += event_duration(e);
    }
    return t;
}

double duty_cycle(const SequenceProgram& program) {
    double on = 0.0;
    double total = 0.0;
    for (const Event& e : program.events) {
        const double d = event_duration(e);
        total += d;
        if (is_pulse(e)) {
            on += d;
        }
    }
    return total > 0.0 ? on / total : 0.0;
}

SequenceProgram make_sequence(Family family, int order, bool symmetric, double tau, double tau_p, int n_pulses) {
    switch (family) {
        case Family::kFid: return gen_fid(tau);
        case Family::kHahn: return gen_hahn(tau, tau_p);
        case Family::kCpmg: return gen_cpmg(tau, tau_p, n_pulses);
        case Family::kXy4: return gen_xy4(tau, tau_p, symmetric);
        case Family::kXy16: return gen_xy16(tau, tau_p, symmetric);
        case Family::kCdd: return gen_cdd(order, tau, tau_p, symmetric);
        case Family::kCdds: return gen_cdd(order, tau, tau_p, true);
        case Family::kVcdd: return gen_vcdd(order, tau, tau_p, symmetric);
        case Family::kVcdds: return gen_vcdd(order, tau, tau_p, true);
        case Family::kKdd: return gen_kdd(tau, tau_p);
        case Family::kKdd2: return gen_kdd2(tau, tau_p);
    }
    throw InvalidParameter("unknown family");
}

std::string serialize(const SequenceProgram& program) {
    std::ostringstream out;
    out << "#family " << family_name(program.family) << '\n';
    out << "#order " << program.order << '\n';
    out << "#symmetric " << (program.symmetric ? 1 : 0) << '\n';
    out << "#tau " << format_double(program.tau) << '\n';
    out << "#tau_p " << format_double(program.tau_p) << '\n';
    out << "#repetitions " << program.repetitions << '\n';
    for (const Event& e : program.events) {
        if (const auto* p = std::get_if<PulseEvent>(&e)) {
            out << "P " << degrees_text(p->phase) << ' ' << degrees_text(p->angle) << ' '
                << format_double(p->duration);
            if (p->generating) {
                out << " G";
            }
            if (p->flip_error != 0.0) {
                out << " eps=" << format_double(p->flip_error);
            }
            out << '\n';
        } else {
            out << "D " << format_double(event_duration(e)) << '\n';
        }
    }
    return out.str();
}

SequenceProgram parse_program(std::string_view text) {
    SequenceProgram program;
    size_t line_no = 0;
    while (!text.empty()) {
        const size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        auto tok = split_ws(line);
        if (tok.empty()) {
            continue;
        }
        const auto fail = [&](const std::string& why) {
            throw ParseError("program line " + std::to_string(line_no) + ": " + why);
        };
        try {
            if (tok[0].front() == '#') {
                if (tok.size() != 2) fail("header needs exactly one value");
                const std::string_view key = tok[0].substr(1);
                if (key == "family") program.family = parse_family(tok[1]);
                else if (key == "order") program.order = static_cast<int>(parse_int(tok[1]));
                else if (key == "symmetric") program.symmetric = parse_int(tok[1]) != 0;
                else if (key == "tau") program.tau = parse_double(tok[1]);
                else if (key == "tau_p") program.tau_p = parse_double(tok[1]);
                else if (key == "repetitions") program.repetitions = static_cast<int>(parse_int(tok[1]));
                else fail("unknown header '" + std::string(key) + "'");
            } else if (tok[0] == "D") {
                if (tok.size() != 2) fail("D needs one duration");
                const double d = parse_double(tok[1]);
                if (!(d >= 0.0)) fail("negative delay");
                program.events.emplace_back(DelayEvent{d});
            } else if (tok[0] == "P") {
                if (tok.size() < 4) fail("P needs phase, angle and duration");
                PulseEvent p;
                p.phase = canonical_phase(parse_degrees(tok[1]));
                p.angle = parse_degrees(tok[2]);
                p.duration = parse_double(tok[3]);
                if (!(p.duration >= 0.0)) fail("negative pulse duration");
                for (size_t i = 4; i < tok.size(); ++i) {
                    if (tok[i] == "G") p.generating = true;
                    else if (tok[i].starts_with("eps=")) p.flip_error = parse_double(tok[i].substr(4));
                    else fail("unknown pulse flag '" + std::string(tok[i]) + "'");
                }
                program.events.emplace_back(p);
            } else {
                fail("unknown record '" + std::string(tok[0]) + "'");
            }
        } catch (const ParseError& e) {
            if (std::string_view(e.what()).starts_with("program line")) throw;
            fail(e.what());
        }
    }
    return program;
}

}  // namespace ddsim
