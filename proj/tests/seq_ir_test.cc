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

#include <random>

#include "gtest/gtest.h"

#include "ddsim/errors.h"
#include "oracles.h"

using namespace ddsim;

namespace {

std::vector<double> phases_deg(const SequenceProgram& p) {
    std::vector<double> out;
    for (const auto& e : p.events) {
        if (const auto* q = std::get_if<PulseEvent>(&e)) {
            out.push_back(std::round(rad_to_deg(q->phase) * 1e6) / 1e6);
        }
    }
    return out;
}

std::vector<double> delays(const SequenceProgram& p) {
    std::vector<double> out;
    for (const auto& e : p.events) {
        if (const auto* d = std::get_if<DelayEvent>(&e)) {
            out.push_back(d->duration);
        }
    }
    return out;
}

// Kinds, durations and nominal angles read the same backwards.
bool is_duration_palindrome(const SequenceProgram& p) {
    const auto& ev = p.events;
    for (size_t i = 0, j = ev.size() - 1; i < j; ++i, --j) {
        if (ev[i].index() != ev[j].index() || event_duration(ev[i]) != event_duration(ev[j])) {
            return false;
        }
        if (is_pulse(ev[i]) && std::get<PulseEvent>(ev[i]).angle != std::get<PulseEvent>(ev[j]).angle) {
            return false;
        }
    }
    return true;
}

int cdd_count_recurrence(int n) { return n == 1 ? 4 : 4 * cdd_count_recurrence(n - 1) + 4; }

}  // namespace

TEST(seq_ir, xy4_layout) {
    const auto a = gen_xy4(1.0, 0.0, false);
    EXPECT_EQ(phases_deg(a), (std::vector<double>{0, 90, 0, 90}));
    EXPECT_EQ(delays(a), (std::vector<double>{1, 1, 1, 1}));
    EXPECT_TRUE(std::holds_alternative<DelayEvent>(a.events.front()));
    EXPECT_EQ(cycle_time(a), 4.0);

    const auto s = gen_xy4(1.0, 0.0, true);
    EXPECT_EQ(phases_deg(s), (std::vector<double>{0, 90, 0, 90}));
    EXPECT_EQ(delays(s), (std::vector<double>{0.5, 1, 1, 1, 0.5}));

    for (double tau : {1e-6, 3.3e-5, 2.0}) {
        EXPECT_EQ(pulse_count(gen_xy4(tau, 1e-6, false)), 4);
        EXPECT_DOUBLE_EQ(cycle_time(gen_xy4(tau, 1e-6, true)), 4 * tau + 4e-6);
    }
    EXPECT_THROW(gen_xy4(0.0, 0.0, false), InvalidParameter);
    EXPECT_THROW(gen_xy4(-1.0, 0.0, true), InvalidParameter);
    EXPECT_THROW(gen_xy4(1.0, -1.0, true), InvalidParameter);
}

TEST(seq_ir, cdd_counts_and_cycle_time) {
    EXPECT_EQ(gen_cdd(1, 2.0, 0.1, false).events, gen_xy4(2.0, 0.1, false).events);
    EXPECT_EQ(gen_cdd(1, 2.0, 0.1, true).events, gen_xy4(2.0, 0.1, true).events);
    for (int n = 1; n <= 4; ++n) {
        EXPECT_EQ(pulse_count(gen_cdd(n, 1.0, 0.0, false)), cdd_count_recurrence(n));
        EXPECT_EQ(pulse_count(gen_cdd(n, 1.0, 0.0, true)), cdd_count_recurrence(n));
        EXPECT_EQ(pulse_count(gen_cdd(n, 1.0, 0.0, false)), ((1 << (2 * n + 2)) - 4) / 3);
    }
    EXPECT_EQ(pulse_count(gen_cdd(2, 1.0, 0.0, false)), 20);
    EXPECT_EQ(pulse_count(gen_cdd(3, 1.0, 0.0, false)), 84);

    const double tau = 9e-5, tau_p = 1e-5;
    EXPECT_DOUBLE_EQ(cycle_time(gen_cdd(2, tau, tau_p, false)), 16 * tau + 20 * tau_p);
    EXPECT_DOUBLE_EQ(cycle_time(gen_cdd(2, tau, tau_p, true)), 16 * tau + 20 * tau_p);
    EXPECT_THROW(gen_cdd(0, tau, tau_p, false), InvalidParameter);
}

TEST(seq_ir, cdd_generating_pulses_abut_inner_blocks) {
    const auto p = gen_cdd(2, 1.0, 0.5, false);
    // C1 = D P D P D P D P, then the generating X directly after the last inner Y.
    ASSERT_TRUE(is_pulse(p.events[7]));
    ASSERT_TRUE(is_pulse(p.events[8]));
    EXPECT_FALSE(std::get<PulseEvent>(p.events[7]).generating);
    EXPECT_TRUE(std::get<PulseEvent>(p.events[8]).generating);
    EXPECT_EQ(std::get<PulseEvent>(p.events[8]).duration, 0.5);
    int generating = 0;
    for (const auto& e : p.events) {
        if (const auto* q = std::get_if<PulseEvent>(&e)) {
            generating += q->generating;
        }
    }
    EXPECT_EQ(generating, 4);
}

TEST(seq_ir, vcdd_layout) {
    EXPECT_EQ(gen_vcdd(1, 1.0, 0.2, false).events, gen_xy4(1.0, 0.2, false).events);
    EXPECT_EQ(gen_vcdd(1, 1.0, 0.2, true).events, gen_xy4(1.0, 0.2, true).events);
    const auto v2 = gen_vcdd(2, 1.0, 0.0, false);
    EXPECT_EQ(phases_deg(v2),
              (std::vector<double>{0, 90, 0, 90, 0, 270, 0, 270, 180, 270, 180, 270, 180, 90, 180, 90}));
    for (int n = 1; n <= 4; ++n) {
        EXPECT_EQ(pulse_count(gen_vcdd(n, 1.0, 0.0, false)), 1 << (2 * n));
        EXPECT_EQ(pulse_count(gen_vcdd(n, 1.0, 0.0, true)), 1 << (2 * n));
    }
    const double tau = 9e-5, tau_p = 1e-5;
    EXPECT_DOUBLE_EQ(cycle_time(gen_vcdd(2, tau, tau_p, false)), 16 * tau + 16 * tau_p);
    EXPECT_DOUBLE_EQ(cycle_time(gen_vcdd(2, tau, tau_p, true)), 16 * tau + 16 * tau_p);
    EXPECT_THROW(gen_vcdd(0, tau, tau_p, true), InvalidParameter);
    for (const auto& e : gen_vcdd(3, tau, tau_p, false).events) {
        if (const auto* q = std::get_if<PulseEvent>(&e)) {
            EXPECT_FALSE(q->generating);
        }
    }
}

TEST(seq_ir, barred_pulse_equals_shifted_phase) {
    const auto v2 = gen_vcdd(2, 1.0, 0.0, false);
    // Events alternate delay/pulse; index 11 is pulse 5, the Ybar of the second block.
    const auto& bar = std::get<PulseEvent>(v2.events[11]);
    ASSERT_EQ(bar.sense, -1);
    PulseEvent plain;
    plain.phase = canonical_phase(deg_to_rad(90) + kPi);
    plain.sense = 1;
    EXPECT_EQ(bar, plain);
    EXPECT_EQ(canonical_phase(kPi / 2 + kPi), canonical_phase(3 * kPi / 2));
    EXPECT_EQ(canonical_phase(-kPi / 2), canonical_phase(3 * kPi / 2));
    EXPECT_EQ(canonical_phase(2 * kPi), 0.0);
    EXPECT_EQ(canonical_phase(4 * kPi + kPi / 6), deg_to_rad(30));
}

TEST(seq_ir, virtualize_matches_vcdd) {
    for (int n = 1; n <= 4; ++n) {
        const auto v = virtualize(gen_cdd(n, 1e-4, 1e-5, false));
        EXPECT_EQ(canonicalize(v).events, canonicalize(gen_vcdd(n, 1e-4, 1e-5, false)).events) << n;
        EXPECT_EQ(v.family, Family::kVcdd);
        EXPECT_EQ(pulse_count(v), 1 << (2 * n));
    }
    // Symmetric construction agrees with the virtualized CDD(s) for the orders in use.
    for (int n = 1; n <= 2; ++n) {
        EXPECT_EQ(canonicalize(virtualize(gen_cdd(n, 1e-4, 1e-5, true))).events,
                  canonicalize(gen_vcdd(n, 1e-4, 1e-5, true)).events)
            << n;
    }
}

TEST(seq_ir, virtualize_preserves_ideal_unitary) {
    for (int n = 1; n <= 3; ++n) {
        for (bool sym : {false, true}) {
            const auto cdd = gen_cdd(n, 1.0, 0.0, sym);
            const auto v = virtualize(cdd);
            for (double b : {-0.7, -0.2, 0.05, 0.4, 1.3}) {
                const Eigen::Vector3d field(0, 0, b);
                EXPECT_LT(oracle::infidelity(oracle::program_unitary(cdd, field), oracle::program_unitary(v, field)),
                          1e-12);
            }
        }
    }
}

TEST(seq_ir, virtualize_commutation_identity) {
    // (Y X Y X) X = X (Ybar X Ybar X), operators read right to left.
    const double x = 0, y = kPi / 2;
    auto pulse = [](double phase) {
        PulseEvent p;
        p.phase = canonical_phase(phase);
        return p;
    };
    const auto lhs = oracle::pulses_unitary({pulse(x), pulse(x), pulse(y), pulse(x), pulse(y)}, 0.0);
    const auto rhs = oracle::pulses_unitary({pulse(x), pulse(y + kPi), pulse(x), pulse(y + kPi), pulse(x)}, 0.0);
    EXPECT_LT(oracle::infidelity(lhs, rhs), 1e-14);

    // The same rewrite performed by virtualize on a tagged program.
    SequenceProgram p;
    p.family = Family::kCdd;
    p.order = 2;
    PulseEvent g = pulse(x);
    g.generating = true;
    p.events = {g, pulse(x), pulse(y), pulse(x), pulse(y), g};
    const auto v = virtualize(p);
    ASSERT_EQ(v.events.size(), 4u);
    EXPECT_EQ(phases_deg(v), (std::vector<double>{0, 270, 0, 270}));
}

TEST(seq_ir, virtualize_rejects_bad_input) {
    auto untagged = gen_cdd(2, 1.0, 0.0, false);
    for (auto& e : untagged.events) {
        if (auto* q = std::get_if<PulseEvent>(&e)) {
            q->generating = false;
        }
    }
    EXPECT_THROW(virtualize(untagged), PreconditionError);
    EXPECT_THROW(virtualize(gen_xy4(1.0, 0.0, false)), PreconditionError);
    EXPECT_EQ(virtualize(gen_cdd(1, 1.0, 0.0, false)).events, gen_xy4(1.0, 0.0, false).events);
}

TEST(seq_ir, kdd_family) {
    const auto kdd = gen_kdd(1.0, 0.1);
    EXPECT_EQ(pulse_count(kdd), 20);
    EXPECT_EQ(pulse_count(gen_kdd2(1.0, 0.1)), 50);
    const auto pi0 = knill_composite(0.0, 0.0);
    std::vector<double> got;
    for (const auto& p : pi0) got.push_back(std::round(rad_to_deg(p.phase)));
    EXPECT_EQ(got, (std::vector<double>{30, 0, 90, 0, 30}));
    const auto ph = phases_deg(kdd);
    EXPECT_EQ(std::vector<double>(ph.begin(), ph.begin() + 10),
              (std::vector<double>{30, 0, 90, 0, 30, 120, 90, 180, 90, 120}));
    for (double d : delays(kdd)) EXPECT_EQ(d, 1.0);
    EXPECT_EQ(delays(gen_kdd2(1.0, 0.1)).size(), 50u);
    EXPECT_THROW(gen_kdd(0.0, 0.1), InvalidParameter);
    EXPECT_THROW(gen_kdd2(-2.0, 0.1), InvalidParameter);
}

TEST(seq_ir, xy16_cpmg_hahn_fid) {
    const auto xy16 = gen_xy16(1.0, 0.0, false);
    EXPECT_EQ(pulse_count(xy16), 16);
    EXPECT_EQ(pulse_count(gen_xy16(1.0, 0.0, true)), 16);
    for (bool sym : {false, true}) {
        const auto u = oracle::program_unitary(gen_xy16(1.0, 0.0, sym), Eigen::Vector3d::Zero());
        EXPECT_LT(oracle::infidelity(u, Eigen::Matrix2cd::Identity()), 1e-14);
        // Flip errors cancel exactly through the U U^dag structure.
        const auto ue = oracle::program_unitary(gen_xy16(1.0, 0.0, sym), Eigen::Vector3d::Zero(), 0.05);
        EXPECT_LT(oracle::infidelity(ue, Eigen::Matrix2cd::Identity()), 1e-12);
    }
    const auto cpmg = gen_cpmg(1.0, 0.0, 3);
    EXPECT_EQ(delays(cpmg), (std::vector<double>{1, 2, 2, 1}));
    EXPECT_EQ(pulse_count(cpmg), 3);
    EXPECT_EQ(phases_deg(gen_cpmg(1.0, 0.0, 4, kPi / 2)), (std::vector<double>{90, 90, 90, 90}));
    const auto hahn = gen_hahn(2.0);
    EXPECT_EQ(delays(hahn), (std::vector<double>{2, 2}));
    EXPECT_EQ(hahn.family, Family::kHahn);
    EXPECT_EQ(pulse_count(gen_fid(3.0)), 0);
    EXPECT_EQ(cycle_time(gen_fid(3.0)), 3.0);
    EXPECT_THROW(gen_fid(0.0), InvalidParameter);
    EXPECT_THROW(gen_cpmg(1.0, 0.0, 0), InvalidParameter);
    EXPECT_THROW(gen_hahn(0.0), InvalidParameter);
}

TEST(seq_ir, duty_cycle) {
    EXPECT_DOUBLE_EQ(duty_cycle(gen_xy4(90e-6, 10e-6, false)), 0.1);
    EXPECT_EQ(duty_cycle(SequenceProgram{}), 0.0);
    EXPECT_EQ(duty_cycle(gen_fid(1.0)), 0.0);
    EXPECT_DOUBLE_EQ(duty_cycle(gen_cdd(2, 1.0, 1.0, false)), 20.0 / 36.0);
}

TEST(seq_ir, repeat) {
    const auto v2 = gen_vcdd(2, 1.0, 0.1, false);
    EXPECT_EQ(pulse_count(repeat(v2, 6)), 96);
    EXPECT_EQ(pulse_count(repeat(gen_xy4(1.0, 0.1, false), 25)), 100);
    EXPECT_EQ(repeat(v2, 1), v2);
    EXPECT_EQ(repeat(v2, 6).repetitions, 6);
    EXPECT_THROW(repeat(v2, 0), InvalidParameter);
    // Symmetric boundary half-delays merge into one tau at the joint.
    const auto s = repeat(gen_xy4(1.0, 0.0, true), 2);
    EXPECT_EQ(delays(s), (std::vector<double>{0.5, 1, 1, 1, 1, 1, 1, 1, 0.5}));
    EXPECT_DOUBLE_EQ(cycle_time(s), 8.0);
}

TEST(seq_ir, symmetric_generators_are_palindromes) {
    for (int n = 1; n <= 3; ++n) {
        EXPECT_TRUE(is_duration_palindrome(gen_cdd(n, 1.0, 0.1, true))) << n;
        EXPECT_TRUE(is_duration_palindrome(gen_vcdd(n, 1.0, 0.1, true))) << n;
    }
    EXPECT_TRUE(is_duration_palindrome(gen_xy4(1.0, 0.1, true)));
    EXPECT_TRUE(is_duration_palindrome(gen_xy16(1.0, 0.1, true)));
    EXPECT_TRUE(is_duration_palindrome(gen_cpmg(1.0, 0.1, 5)));
    EXPECT_TRUE(is_duration_palindrome(gen_hahn(1.0, 0.1)));
    // XY8, the first half of XY16, is a palindrome in phase as well.
    const auto ph = phases_deg(gen_xy16(1.0, 0.0, true));
    for (int i = 0; i < 4; ++i) EXPECT_EQ(ph[i], ph[7 - i]);
}

TEST(seq_ir, canonicalize_is_idempotent) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> phase(-20.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        SequenceProgram p;
        p.family = Family::kCpmg;
        for (int k = 0; k < 6; ++k) {
            PulseEvent q;
            q.phase = trial % 2 ? phase(rng) : deg_to_rad(std::round(phase(rng) * 30)) + 1e-12;
            q.duration = 1e-6;
            p.events.emplace_back(q);
            p.events.emplace_back(DelayEvent{1e-5});
        }
        const auto once = canonicalize(p);
        EXPECT_EQ(canonicalize(once), once);
        for (const auto& e : once.events) {
            if (const auto* q = std::get_if<PulseEvent>(&e)) {
                EXPECT_GE(q->phase, 0.0);
                EXPECT_LT(q->phase, 2 * kPi);
            }
        }
    }
}

TEST(seq_ir, text_round_trip_is_bit_exact) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<SequenceProgram> programs = {gen_cdd(3, 7.3e-5, 1.03e-5, true), gen_vcdd(2, 1e-4, 1e-5, false),
                                             gen_kdd2(3.3e-5, 1.06e-5), gen_fid(1e-3)};
    for (int trial = 0; trial < 100; ++trial) {
        SequenceProgram p;
        p.family = Family::kCpmg;
        p.tau = unit(rng) * 1e-3;
        p.tau_p = unit(rng) * 1e-5;
        for (int k = 0; k < 5; ++k) {
            PulseEvent q;
            q.phase = canonical_phase(unit(rng) * 2 * kPi);
            q.angle = unit(rng) * 2 * kPi;
            q.duration = unit(rng) * 1e-5;
            q.generating = unit(rng) < 0.3;
            q.flip_error = unit(rng) < 0.3 ? unit(rng) * 0.1 : 0.0;
            p.events.emplace_back(q);
            p.events.emplace_back(DelayEvent{unit(rng) * 1e-4});
        }
        programs.push_back(p);
    }
    for (const auto& p : programs) {
        const std::string text = serialize(p);
        const SequenceProgram back = parse_program(text);
        EXPECT_EQ(back, p);
        EXPECT_EQ(serialize(back), text);
    }
}

TEST(seq_ir, text_format_is_line_oriented) {
    const std::string text = serialize(gen_xy4(1e-4, 1e-5, false));
    EXPECT_NE(text.find("#family XY4\n"), std::string::npos);
    EXPECT_NE(text.find("#tau 1e-04\n"), std::string::npos);
    EXPECT_NE(text.find("D 1e-04\nP 0 180 1e-05\n"), std::string::npos);
    EXPECT_NE(text.find("P 90 180 1e-05\n"), std::string::npos);
    EXPECT_THROW(parse_program("#colour red\n"), ParseError);
    EXPECT_THROW(parse_program("P 0 180\n"), ParseError);
    EXPECT_THROW(parse_program("D -1\n"), ParseError);
    EXPECT_THROW(parse_program("Q 1\n"), ParseError);
    EXPECT_THROW(parse_program("P 0 180 1e-5 X\n"), ParseError);
}
