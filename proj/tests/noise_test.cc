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

#include <cmath>

#include "gtest/gtest.h"

#include "ddsim/errors.h"

using namespace ddsim;

namespace {

struct Moments {
    double mean = 0.0, var = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    for (double x : xs) m.mean += x;
    m.mean /= xs.size();
    for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
    m.var /= xs.size() - 1;
    return m;
}

}  // namespace

TEST(noise, zero_amplitude) {
    const auto t = ou_trajectory({0.0, 1e-4, 7}, 1e-3, 1e-6);
    for (double v : t.values) EXPECT_EQ(v, 0.0);
    EXPECT_GE(t.end_time(), 1e-3 * (1 - 1e-12));
}

TEST(noise, frozen_limit) {
    const double duration = 1e-3;
    // Drift over the window has standard deviation b * sqrt(2 duration / tau_c).
    const auto t = ou_trajectory({5000.0, 1e8 * duration, 3}, duration, 1e-6);
    double drift = 0.0;
    for (double v : t.values) drift = std::max(drift, std::abs(v - t.values[0]));
    EXPECT_LE(drift, 1e-3 * 5000.0);
}

TEST(noise, grid_and_errors) {
    const auto t = ou_trajectory({1.0, 1.0, 1}, 1.0, 0.1);
    ASSERT_EQ(t.times.size(), 11u);
    EXPECT_DOUBLE_EQ(t.times.back(), 1.0);
    EXPECT_THROW(ou_trajectory({1.0, 1.0, 1}, 1.0, 0.2), InvalidParameter);
    EXPECT_THROW(ou_trajectory({-1.0, 1.0, 1}, 1.0, 0.1), InvalidParameter);
    EXPECT_THROW(ou_trajectory({1.0, 0.0, 1}, 1.0, 0.1), InvalidParameter);
    EXPECT_THROW(ou_trajectory({1.0, 1.0, 1}, 0.0, 0.1), InvalidParameter);
    EXPECT_THROW(make_trajectory({0.0, 0.0}, {1.0, 1.0}), InvalidParameter);
}

TEST(noise, deterministic_in_seed) {
    const OUParams p{1000.0, 1e-4, 42};
    EXPECT_EQ(ou_trajectory(p, 1e-3, 1e-6).values, ou_trajectory(p, 1e-3, 1e-6).values);
    OUParams q = p;
    q.seed = 43;
    EXPECT_NE(ou_trajectory(p, 1e-3, 1e-6).values, ou_trajectory(q, 1e-3, 1e-6).values);
    EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
    EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 3, 0));
    EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 2, 1));
    EXPECT_NE(derive_seed(1, 2, 0), derive_seed(2, 2, 0));
}

TEST(noise, ensemble_statistics) {
    const double b = 2.0, tau_c = 1.0;
    const int n = 100000;
    std::vector<double> start, lag, product;
    start.reserve(n);
    for (int i = 0; i < n; ++i) {
        const auto t = ou_trajectory({b, tau_c, derive_seed(11, i)}, tau_c, tau_c / 10);
        start.push_back(t.values.front());
        lag.push_back(t.values.back());
        product.push_back(t.values.front() * t.values.back());
    }
    const auto m0 = moments(start);
    const auto m1 = moments(lag);
    const auto mp = moments(product);
    EXPECT_LT(std::abs(m0.mean), 3 * std::sqrt(m0.var / n));
    EXPECT_LT(std::abs(m1.mean), 3 * std::sqrt(m1.var / n));
    // Var of the sample variance of a Gaussian: 2 sigma^4 / (n - 1).
    EXPECT_LT(std::abs(m0.var - b * b), 3 * std::sqrt(2.0 / (n - 1)) * b * b);
    EXPECT_LT(std::abs(m1.var - b * b), 3 * std::sqrt(2.0 / (n - 1)) * b * b);
    EXPECT_LT(std::abs(mp.mean - b * b * std::exp(-1.0)), 3 * std::sqrt(mp.var / n));
}

TEST(noise, psd) {
    const OUParams p{3.0, 0.5, 0};
    EXPECT_DOUBLE_EQ(ou_psd(p, 0.0), 2 * 9.0 * 0.5);
    EXPECT_DOUBLE_EQ(ou_psd(p, 1 / p.tau_c), 0.5 * ou_psd(p, 0.0));
    // Substituting w = tan(u) / tau_c makes the integrand smooth on (-pi/2, pi/2).
    const int cells = 20000;
    double acc = 0.0;
    for (int c = 0; c < cells; ++c) {
        const double u = -(std::acos(-1.0) / 2) + (c + 0.5) * (2 * (std::acos(-1.0) / 2) / cells);
        const double w = std::tan(u) / p.tau_c;
        const double jac = 1.0 / (p.tau_c * std::cos(u) * std::cos(u));
        acc += ou_psd(p, w) * jac * (2 * (std::acos(-1.0) / 2) / cells);
    }
    const double power = acc / (2 * std::acos(-1.0));
    EXPECT_LT(std::abs(power - 9.0) / 9.0, 1e-4);
}

TEST(noise, interpolant_integrals) {
    const auto t = make_trajectory({0.0, 1.0, 3.0}, {0.0, 2.0, 0.0});
    EXPECT_DOUBLE_EQ(t.integral(0.0, 3.0), 3.0);
    EXPECT_DOUBLE_EQ(t.integral(0.0, 0.5), 0.25);
    EXPECT_DOUBLE_EQ(t.integral(0.5, 2.0), 3.0 - 0.25 - 0.5);
    EXPECT_DOUBLE_EQ(t.mean(0.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(t.mean(2.0, 2.0), 1.0);
    EXPECT_THROW(t.integral(0.0, 3.5), RangeError);
    EXPECT_THROW(t.integral(2.0, 1.0), RangeError);
    const auto c = constant_trajectory(5.0, 2.0);
    EXPECT_DOUBLE_EQ(c.integral(0.5, 1.5), 5.0);
}

TEST(noise, export_columns) {
    const auto t = make_trajectory({0.0, 0.5}, {1.0, -2.0});
    EXPECT_EQ(export_trajectory(t), "0 1\n0.5 -2\n");
}
