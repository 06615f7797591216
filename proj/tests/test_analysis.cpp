// Copyright 2026 The splitprop Authors
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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "splitprop/analysis.hpp"
#include "splitprop/catalog.hpp"
#include "test_util.hpp"

namespace sp = splitprop;

namespace {

const sp::SplitCoefficients kStrang({0.5, 0.5}, {1.0});

// Shears multiplied as dense 2x2 products, independent of k_matrix.
Eigen::Matrix2d shear_product(const sp::SplitCoefficients &c, double y) {
    Eigen::Matrix2d k = Eigen::Matrix2d::Identity();
    for (std::size_t j = 0; j < c.a.size(); ++j) {
        Eigen::Matrix2d a;
        a << 1, c.a[j] * y, 0, 1;
        k = a * k;
        if (j < c.b.size()) {
            Eigen::Matrix2d b;
            b << 1, 0, -c.b[j] * y, 1;
            k = b * k;
        }
    }
    return k;
}

}  // namespace

TEST(KMatrix, Examples) {
    auto k0 = sp::k_matrix(kStrang, 0.0);
    EXPECT_EQ(k0.k11, 1.0);
    EXPECT_EQ(k0.k12, 0.0);
    EXPECT_EQ(k0.k21, 0.0);
    EXPECT_EQ(k0.k22, 1.0);
    auto k = sp::k_matrix(kStrang, 1.0);
    EXPECT_DOUBLE_EQ(k.k11, 0.5);
    EXPECT_DOUBLE_EQ(k.k12, 0.75);
    EXPECT_DOUBLE_EQ(k.k21, -1.0);
    EXPECT_DOUBLE_EQ(k.k22, 0.5);
    auto s = sp::k_matrix(sp::SplitCoefficients({0.2, 0.3, 0.5}, {0.0, 0.0}), 2.0);
    EXPECT_DOUBLE_EQ(s.k12, 2.0);
    EXPECT_DOUBLE_EQ(s.k21, 0.0);
}

TEST(KMatrix, MatchesShearProductAndUnitDeterminant) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ud(-1, 1);
    for (int trial = 0; trial < 10000; ++trial) {
        const int m = 1 + trial % 5;
        std::vector<double> a(m + 1), b(m);
        for (auto &x : a) x = ud(rng);
        for (auto &x : b) x = ud(rng);
        sp::SplitCoefficients c(a, b);
        const double y = 3 * ud(rng);
        auto k = sp::k_matrix(c, y);
        const double scale = std::max({1.0, std::abs(k.k11 * k.k22), std::abs(k.k12 * k.k21)});
        EXPECT_NEAR(k.det(), 1.0, 1e-12 * scale);
        if (trial % 100 == 0) {
            Eigen::Matrix2d ref = shear_product(c, y);
            EXPECT_NEAR(k.k11, ref(0, 0), 1e-12 * scale);
            EXPECT_NEAR(k.k12, ref(0, 1), 1e-12 * scale);
            EXPECT_NEAR(k.k21, ref(1, 0), 1e-12 * scale);
            EXPECT_NEAR(k.k22, ref(1, 1), 1e-12 * scale);
            Eigen::JacobiSVD<Eigen::Matrix2d> svd(ref);
            EXPECT_NEAR(k.norm(), svd.singularValues()[0], 1e-10 * svd.singularValues()[0]);
        }
    }
}

TEST(CsValues, Examples) {
    auto [c0, s0] = sp::cs_values(kStrang, 0.0);
    EXPECT_EQ(c0, 1.0);
    EXPECT_EQ(s0, 0.0);
    auto [c1, s1] = sp::cs_values(kStrang, 1.0);
    EXPECT_DOUBLE_EQ(c1, 0.5);
    EXPECT_DOUBLE_EQ(s1, 0.875);
    auto [c, s] = sp::cs_values(sp::strang_sequence(50), 1.0);
    EXPECT_NEAR(c, std::cos(1.0), 1e-3);
    EXPECT_NEAR(s, std::sin(1.0), 1e-3);
    for (double y = -3; y <= 3; y += 0.01) EXPECT_GE(sp::cs_sample(kStrang, y).q, -1e-12);
}

TEST(Functionals, StrangTableRowThetaOne) {
    EXPECT_NEAR(sp::epsilon_sup(kStrang, 1.0), 0.18, 0.005);
    auto mn = sp::mu_nu(kStrang, 1.0);
    EXPECT_NEAR(mn.mu, 0.047198, 1e-5);
    EXPECT_NEAR(mn.nu, 0.1548, 5e-4);
    EXPECT_NEAR(sp::delta_sup(kStrang, 1.0), 0.1328, 5e-4);
}

TEST(Functionals, StrangTableRowThetaOnePointNine) {
    EXPECT_NEAR(sp::epsilon_sup(kStrang, 1.9), 1.34862, 1e-4);
    auto mn = sp::mu_nu(kStrang, 1.9);
    EXPECT_NEAR(mn.mu, 0.606472, 0.606472e-3);
    EXPECT_NEAR(mn.nu, 2.4894, 2.4894e-3);
    EXPECT_NEAR(sp::delta_sup(kStrang, 1.9), 1.1746, 1e-3);
}

TEST(Functionals, ZeroAndSmallTheta) {
    EXPECT_EQ(sp::epsilon_sup(kStrang, 0.0), 0.0);
    EXPECT_EQ(sp::delta_sup(kStrang, 0.0), 0.0);
    auto mn = sp::mu_nu(kStrang, 1e-3);
    EXPECT_LE(mn.mu, 1e-6);
    EXPECT_LE(mn.nu, 1e-6);
    EXPECT_THROW(sp::mu_nu(kStrang, 2.5), sp::OutOfStability);
}

TEST(Functionals, SupMatchesFineGrid) {
    // Brute force over 2e5 points; the refined sup must not fall below it and may exceed it by < 1%.
    auto c = sp::strang_sequence(3);
    const double theta = 5.0;
    double eps = 0, delta = 0;
    for (int i = 0; i <= 200000; ++i) {
        const double y = theta * i / 200000.0;
        auto v = sp::cs_sample(c, y);
        eps = std::max(eps, std::hypot(v.c - std::cos(y), v.s - std::sin(y)) + std::sqrt(std::max(0.0, v.q)));
        delta = std::max(delta, sp::k_matrix(c, y).norm() - 1);
    }
    const double e = sp::epsilon_sup(c, theta), d = sp::delta_sup(c, theta);
    EXPECT_GE(e, eps * (1 - 1e-9));
    EXPECT_LE(e, eps * 1.01);
    EXPECT_GE(d, delta * (1 - 1e-9));
    EXPECT_LE(d, delta * 1.01);
}

TEST(Functionals, MonotoneInTheta) {
    auto c = sp::strang_sequence(2);
    double pe = 0, pd = 0, pm = 0, pn = 0;
    for (double th = 0.25; th <= 3.9; th += 0.25) {
        double e = sp::epsilon_sup(c, th), d = sp::delta_sup(c, th);
        auto mn = sp::mu_nu(c, th);
        EXPECT_GE(e, pe * (1 - 1e-12));
        EXPECT_GE(d, pd * (1 - 1e-12));
        EXPECT_GE(mn.mu, pm * (1 - 1e-12));
        EXPECT_GE(mn.nu, pn * (1 - 1e-12));
        pe = e;
        pd = d;
        pm = mn.mu;
        pn = mn.nu;
    }
}

TEST(Functionals, MuVanishesForExactRotationLimit) {
    EXPECT_LE(sp::mu_nu(sp::strang_sequence(200), 1.0).mu, 1e-3);
}

TEST(Threshold, Strang) {
    for (int m = 1; m <= 10; ++m) EXPECT_NEAR(sp::stability_threshold(sp::strang_sequence(m)), 2.0 * m, 1e-9);
    EXPECT_EQ(sp::stability_threshold(sp::SplitCoefficients({0.5, 0.5}, {0.0})), 0.0);
}

TEST(Bounds, NStepAndCombined) {
    sp::MethodErrorProfile a;
    a.theta_max = 84;
    a.mu = 2.4e-8;
    a.nu = 7.4e-8;
    EXPECT_NEAR(sp::nstep_bound(a, 12), 3.62e-7, 1e-15);
    EXPECT_DOUBLE_EQ(sp::nstep_bound(a, 1), a.mu + a.nu);
    sp::MethodErrorProfile b;
    b.theta_max = 84;
    b.mu = 3.7e-9;
    b.nu = 2.6e-6;
    EXPECT_NEAR(sp::repetition_crossover(a, b), 10452, 1);

    sp::MethodErrorProfile tail;
    tail.eps = 3.6e-8;
    tail.delta = 3.6e-8;
    EXPECT_NEAR(sp::combined_bound(tail, a, 6), 2.54e-7, 1e-15);
    EXPECT_DOUBLE_EQ(sp::combined_bound(tail, a, 0), tail.eps);
    EXPECT_NEAR(sp::combined_bound(tail, a, 6, false) - sp::combined_bound(tail, a, 6),
                tail.delta * sp::nstep_bound(a, 6), 1e-22);
}

TEST(Bounds, TaylorAndChebyshevFormulas) {
    EXPECT_NEAR(sp::taylor_bound(3, 1.0), 1.0 / 24, 1e-15);
    EXPECT_EQ(sp::taylor_bound(5, 0.0), 0.0);
    EXPECT_EQ(sp::chebyshev_bound(1, 0.0), 0.0);
    EXPECT_THROW(sp::chebyshev_bound(20, 20.0), sp::ValidityError);
    const double x = 5.0 / 22;
    const double direct = 4 * std::pow(std::exp(1 - x * x) * x, 11);
    EXPECT_NEAR(sp::chebyshev_bound(10, 5.0), direct, 1e-13 * direct);
    double prev = sp::chebyshev_bound(1001, 1000.0);
    for (int m = 1002; m < 1300; ++m) {
        double b = sp::chebyshev_bound(m, 1000.0);
        EXPECT_LT(b, prev);
        prev = b;
    }
    int first = 0;
    for (int m = 0; m < 200; ++m) {
        if (sp::taylor_bound(m, 20.0) < 1) {
            first = m;
            break;
        }
    }
    EXPECT_GT(first, 20 * std::exp(1.0) - 5);
    EXPECT_LT(first, 20 * std::exp(1.0) + 5);
}

TEST(Bounds, MinDegree) {
    EXPECT_EQ(sp::min_degree(sp::BoundKind::Chebyshev, 1000.0, 3.62e-7), 1135);
    EXPECT_EQ(sp::min_degree(sp::BoundKind::Taylor, 1.0, 1.0 / 24), 3);
    // Linear scans of the closed forms in long double.
    auto scan = [](auto bound, int from) {
        int m = from;
        while (bound(m) > 1e-11L) ++m;
        return m;
    };
    const long double th = 1000;
    const int mt = scan([&](int m) { return expl((m + 1) * logl(th) - lgammal(m + 2.0L)); }, 0);
    const int mc = scan(
        [&](int m) {
            const long double r = th / (2 * m + 2);
            return 4 * expl((m + 1) * (1 - r * r + logl(r)));
        },
        1001);
    EXPECT_EQ(sp::min_degree(sp::BoundKind::Taylor, 1000.0, 1e-11), mt);
    EXPECT_EQ(sp::min_degree(sp::BoundKind::Chebyshev, 1000.0, 1e-11), mc);
    const double ratio = static_cast<double>(mt) / mc;
    EXPECT_GE(ratio, 1.3);
    EXPECT_LE(ratio, 2.7);
}

TEST(Bounds, NStepBoundHoldsOnOracle) {
    auto h = sp::testing::random_symmetric(8, 77);
    auto s = sp::spectral_shift(h);
    auto profile = sp::error_profile(kStrang, 1.0);
    auto u0 = sp::random_unit_state(8, 6);
    for (int n : {1, 5, 20, 100}) {
        const double t = n / s.beta;
        sp::PropagationPlan plan;
        plan.shift = s;
        plan.total_time = t;
        plan.stages.push_back({"strang", kStrang, t / n, n, 1.0});
        auto r = sp::execute_plan(plan, h, u0);
        EXPECT_LE(sp::distance(r.state, sp::testing::dense_exp(h, t, u0)), sp::nstep_bound(profile, n));
    }
}

TEST(Trace, RowsCoverInterval) {
    auto rows = sp::trace(sp::cs_source(kStrang), 1.0, 21);
    ASSERT_EQ(rows.size(), 21u);
    EXPECT_NEAR(rows[10].y, 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(rows.front().y, -1.0);
    EXPECT_DOUBLE_EQ(rows.back().y, 1.0);
    EXPECT_DOUBLE_EQ(rows.back().c, 0.5);
    EXPECT_NEAR(rows.back().knorm, 1.1328, 1e-4);
}
