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
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "splitprop/core.hpp"
#include "splitprop/hamiltonians.hpp"
#include "test_util.hpp"

namespace sp = splitprop;

TEST(Core, SpectralShiftExamples) {
    auto s = sp::spectral_shift(0.0, 2.0);
    EXPECT_DOUBLE_EQ(s.alpha, 1.0);
    EXPECT_DOUBLE_EQ(s.beta, 1.0);
    s = sp::spectral_shift(-0.65988, 0.46333);
    EXPECT_NEAR(s.alpha, -0.098275, 1e-6);
    EXPECT_NEAR(s.beta, 0.5616, 1e-4);
    s = sp::spectral_shift(-3.5, 3.5);
    EXPECT_DOUBLE_EQ(s.alpha, 0.0);
    EXPECT_DOUBLE_EQ(s.beta, 3.5);
    EXPECT_THROW(sp::spectral_shift(1.0, 0.0), sp::InvalidInput);
}

TEST(Core, ApplyShiftedTridiagonal) {
    sp::TridiagonalLaplacian h(4);
    auto w = sp::apply_shifted(h, {1.0, 1.0}, std::vector<double>{1, 0, 0, 0});
    std::vector<double> expect{0, -0.5, 0, 0};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(w[i], expect[i], 1e-15);
    auto z = sp::apply_shifted(h, {1.0, 1.0}, std::vector<double>(4, 0.0));
    for (double x : z) EXPECT_EQ(x, 0.0);
    auto plain = sp::apply_shifted(h, {0.0, 1.0}, std::vector<double>{1, 2, 3, 4});
    auto direct = h.apply(std::vector<double>{1, 2, 3, 4});
    for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(plain[i], direct[i]);
    EXPECT_THROW(sp::apply_shifted(h, {1.0, 1.0}, std::vector<double>(3, 0.0)), sp::InvalidInput);
}

TEST(Core, ShiftedSpectrumInsideHalfWidth) {
    for (std::size_t n : {4u, 9u, 16u}) {
        auto h = sp::testing::random_symmetric(n, 100 + n);
        auto s = sp::spectral_shift(h);
        sp::ShiftedOperator op(h, s);
        Eigen::MatrixXd a(n, n);
        std::vector<double> e(n, 0.0), col(n);
        for (std::size_t j = 0; j < n; ++j) {
            e[j] = 1;
            op.apply(e, col);
            e[j] = 0;
            for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        EXPECT_GE(es.eigenvalues().minCoeff(), -s.beta - 1e-12);
        EXPECT_LE(es.eigenvalues().maxCoeff(), s.beta + 1e-12);
        EXPECT_EQ(op.products(), n);
    }
}

TEST(Core, ApplyShiftedSymmetry) {
    auto h = sp::testing::random_symmetric(12, 5);
    auto s = sp::spectral_shift(h);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 10; ++k) {
        std::vector<double> v(12), w(12);
        for (auto &x : v) x = nd(rng);
        for (auto &x : w) x = nd(rng);
        double lhs = sp::inner_real(w, sp::apply_shifted(h, s, v));
        double rhs = sp::inner_real(sp::apply_shifted(h, s, w), v);
        EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(Core, RestorePhase) {
    sp::WaveState u({1.0, -2.0}, {0.5, 3.0});
    EXPECT_EQ(sp::restore_phase(u, 0.0, 4.0), u);
    EXPECT_EQ(sp::restore_phase(u, 3.0, 0.0), u);
    auto r = sp::restore_phase(u, 1.0, std::numbers::pi);
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(r.q[i], -u.q[i], 1e-15);
        EXPECT_NEAR(r.p[i], -u.p[i], 1e-15);
    }
    // e^{-i pi/2} (1 + 0i) = -i
    auto s = sp::restore_phase(sp::WaveState({1.0}, {0.0}), 1.0, std::numbers::pi / 2);
    EXPECT_NEAR(s.q[0], 0.0, 1e-15);
    EXPECT_NEAR(s.p[0], -1.0, 1e-15);
}

TEST(Core, RestorePhasePreservesNorm) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ud(-10, 10);
    for (int k = 0; k < 100; ++k) {
        auto u = sp::random_unit_state(7, k);
        auto r = sp::restore_phase(u, ud(rng), ud(rng));
        EXPECT_NEAR(r.norm(), u.norm(), 1e-14 * u.norm());
    }
}

TEST(Core, WaveStateShape) {
    EXPECT_THROW(sp::WaveState({1.0, 2.0}, {1.0}), sp::InvalidInput);
    sp::WaveState u({3.0}, {4.0});
    EXPECT_DOUBLE_EQ(u.norm(), 5.0);
    EXPECT_DOUBLE_EQ(sp::distance(u, sp::WaveState({0.0}, {0.0})), 5.0);
}

TEST(Core, StateSerializationRoundTrip) {
    auto u = sp::random_unit_state(17, 3);
    std::stringstream csv;
    sp::write_state_csv(csv, u);
    EXPECT_EQ(csv.str().substr(0, 12), "index,q,p\n0,");
    EXPECT_EQ(sp::read_state_csv(csv), u);

    std::stringstream bin;
    sp::write_state_binary(bin, u);
    std::string bytes = bin.str();
    ASSERT_EQ(bytes.size(), 4 + 8 + 16 * 17u);
    EXPECT_EQ(bytes.substr(0, 4), "WST1");
    EXPECT_EQ(sp::read_state_binary(bin), u);

    auto dir = std::filesystem::temp_directory_path();
    for (const char *name : {"splitprop_state_test.csv", "splitprop_state_test.bin"}) {
        auto path = (dir / name).string();
        sp::save_state(path, u);
        EXPECT_EQ(sp::load_state(path), u);
        std::remove(path.c_str());
    }
    std::stringstream bad("WSTX");
    EXPECT_THROW(sp::read_state_binary(bad), sp::InvalidInput);
}
