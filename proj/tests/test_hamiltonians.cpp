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
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>

#include "splitprop/hamiltonians.hpp"
#include "test_util.hpp"

namespace sp = splitprop;

TEST(Tridiagonal, Examples) {
    auto w = sp::tridiagonal_apply(4, std::vector<double>{1, 0, 0, 0});
    EXPECT_EQ(w, (std::vector<double>{1, -0.5, 0, 0}));
    w = sp::tridiagonal_apply(3, std::vector<double>{1, 1, 1});
    EXPECT_EQ(w, (std::vector<double>{0.5, 0, 0.5}));
    EXPECT_THROW(sp::tridiagonal_apply(3, std::vector<double>{1, 1}), sp::InvalidInput);
}

TEST(Tridiagonal, SineEigenpairs) {
    const int n = 8;
    for (int k = 1; k <= n; ++k) {
        std::vector<double> v(n);
        for (int j = 0; j < n; ++j) v[j] = std::sin((j + 1) * k * std::numbers::pi / (n + 1));
        const double lambda = 1 - std::cos(k * std::numbers::pi / (n + 1));
        auto w = sp::tridiagonal_apply(n, v);
        for (int j = 0; j < n; ++j) EXPECT_NEAR(w[j], lambda * v[j], 1e-14);
    }
}

TEST(Tridiagonal, SpectrumInsideBounds) {
    for (std::size_t n : {1u, 2u, 7u, 32u, 64u}) {
        sp::TridiagonalLaplacian h(n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sp::testing::dense_matrix(h));
        EXPECT_GE(es.eigenvalues().minCoeff(), h.e_min() - 1e-12);
        EXPECT_LE(es.eigenvalues().maxCoeff(), h.e_max() + 1e-12);
    }
}

TEST(PoschlTeller, Value) {
    sp::PoschlTellerPotential pot;
    const double v0 = -(4.0 / (2 * 1745.0)) * 24.5 * 23.5;
    EXPECT_NEAR(sp::poschl_teller_value(pot, 0.0), v0, 1e-15);
    EXPECT_NEAR(sp::poschl_teller_value(pot, 0.0), -0.659885, 1e-6);
    EXPECT_LE(sp::poschl_teller_value(pot, 40.0), 0.0);
    EXPECT_GT(sp::poschl_teller_value(pot, 40.0), -1e-60);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ud(-6, 6);
    for (int k = 0; k < 100; ++k) {
        double x = ud(rng);
        EXPECT_EQ(sp::poschl_teller_value(pot, x), sp::poschl_teller_value(pot, -x));
    }
}

TEST(Fourier, SpectralBoundsReferenceRows) {
    struct Row {
        std::size_t n;
        double emax;
    };
    for (Row r : {Row{64, 0.11583}, Row{128, 0.46333}, Row{256, 1.8533}, Row{512, 7.4133}, Row{1024, 29.653}}) {
        auto op = sp::FourierCollocation1D::poschl_teller(r.n, 10.0, sp::PoschlTellerPotential{});
        auto [lo, hi] = sp::spectral_bounds(op);
        EXPECT_NEAR(lo, -0.65988, 0.65988 * 5e-5) << r.n;
        EXPECT_NEAR(hi, r.emax, r.emax * 5e-5) << r.n;
    }
    sp::FourierCollocation1D zero(2, 2 * std::numbers::pi, 0.5, std::vector<double>(2, 0.0));
    auto [lo, hi] = sp::spectral_bounds(zero);
    EXPECT_DOUBLE_EQ(lo, 0.0);
    EXPECT_NEAR(hi, 1.0, 1e-15);
}

TEST(Fourier, ConstantAndCosineModes) {
    sp::FourierCollocation1D op(8, 2 * std::numbers::pi, 0.5, std::vector<double>(8, 0.0));
    auto z = sp::fourier_apply(op, std::vector<double>(8, 3.0));
    for (double x : z) EXPECT_NEAR(x, 0.0, 1e-14);
    std::vector<double> v(8);
    for (int j = 0; j < 8; ++j) v[j] = std::cos(j * 2 * std::numbers::pi / 8);
    auto w = sp::fourier_apply(op, v);
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(w[j], v[j], 1e-14);
    EXPECT_EQ(op.transform_count(), 4u);
    EXPECT_THROW(sp::fourier_apply(op, std::vector<double>(7, 0.0)), sp::InvalidInput);
}

TEST(Fourier, MatchesDenseDftOracle) {
    // Kinetic matrix assembled directly from the trigonometric interpolant.
    const int n = 12;
    const double len = 3.0, mass = 2.0;
    std::vector<double> pot(n);
    for (int j = 0; j < n; ++j) pot[j] = std::sin(0.7 * j);
    sp::FourierCollocation1D op(n, len, mass, pot);
    Eigen::MatrixXd a = sp::testing::dense_matrix(op);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double t = 0;
            for (int k = -n / 2; k < n / 2; ++k) {
                double kk = (k == -n / 2 ? std::abs(k) : k) * 2 * std::numbers::pi / len;
                t += kk * kk / (2 * mass) * std::cos(2 * std::numbers::pi * k * (r - c) / n) / n;
            }
            if (r == c) t += pot[r];
            EXPECT_NEAR(a(r, c), t, 1e-12);
        }
    }
}

TEST(Fourier, SymmetricWithSpectrumInsideBounds) {
    for (std::size_t n : {4u, 8u, 16u}) {
        auto op = sp::FourierCollocation1D::poschl_teller(n, 10.0, sp::PoschlTellerPotential{});
        Eigen::MatrixXd a = sp::testing::dense_matrix(op);
        EXPECT_LE((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        EXPECT_GE(es.eigenvalues().minCoeff(), op.e_min() - 1e-9);
        EXPECT_LE(es.eigenvalues().maxCoeff(), op.e_max() + 1e-9);
    }
    auto op = sp::FourierCollocation1D::poschl_teller(64, 10.0, sp::PoschlTellerPotential{});
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    std::vector<double> v(64), w(64);
    for (auto &x : v) x = nd(rng);
    for (auto &x : w) x = nd(rng);
    double lhs = sp::inner_real(w, op.apply(v)), rhs = sp::inner_real(op.apply(w), v);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs));
}

TEST(Fourier, InvalidConstruction) {
    EXPECT_THROW(sp::FourierCollocation1D(7, 1.0, 1.0, std::vector<double>(7, 0.0)), sp::InvalidInput);
    EXPECT_THROW(sp::FourierCollocation1D(8, -1.0, 1.0, std::vector<double>(8, 0.0)), sp::InvalidInput);
    EXPECT_THROW(sp::FourierCollocation1D(8, 1.0, 1.0, std::vector<double>(6, 0.0)), sp::InvalidInput);
}

TEST(Fourier, PotentialCsv) {
    auto op = sp::FourierCollocation1D::poschl_teller(16, 10.0, sp::PoschlTellerPotential{});
    auto path = (std::filesystem::temp_directory_path() / "splitprop_potential.csv").string();
    {
        std::ofstream f(path);
        f << "x,V\n";
        for (std::size_t j = 0; j < 16; ++j) f << std::setprecision(17) << op.grid_point(j) << ',' << op.potential()[j] << '\n';
    }
    auto v = sp::load_potential_csv(path, 16, 10.0);
    for (std::size_t j = 0; j < 16; ++j) EXPECT_DOUBLE_EQ(v[j], op.potential()[j]);
    EXPECT_THROW(sp::load_potential_csv(path, 16, 12.0), sp::InvalidInput);
    std::remove(path.c_str());
}

TEST(States, GaussianAndRandom) {
    auto op = sp::FourierCollocation1D::poschl_teller(64, 10.0, sp::PoschlTellerPotential{});
    auto g = sp::gaussian_state(op);
    EXPECT_NEAR(g.norm(), 1.0, 1e-14);
    for (std::size_t j = 0; j < 64; ++j) EXPECT_EQ(g.p[j], 0.0);
    auto u = sp::random_unit_state(50, 11);
    EXPECT_NEAR(u.norm(), 1.0, 1e-14);
    EXPECT_EQ(u, sp::random_unit_state(50, 11));
    EXPECT_NE(u, sp::random_unit_state(50, 12));
}
