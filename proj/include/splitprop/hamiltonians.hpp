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

#ifndef SPLITPROP_HAMILTONIANS_HPP
#define SPLITPROP_HAMILTONIANS_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "splitprop/core.hpp"

namespace splitprop {

/// w_j = (2 v_j - v_{j-1} - v_{j+1}) / 2 with zero boundary values.
std::vector<double> tridiagonal_apply(std::size_t n, std::span<const double> v);

/// N x N matrix with 1 on the diagonal and -1/2 beside it; spectrum in [0, 2].
class TridiagonalLaplacian final : public LinearHamiltonian {
   public:
    explicit TridiagonalLaplacian(std::size_t n);

    std::size_t dim() const override { return n_; }
    using LinearHamiltonian::apply;
    void apply(std::span<const double> v, std::span<double> out) const override;
    double e_min() const override { return 0.0; }
    double e_max() const override { return 2.0; }

   private:
    std::size_t n_;
};

/// Row-major dense symmetric matrix with caller-supplied bounds.
class DenseHamiltonian final : public LinearHamiltonian {
   public:
    DenseHamiltonian(std::size_t n, std::vector<double> entries, double e_min, double e_max);

    std::size_t dim() const override { return n_; }
    using LinearHamiltonian::apply;
    void apply(std::span<const double> v, std::span<double> out) const override;
    double e_min() const override { return e_min_; }
    double e_max() const override { return e_max_; }
    const std::vector<double> &entries() const { return a_; }

   private:
    std::size_t n_;
    std::vector<double> a_;
    double e_min_, e_max_;
};

struct PoschlTellerPotential {
    double a = 2.0;
    double lambda = 24.5;
    double mass = 1745.0;
};

/// -(a^2 / 2 mu) lambda (lambda - 1) / cosh^2(a x)
double poschl_teller_value(const PoschlTellerPotential &pot, double x);

/// Kinetic energy -(1/2mu) d^2/dx^2 by FFT on a periodic grid plus a pointwise potential.
class FourierCollocation1D final : public LinearHamiltonian {
   public:
    FourierCollocation1D(std::size_t n_modes, double domain_length, double mass, std::vector<double> potential_grid);
    ~FourierCollocation1D() override;
    FourierCollocation1D(const FourierCollocation1D &) = delete;
    FourierCollocation1D &operator=(const FourierCollocation1D &) = delete;

    static FourierCollocation1D poschl_teller(std::size_t n_modes, double domain_length,
                                              const PoschlTellerPotential &pot);

    std::size_t dim() const override { return n_; }
    using LinearHamiltonian::apply;
    void apply(std::span<const double> v, std::span<double> out) const override;
    double e_min() const override { return e_min_; }
    double e_max() const override { return e_max_; }

    double domain_length() const { return length_; }
    double mass() const { return mass_; }
    const std::vector<double> &potential() const { return v_; }
    double grid_point(std::size_t j) const;
    std::vector<double> grid() const;

    /// Number of length-N transforms executed so far (forward plus inverse).
    std::uint64_t transform_count() const { return transforms_.load(); }

    FourierCollocation1D(FourierCollocation1D &&other) noexcept;

   private:
    struct Plans;
    std::size_t n_;
    double length_, mass_;
    std::vector<double> v_;
    std::vector<double> kinetic_;
    double e_min_, e_max_;
    std::unique_ptr<Plans> plans_;
    mutable std::atomic<std::uint64_t> transforms_{0};
};

/// (min_j V(x_j), (pi N / L)^2 / (2 mu) + max_j V(x_j))
std::pair<double, double> spectral_bounds(const FourierCollocation1D &op);

std::vector<double> fourier_apply(const FourierCollocation1D &op, std::span<const double> v);

/// Reads "x,V" rows; the x column must match the collocation grid.
std::vector<double> load_potential_csv(const std::string &path, std::size_t n_modes, double domain_length);

/// sigma exp(-(3x)^2) sampled on the grid, unit discrete 2-norm.
WaveState gaussian_state(const FourierCollocation1D &op);

/// Normal pairs from a seeded generator, normalized to unit 2-norm.
WaveState random_unit_state(std::size_t n, std::uint64_t seed);

}  // namespace splitprop

#endif
