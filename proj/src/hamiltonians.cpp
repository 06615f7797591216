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

#include "splitprop/hamiltonians.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

namespace splitprop {

std::vector<double> tridiagonal_apply(std::size_t n, std::span<const double> v) {
    if (v.size() != n) {
        throw InvalidInput("tridiagonal_apply: length mismatch");
    }
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        double left = j > 0 ? v[j - 1] : 0.0;
        double right = j + 1 < n ? v[j + 1] : 0.0;
        w[j] = (2 * v[j] - left - right) / 2;
    }
    return w;
}

TridiagonalLaplacian::TridiagonalLaplacian(std::size_t n) : n_(n) {
    if (n == 0) {
        throw InvalidInput("TridiagonalLaplacian: n must be positive");
    }
}

void TridiagonalLaplacian::apply(std::span<const double> v, std::span<double> out) const {
    if (v.size() != n_ || out.size() != n_) {
        throw InvalidInput("TridiagonalLaplacian: length mismatch");
    }
    if (n_ == 1) {
        out[0] = v[0];
        return;
    }
    out[0] = v[0] - 0.5 * v[1];
    for (std::size_t j = 1; j + 1 < n_; ++j) {
        out[j] = v[j] - 0.5 * (v[j - 1] + v[j + 1]);
    }
    out[n_ - 1] = v[n_ - 1] - 0.5 * v[n_ - 2];
}

DenseHamiltonian::DenseHamiltonian(std::size_t n, std::vector<double> entries, double e_min, double e_max)
    : n_(n), a_(std::move(entries)), e_min_(e_min), e_max_(e_max) {
    if (n == 0 || a_.size() != n * n) {
        throw InvalidInput("DenseHamiltonian: need n*n entries");
    }
    if (!(e_max >= e_min)) {
        throw InvalidInput("DenseHamiltonian: e_max < e_min");
    }
}

void DenseHamiltonian::apply(std::span<const double> v, std::span<double> out) const {
    if (v.size() != n_ || out.size() != n_) {
        throw InvalidInput("DenseHamiltonian: length mismatch");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        const double *row = a_.data() + i * n_;
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            s += row[j] * v[j];
        }
        out[i] = s;
    }
}

double poschl_teller_value(const PoschlTellerPotential &pot, double x) {
    double ch = std::cosh(pot.a * x);
    if (!std::isfinite(ch)) {
        return -0.0;
    }
    return -(pot.a * pot.a / (2 * pot.mass)) * pot.lambda * (pot.lambda - 1) / (ch * ch);
}

namespace {
// FFTW planning mutates global state; execution with new-array calls is thread safe.
std::mutex &fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct FourierCollocation1D::Plans {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    ~Plans() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (forward != nullptr) fftw_destroy_plan(forward);
        if (inverse != nullptr) fftw_destroy_plan(inverse);
    }
};

FourierCollocation1D::FourierCollocation1D(std::size_t n_modes, double domain_length, double mass,
                                           std::vector<double> potential_grid)
    : n_(n_modes), length_(domain_length), mass_(mass), v_(std::move(potential_grid)) {
    if (n_ < 2 || n_ % 2 != 0) {
        throw InvalidInput("FourierCollocation1D: n_modes must be even and >= 2");
    }
    if (!(length_ > 0) || !(mass_ > 0)) {
        throw InvalidInput("FourierCollocation1D: need positive domain length and mass");
    }
    if (v_.size() != n_) {
        throw InvalidInput("FourierCollocation1D: potential grid length differs from n_modes");
    }
    // r2c keeps modes j = 0..N/2; the last one is the Nyquist mode, taken with +N/2.
    kinetic_.resize(n_ / 2 + 1);
    for (std::size_t j = 0; j <= n_ / 2; ++j) {
        double k = 2 * std::numbers::pi * static_cast<double>(j) / length_;
        kinetic_[j] = k * k / (2 * mass_);
    }
    auto [lo, hi] = std::minmax_element(v_.begin(), v_.end());
    e_min_ = *lo;
    e_max_ = kinetic_.back() + *hi;

    plans_ = std::make_unique<Plans>();
    std::vector<double> real(n_);
    std::vector<std::complex<double>> spec(n_ / 2 + 1);
    auto *cplx = reinterpret_cast<fftw_complex *>(spec.data());
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    int n = static_cast<int>(n_);
    plans_->forward = fftw_plan_dft_r2c_1d(n, real.data(), cplx, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->inverse = fftw_plan_dft_c2r_1d(n, cplx, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plans_->forward == nullptr || plans_->inverse == nullptr) {
        throw NumericalFailure("FFTW planning failed");
    }
}

FourierCollocation1D::FourierCollocation1D(FourierCollocation1D &&other) noexcept
    : n_(other.n_),
      length_(other.length_),
      mass_(other.mass_),
      v_(std::move(other.v_)),
      kinetic_(std::move(other.kinetic_)),
      e_min_(other.e_min_),
      e_max_(other.e_max_),
      plans_(std::move(other.plans_)),
      transforms_(other.transforms_.load()) {}

FourierCollocation1D::~FourierCollocation1D() = default;

double FourierCollocation1D::grid_point(std::size_t j) const {
    return -length_ / 2 + static_cast<double>(j) * length_ / static_cast<double>(n_);
}

std::vector<double> FourierCollocation1D::grid() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        x[j] = grid_point(j);
    }
    return x;
}

FourierCollocation1D FourierCollocation1D::poschl_teller(std::size_t n_modes, double domain_length,
                                                         const PoschlTellerPotential &pot) {
    if (n_modes < 2) {
        throw InvalidInput("FourierCollocation1D: n_modes must be even and >= 2");
    }
    std::vector<double> v(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) {
        double x = -domain_length / 2 + static_cast<double>(j) * domain_length / static_cast<double>(n_modes);
        v[j] = poschl_teller_value(pot, x);
    }
    return FourierCollocation1D(n_modes, domain_length, pot.mass, std::move(v));
}

void FourierCollocation1D::apply(std::span<const double> v, std::span<double> out) const {
    if (v.size() != n_ || out.size() != n_) {
        throw InvalidInput("FourierCollocation1D: length mismatch");
    }
    std::vector<double> real(v.begin(), v.end());
    std::vector<std::complex<double>> spec(n_ / 2 + 1);
    auto *cplx = reinterpret_cast<fftw_complex *>(spec.data());
    fftw_execute_dft_r2c(plans_->forward, real.data(), cplx);
    double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t j = 0; j < spec.size(); ++j) {
        spec[j] *= kinetic_[j] * inv_n;
    }
    fftw_execute_dft_c2r(plans_->inverse, cplx, real.data());
    transforms_ += 2;
    for (std::size_t j = 0; j < n_; ++j) {
        out[j] = real[j] + v_[j] * v[j];
    }
}

std::pair<double, double> spectral_bounds(const FourierCollocation1D &op) { return {op.e_min(), op.e_max()}; }

std::vector<double> fourier_apply(const FourierCollocation1D &op, std::span<const double> v) { return op.apply(v); }

std::vector<double> load_potential_csv(const std::string &path, std::size_t n_modes, double domain_length) {
    std::ifstream f(path);
    if (!f) {
        throw InvalidInput("cannot open potential file " + path);
    }
    std::string line;
    std::getline(f, line);
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "x,V") {
        throw InvalidInput("potential csv: expected header 'x,V'");
    }
    std::vector<double> v;
    double h = domain_length / static_cast<double>(n_modes);
    while (std::getline(f, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        std::istringstream ss(line);
        std::string xs, vs;
        if (!std::getline(ss, xs, ',') || !std::getline(ss, vs)) {
            throw InvalidInput("potential csv: malformed row");
        }
        double x = std::stod(xs);
        double expected = -domain_length / 2 + static_cast<double>(v.size()) * h;
        if (std::abs(x - expected) > 1e-9 * std::max(1.0, domain_length)) {
            throw InvalidInput("potential csv: x column does not match the collocation grid at row " +
                               std::to_string(v.size() + 1));
        }
        v.push_back(std::stod(vs));
    }
    if (v.size() != n_modes) {
        throw InvalidInput("potential csv: expected " + std::to_string(n_modes) + " rows, found " +
                           std::to_string(v.size()));
    }
    return v;
}

WaveState gaussian_state(const FourierCollocation1D &op) {
    WaveState u(op.dim());
    for (std::size_t j = 0; j < op.dim(); ++j) {
        double x = op.grid_point(j);
        u.q[j] = std::exp(-9 * x * x);
    }
    double nrm = u.norm();
    for (double &x : u.q) {
        x /= nrm;
    }
    return u;
}

WaveState random_unit_state(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    WaveState u(n);
    for (std::size_t j = 0; j < n; ++j) {
        u.q[j] = gauss(rng);
        u.p[j] = gauss(rng);
    }
    double nrm = u.norm();
    for (std::size_t j = 0; j < n; ++j) {
        u.q[j] /= nrm;
        u.p[j] /= nrm;
    }
    return u;
}

}  // namespace splitprop
