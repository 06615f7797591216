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

#ifndef SPLITPROP_CORE_HPP
#define SPLITPROP_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "splitprop/error.hpp"

namespace splitprop {

/// A wavefunction u = q + i p, kept as two real coordinate arrays.
struct WaveState {
    std::vector<double> q;
    std::vector<double> p;

    WaveState() = default;
    explicit WaveState(std::size_t n);
    WaveState(std::vector<double> q, std::vector<double> p);

    std::size_t size() const { return q.size(); }
    double norm() const;
    bool operator==(const WaveState &other) const = default;
};

double norm(const WaveState &u);
double inner_real(std::span<const double> a, std::span<const double> b);
/// Euclidean distance between two states of the same size.
double distance(const WaveState &a, const WaveState &b);

/// Real symmetric operator with known spectral enclosure [e_min, e_max].
class LinearHamiltonian {
   public:
    virtual ~LinearHamiltonian() = default;
    virtual std::size_t dim() const = 0;
    /// out = H v. out and v never alias.
    virtual void apply(std::span<const double> v, std::span<double> out) const = 0;
    virtual double e_min() const = 0;
    virtual double e_max() const = 0;

    std::vector<double> apply(std::span<const double> v) const;
};

struct SpectralShift {
    double alpha = 0.0;
    double beta = 0.0;
};

SpectralShift spectral_shift(double e_min, double e_max);
SpectralShift spectral_shift(const LinearHamiltonian &h);

std::vector<double> apply_shifted(const LinearHamiltonian &h, const SpectralShift &shift,
                                  std::span<const double> v);

/// H - alpha I with a running count of real operator applications.
/// One instance per propagation; not meant to be shared between threads.
class ShiftedOperator {
   public:
    ShiftedOperator(const LinearHamiltonian &h, const SpectralShift &shift);

    std::size_t dim() const { return h_->dim(); }
    double alpha() const { return shift_.alpha; }
    double beta() const { return shift_.beta; }
    const SpectralShift &shift() const { return shift_; }

    void apply(std::span<const double> v, std::span<double> out) const;
    std::uint64_t products() const { return products_; }
    void reset_products() { products_ = 0; }

   private:
    const LinearHamiltonian *h_;
    SpectralShift shift_;
    mutable std::uint64_t products_ = 0;
};

/// Multiplies u by exp(-i alpha t).
WaveState restore_phase(const WaveState &u, double alpha, double t);

void write_state_csv(std::ostream &out, const WaveState &u);
WaveState read_state_csv(std::istream &in);
void write_state_binary(std::ostream &out, const WaveState &u);
WaveState read_state_binary(std::istream &in);

void save_state(const std::string &path, const WaveState &u);
/// Format picked from the extension: ".csv" is text, anything else binary.
WaveState load_state(const std::string &path);

}  // namespace splitprop

#endif
