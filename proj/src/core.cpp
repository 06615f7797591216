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

#include "splitprop/core.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace splitprop {

WaveState::WaveState(std::size_t n) : q(n, 0.0), p(n, 0.0) {
    if (n == 0) {
        throw InvalidInput("WaveState needs at least one component");
    }
}

WaveState::WaveState(std::vector<double> q_, std::vector<double> p_) : q(std::move(q_)), p(std::move(p_)) {
    if (q.size() != p.size()) {
        throw InvalidInput("WaveState: q and p differ in length");
    }
    if (q.empty()) {
        throw InvalidInput("WaveState needs at least one component");
    }
}

double WaveState::norm() const {
    // Scaled accumulation so that huge or tiny amplitudes do not overflow.
    double scale = 0.0;
    double ssq = 1.0;
    auto add = [&](double x) {
        if (x == 0.0) {
            return;
        }
        double ax = std::abs(x);
        if (scale < ax) {
            ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
            scale = ax;
        } else {
            ssq += (ax / scale) * (ax / scale);
        }
    };
    for (double x : q) add(x);
    for (double x : p) add(x);
    return scale * std::sqrt(ssq);
}

double norm(const WaveState &u) { return u.norm(); }

double inner_real(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidInput("inner_real: length mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double distance(const WaveState &a, const WaveState &b) {
    if (a.size() != b.size()) {
        throw InvalidInput("distance: state size mismatch");
    }
    WaveState d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d.q[i] = a.q[i] - b.q[i];
        d.p[i] = a.p[i] - b.p[i];
    }
    return d.norm();
}

std::vector<double> LinearHamiltonian::apply(std::span<const double> v) const {
    if (v.size() != dim()) {
        throw InvalidInput("operator apply: expected length " + std::to_string(dim()) + ", got " +
                           std::to_string(v.size()));
    }
    std::vector<double> out(v.size());
    apply(v, out);
    return out;
}

SpectralShift spectral_shift(double e_min, double e_max) {
    if (!(e_max >= e_min) || !std::isfinite(e_min) || !std::isfinite(e_max)) {
        throw InvalidInput("spectral_shift: need finite e_min <= e_max");
    }
    return {(e_max + e_min) / 2, (e_max - e_min) / 2};
}

SpectralShift spectral_shift(const LinearHamiltonian &h) { return spectral_shift(h.e_min(), h.e_max()); }

std::vector<double> apply_shifted(const LinearHamiltonian &h, const SpectralShift &shift,
                                  std::span<const double> v) {
    std::vector<double> out = h.apply(v);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] -= shift.alpha * v[i];
    }
    return out;
}

ShiftedOperator::ShiftedOperator(const LinearHamiltonian &h, const SpectralShift &shift)
    : h_(&h), shift_(shift) {}

void ShiftedOperator::apply(std::span<const double> v, std::span<double> out) const {
    if (v.size() != h_->dim() || out.size() != h_->dim()) {
        throw InvalidInput("shifted operator: dimension mismatch");
    }
    h_->apply(v, out);
    if (shift_.alpha != 0.0) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] -= shift_.alpha * v[i];
        }
    }
    ++products_;
}

WaveState restore_phase(const WaveState &u, double alpha, double t) {
    double c = std::cos(alpha * t);
    double s = std::sin(alpha * t);
    WaveState r = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
        r.q[i] = c * u.q[i] + s * u.p[i];
        r.p[i] = -s * u.q[i] + c * u.p[i];
    }
    return r;
}

void write_state_csv(std::ostream &out, const WaveState &u) {
    out << "index,q,p\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t i = 0; i < u.size(); ++i) {
        out << i << ',' << u.q[i] << ',' << u.p[i] << '\n';
    }
}

WaveState read_state_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw InvalidInput("state csv: empty input");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "index,q,p") {
        throw InvalidInput("state csv: expected header 'index,q,p'");
    }
    std::vector<double> q, p;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        std::istringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
            throw InvalidInput("state csv: malformed row " + std::to_string(row + 1));
        }
        try {
            if (std::stoull(a) != row) {
                throw InvalidInput("state csv: rows out of order at " + std::to_string(row + 1));
            }
            q.push_back(std::stod(b));
            p.push_back(std::stod(c));
        } catch (const std::logic_error &e) {
            if (dynamic_cast<const InvalidInput *>(&e) != nullptr) {
                throw;
            }
            throw InvalidInput("state csv: bad number in row " + std::to_string(row + 1));
        }
        ++row;
    }
    return WaveState(std::move(q), std::move(p));
}

namespace {

constexpr std::array<char, 4> kMagic{'W', 'S', 'T', '1'};

void put_u64(std::ostream &out, std::uint64_t v) {
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<unsigned char>(v >> (8 * i));
    }
    out.write(reinterpret_cast<const char *>(b.data()), 8);
}

std::uint64_t get_u64(std::istream &in) {
    std::array<unsigned char, 8> b{};
    if (!in.read(reinterpret_cast<char *>(b.data()), 8)) {
        throw InvalidInput("state binary: truncated input");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    return v;
}

}  // namespace

void write_state_binary(std::ostream &out, const WaveState &u) {
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, u.size());
    for (const auto *block : {&u.q, &u.p}) {
        for (double x : *block) {
            put_u64(out, std::bit_cast<std::uint64_t>(x));
        }
    }
    if (!out) {
        throw InvalidInput("state binary: write failed");
    }
}

WaveState read_state_binary(std::istream &in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw InvalidInput("state binary: bad magic");
    }
    std::uint64_t n = get_u64(in);
    if (n == 0 || n > (std::uint64_t{1} << 40)) {
        throw InvalidInput("state binary: implausible length");
    }
    std::vector<double> q(n), p(n);
    for (auto *block : {&q, &p}) {
        for (auto &x : *block) {
            x = std::bit_cast<double>(get_u64(in));
        }
    }
    return WaveState(std::move(q), std::move(p));
}

void save_state(const std::string &path, const WaveState &u) {
    bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    std::ofstream f(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
    if (!f) {
        throw InvalidInput("cannot open " + path + " for writing");
    }
    if (csv) {
        write_state_csv(f, u);
    } else {
        write_state_binary(f, u);
    }
}

WaveState load_state(const std::string &path) {
    bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    std::ifstream f(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
    if (!f) {
        throw InvalidInput("cannot open " + path);
    }
    return csv ? read_state_csv(f) : read_state_binary(f);
}

}  // namespace splitprop
