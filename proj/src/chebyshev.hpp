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

// Chebyshev series on [-1, 1]: a vector c holds sum_k c[k] T_k(x).

#ifndef SPLITPROP_SRC_CHEBYSHEV_HPP
#define SPLITPROP_SRC_CHEBYSHEV_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <complex>
#include <vector>

namespace splitprop::cheb {

using std::abs;
using std::cos;
using std::sqrt;

template <class R>
using Series = std::vector<R>;

template <class R>
R pi() {
    return boost::math::constants::pi<R>();
}

template <class R, class X>
X eval(const Series<R> &c, X x) {
    if (c.empty()) {
        return X(0);
    }
    X b1(0), b2(0);
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
        X b0 = X(c[k]) + X(2) * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return X(c[0]) + x * b1 - b2;
}

template <class R>
Series<R> trim(Series<R> c) {
    while (c.size() > 1 && c.back() == R(0)) {
        c.pop_back();
    }
    return c;
}

template <class R>
Series<R> add(const Series<R> &a, const Series<R> &b, R sb = R(1)) {
    Series<R> r(std::max(a.size(), b.size()), R(0));
    for (std::size_t k = 0; k < a.size(); ++k) r[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) r[k] += sb * b[k];
    return r;
}

template <class R>
Series<R> mul(const Series<R> &a, const Series<R> &b) {
    if (a.empty() || b.empty()) {
        return {};
    }
    Series<R> r(a.size() + b.size() - 1, R(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == R(0)) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            R h = a[i] * b[j] / R(2);
            r[i + j] += h;
            r[i > j ? i - j : j - i] += h;
        }
    }
    return r;
}

/// x * c(x)
template <class R>
Series<R> mulx(const Series<R> &c) {
    Series<R> r(c.size() + 1, R(0));
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k == 0) {
            r[1] += c[0];
        } else {
            r[k - 1] += c[k] / R(2);
            r[k + 1] += c[k] / R(2);
        }
    }
    return r;
}

/// Quotient of c by x; the remainder c(0) is returned through rem.
template <class R>
Series<R> divx(const Series<R> &c, R *rem = nullptr) {
    const std::size_t n = c.size() - 1;
    if (c.size() <= 1) {
        if (rem) *rem = c.empty() ? R(0) : c[0];
        return {R(0)};
    }
    Series<R> q(n + 1, R(0));  // q[n] stays zero, padding for the recurrence
    // c_k = (q_{k-1} + q_{k+1}) / 2 for k >= 2, c_1 = q_0 + q_2 / 2, c_0 = q_1 / 2 + rem
    for (std::size_t k = n; k >= 2; --k) {
        q[k - 1] = R(2) * c[k] - (k + 1 <= n ? q[k + 1] : R(0));
    }
    q[0] = c[1] - (n >= 2 ? q[2] / R(2) : R(0));
    if (rem) *rem = c[0] - (n >= 1 ? q[1] / R(2) : R(0));
    q.pop_back();
    return q;
}

template <class R>
Series<R> deriv(const Series<R> &c) {
    const std::size_t n = c.size();
    if (n <= 1) {
        return {R(0)};
    }
    Series<R> d(n, R(0));
    // d_{k-1} = d_{k+1} + 2 k c_k, with d_0 halved at the end
    for (std::size_t k = n - 1; k >= 1; --k) {
        d[k - 1] = (k + 1 < n ? d[k + 1] : R(0)) + R(2) * R(k) * c[k];
    }
    d[0] /= R(2);
    d.pop_back();
    return d;
}

/// Monic polynomial prod (x - r_j) with complex roots, in the Chebyshev basis.
template <class R>
Series<std::complex<R>> from_roots(const std::vector<std::complex<R>> &roots) {
    using C = std::complex<R>;
    Series<C> p{C(1)};
    for (const auto &r : roots) {
        Series<C> px = mulx(p);
        for (std::size_t k = 0; k < p.size(); ++k) px[k] -= r * p[k];
        p = std::move(px);
    }
    return p;
}

/// Values at the Chebyshev points x_j = cos(pi (j + 1/2) / n) turned into n coefficients.
template <class R>
Series<R> interpolate(const std::vector<R> &values) {
    const std::size_t n = values.size();
    Series<R> c(n, R(0));
    const R pi = cheb::pi<R>();
    for (std::size_t k = 0; k < n; ++k) {
        R s(0);
        for (std::size_t j = 0; j < n; ++j) {
            s += values[j] * cos(pi * R(k) * (R(j) + R(0.5)) / R(n));
        }
        c[k] = s * R(2) / R(n);
    }
    c[0] /= R(2);
    return c;
}

template <class R>
std::vector<R> points(std::size_t n) {
    std::vector<R> x(n);
    const R pi = cheb::pi<R>();
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = cos(pi * (R(j) + R(0.5)) / R(n));
    }
    return x;
}

template <class R>
using Matrix = Eigen::Matrix<R, Eigen::Dynamic, Eigen::Dynamic>;

// Parlett-Reinsch diagonal similarity to equalize row and column norms.
template <class R>
void balance(Matrix<R> &a) {
    const Eigen::Index n = a.rows();
    bool done = false;
    for (int sweep = 0; sweep < 100 && !done; ++sweep) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            R c(0), r(0);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += abs(a(j, i));
                r += abs(a(i, j));
            }
            if (c == R(0) || r == R(0)) continue;
            R g = r / R(2), f(1), s = c + r;
            while (c < g) {
                f *= R(2);
                c *= R(4);
            }
            g = r * R(2);
            while (c > g) {
                f /= R(2);
                c /= R(4);
            }
            if ((c + r) / f < R(0.95) * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

template <class R>
std::complex<R> eval_with_derivative(const Series<R> &c, const Series<R> &dc, std::complex<R> z,
                                     std::complex<R> *dp) {
    *dp = eval(dc, z);
    return eval(c, z);
}

/// All complex roots of the series. Eigenvalues of the colleague matrix are
/// found in long double and polished by Newton steps in R.
template <class R>
std::vector<std::complex<R>> roots(Series<R> c) {
    using C = std::complex<R>;
    using L = long double;
    R scale(0);
    for (const auto &x : c) scale = std::max(scale, abs(x));
    while (c.size() > 1 && abs(c.back()) <= scale * R(1e-30)) {
        c.pop_back();
    }
    const std::size_t n = c.size() - 1;
    if (n == 0) {
        return {};
    }
    if (n == 1) {
        return {C(-c[0] / c[1])};
    }
    Matrix<L> a = Matrix<L>::Zero(n, n);
    a(0, 1) = L(1);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        a(i, i - 1) = L(0.5);
        a(i, i + 1) = L(0.5);
    }
    for (std::size_t j = 0; j < n; ++j) {
        a(n - 1, j) = static_cast<L>(-c[j] / (R(2) * c[n]));
    }
    a(n - 1, n - 2) += L(0.5);
    balance(a);
    Eigen::EigenSolver<Matrix<L>> es(a, false);
    std::vector<C> out;
    out.reserve(n);
    auto ev = es.eigenvalues();
    Series<R> dc = deriv(c);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        C z(R(ev[i].real()), R(ev[i].imag()));
        C dp;
        C p = eval_with_derivative(c, dc, z, &dp);
        for (int it = 0; it < 40; ++it) {
            if (dp == C(0)) break;
            C z2 = z - p / dp;
            C dp2;
            C p2 = eval_with_derivative(c, dc, z2, &dp2);
            if (!(abs(p2) < abs(p))) break;
            z = z2;
            p = p2;
            dp = dp2;
        }
        out.push_back(z);
    }
    return out;
}

/// Real roots inside [-1 - slack, 1 + slack], sorted.
template <class R>
std::vector<R> real_roots_in_interval(const Series<R> &c, R slack, R imag_tol) {
    std::vector<R> out;
    for (const auto &z : roots(c)) {
        if (abs(z.imag()) <= imag_tol * std::max(R(1), abs(z)) && abs(z.real()) <= R(1) + slack) {
            out.push_back(std::clamp(z.real(), R(-1), R(1)));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

template <class R>
R max_abs(const Series<R> &c) {
    R m(0);
    for (const auto &x : c) m = std::max(m, abs(x));
    return m;
}

}  // namespace splitprop::cheb

#endif
