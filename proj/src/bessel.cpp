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

#include <algorithm>
#include <cmath>

#include "splitprop/propagators.hpp"

namespace splitprop {

namespace {

// Ascending series, accurate for small arguments at every order.
double bessel_series(int k, double theta) {
    double half = theta / 2;
    double log_first = k * std::log(half) - std::lgamma(k + 1.0);
    if (log_first < -745.0) {
        return 0.0;
    }
    double term = std::exp(log_first);
    double sum = term;
    double h2 = half * half;
    for (int j = 1; j < 200; ++j) {
        term *= -h2 / (static_cast<double>(j) * static_cast<double>(j + k));
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

}  // namespace

std::vector<double> bessel_j_sequence(int kmax, double theta) {
    if (kmax < 0) {
        return {};
    }
    if (theta < 0) {
        // J_k(-x) = (-1)^k J_k(x)
        auto r = bessel_j_sequence(kmax, -theta);
        for (int k = 1; k <= kmax; k += 2) {
            r[k] = -r[k];
        }
        return r;
    }
    std::vector<double> out(kmax + 1, 0.0);
    if (theta == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (theta < 2.0) {
        for (int k = 0; k <= kmax; ++k) {
            out[k] = bessel_series(k, theta);
            if (out[k] == 0.0) {
                break;
            }
        }
        return out;
    }

    // Miller's backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, started
    // well past both kmax and the turning point k ~ x.
    double top = std::max(static_cast<double>(kmax), theta);
    int start = static_cast<int>(top + 30 + std::sqrt(160.0 * top));
    start += start % 2;
    std::vector<double> j(start + 2, 0.0);
    j[start + 1] = 0.0;
    j[start] = 1e-300;
    const double big = 1e250;
    for (int k = start; k >= 1; --k) {
        j[k - 1] = (2.0 * k / theta) * j[k] - j[k + 1];
        if (std::abs(j[k - 1]) > big) {
            for (int i = k - 1; i <= start; ++i) {
                j[i] /= big;
            }
        }
    }
    // J_0 + 2 sum J_{2k} = 1
    double norm = j[0];
    for (int k = 2; k <= start; k += 2) {
        norm += 2 * j[k];
    }
    for (int k = 0; k <= kmax; ++k) {
        out[k] = j[k] / norm;
    }
    return out;
}

double bessel_j(int k, double theta) {
    if (k < 0) {
        double v = bessel_j(-k, theta);
        return (k % 2 == 0) ? v : -v;
    }
    return bessel_j_sequence(k, theta)[k];
}

}  // namespace splitprop
