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

#include "splitprop/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace splitprop {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kInvPhi = 0.6180339887498949;

// Absolute slack below 1 that a sample of |C| needs to count as strictly stable.
constexpr double kStableSlack = 1e-12;
// How far |C| may exceed 1 at a tangency and still count as touching.
constexpr double kTangentSlack = 1e-10;
// |S| + sqrt(Q) at a tangency must be this small for K to equal +-I.
constexpr double kIdentityTol = 1e-6;
// 1 - C^2 below this makes nu numerically meaningless.
constexpr double kNuGuard = 1e-12;

int grid_size(int degree) { return std::max(4096, 64 * degree); }

// Maximizes f on [a, b]; NaN values count as -infinity.
template <class F>
std::pair<double, double> golden_max(F &&f, double a, double b) {
    auto val = [&](double y) {
        double v = f(y);
        return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    };
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = val(x1), f2 = val(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = val(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = val(x1);
        }
    }
    return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

// Sup of f over [0, theta] from a uniform grid plus golden-section refinement
// around each grid-local maximum.
template <class F>
double sup_on_interval(F &&f, double theta, int degree, bool fill_gaps = false) {
    if (!(theta > 0)) {
        return 0.0;
    }
    const int n = grid_size(degree);
    const double h = theta / n;
    std::vector<double> ys(n + 1), vals(n + 1);
    for (int i = 0; i <= n; ++i) {
        ys[i] = i == n ? theta : h * i;
        vals[i] = f(ys[i]);
    }
    if (fill_gaps) {
        // Quadratic (or linear) interpolation across guarded samples from the flanks.
        for (int i = 0; i <= n; ++i) {
            if (!std::isnan(vals[i])) {
                continue;
            }
            int lo = i - 1, hi = i + 1;
            while (hi <= n && std::isnan(vals[hi])) ++hi;
            if (lo >= 0 && hi <= n) {
                double t = (ys[i] - ys[lo]) / (ys[hi] - ys[lo]);
                double lin = vals[lo] + t * (vals[hi] - vals[lo]);
                if (lo >= 1 && !std::isnan(vals[lo - 1])) {
                    // Newton form through lo-1, lo, hi.
                    double x0 = ys[lo - 1], x1 = ys[lo], x2 = ys[hi];
                    double d01 = (vals[lo] - vals[lo - 1]) / (x1 - x0);
                    double d12 = (vals[hi] - vals[lo]) / (x2 - x1);
                    double d012 = (d12 - d01) / (x2 - x0);
                    double x = ys[i];
                    lin = vals[lo - 1] + d01 * (x - x0) + d012 * (x - x0) * (x - x1);
                }
                vals[i] = lin;
            } else if (lo >= 0) {
                vals[i] = vals[lo];
            } else if (hi <= n) {
                vals[i] = vals[hi];
            } else {
                vals[i] = 0.0;
            }
        }
    }
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
        if (!std::isnan(vals[i])) {
            best = std::max(best, vals[i]);
        }
    }
    for (int i = 0; i <= n; ++i) {
        double v = vals[i];
        if (std::isnan(v)) {
            continue;
        }
        double left = i > 0 ? vals[i - 1] : -std::numeric_limits<double>::infinity();
        double right = i < n ? vals[i + 1] : -std::numeric_limits<double>::infinity();
        if (std::isnan(left)) left = -std::numeric_limits<double>::infinity();
        if (std::isnan(right)) right = -std::numeric_limits<double>::infinity();
        if (v >= left && v >= right) {
            double a = ys[std::max(i - 1, 0)];
            double b = ys[std::min(i + 1, n)];
            auto [y, fy] = golden_max(f, a, b);
            (void)y;
            best = std::max(best, fy);
        }
    }
    return best;
}

}  // namespace

double StabilityMatrix::norm() const {
    double f = k11 * k11 + k12 * k12 + k21 * k21 + k22 * k22;
    // sigma_max + sigma_min = sqrt(f + 2), sigma_max - sigma_min = sqrt(f - 2) when det = 1.
    return 0.5 * (std::sqrt(f + 2) + std::sqrt(std::max(f - 2, 0.0)));
}

StabilityMatrix k_matrix(const SplitCoefficients &c, double y) {
    if (c.a.size() != c.b.size() + 1) {
        throw InvalidInput("k_matrix: need len(a) = len(b) + 1");
    }
    StabilityMatrix k;
    const std::size_t m = c.b.size();
    for (std::size_t j = 0; j <= m; ++j) {
        double ay = c.a[j] * y;
        k.k11 += ay * k.k21;
        k.k12 += ay * k.k22;
        if (j == m) {
            break;
        }
        double by = c.b[j] * y;
        k.k21 -= by * k.k11;
        k.k22 -= by * k.k12;
    }
    return k;
}

CsSample cs_sample(const StabilityMatrix &k) {
    double d = 0.5 * (k.k11 - k.k22);
    double e = 0.5 * (k.k12 + k.k21);
    return {0.5 * (k.k11 + k.k22), 0.5 * (k.k12 - k.k21), d * d + e * e};
}

CsSample cs_sample(const SplitCoefficients &c, double y) { return cs_sample(k_matrix(c, y)); }

std::pair<double, double> cs_values(const SplitCoefficients &c, double y) {
    auto v = cs_sample(c, y);
    return {v.c, v.s};
}

CsSource cs_source(const SplitCoefficients &c) {
    return {[c](double y) { return cs_sample(c, y); }, static_cast<int>(2 * c.stages() + 1)};
}

double epsilon_at(const CsSample &v, double y) {
    return std::hypot(v.c - std::cos(y), v.s - std::sin(y)) + std::sqrt(std::max(v.q, 0.0));
}

double delta_at(const CsSample &v) {
    double q = std::max(v.q, 0.0);
    return std::sqrt(1 + q) + std::sqrt(q) - 1;
}

double mu_at(const CsSample &v, double y) {
    double ac = std::acos(std::clamp(v.c, -1.0, 1.0));
    double best = std::numeric_limits<double>::infinity();
    for (double branch : {ac, -ac}) {
        double j = std::round((y - branch) / kTwoPi);
        best = std::min(best, std::abs(branch + kTwoPi * j - y));
    }
    return best;
}

double nu_at(const CsSample &v) {
    double gap = 1 - v.c * v.c;
    if (gap < kNuGuard) {
        return kNaN;
    }
    double r1 = std::max(v.q, 0.0) / gap;
    return std::sqrt(r1) + 0.5 * r1;
}

double epsilon_sup(const CsSource &f, double theta) {
    theta = std::abs(theta);
    return sup_on_interval([&](double y) { return epsilon_at(f.eval(y), y); }, theta, f.degree);
}

double delta_sup(const CsSource &f, double theta) {
    theta = std::abs(theta);
    return sup_on_interval([&](double y) { return delta_at(f.eval(y)); }, theta, f.degree);
}

MuNu mu_nu_unchecked(const CsSource &f, double theta) {
    theta = std::abs(theta);
    MuNu r;
    r.mu = sup_on_interval([&](double y) { return mu_at(f.eval(y), y); }, theta, f.degree);
    r.nu = sup_on_interval(
        [&](double y) {
            if (y == 0.0) {
                return 0.0;
            }
            return nu_at(f.eval(y));
        },
        theta, f.degree, true);
    return r;
}

namespace {

bool strictly_stable(const CsSample &v) { return std::abs(v.c) < 1 - kStableSlack; }

// Moves from a stable y_lo to an unstable y_hi until the bracket is tight.
double bisect_threshold(const CsSource &f, double y_lo, double y_hi) {
    for (int it = 0; it < 200 && y_hi - y_lo > 1e-13 * std::max(1.0, y_hi); ++it) {
        double mid = 0.5 * (y_lo + y_hi);
        if (strictly_stable(f.eval(mid))) {
            y_lo = mid;
        } else {
            y_hi = mid;
        }
    }
    return y_lo;
}

}  // namespace

double stability_threshold(const CsSource &f, double y_max) {
    if (!(y_max > 0)) {
        return 0.0;
    }
    const int n = std::max(8192, 256 * f.degree);
    const double h = y_max / n;
    std::vector<char> ok(n + 1);
    ok[0] = 1;
    for (int i = 1; i <= n; ++i) {
        ok[i] = strictly_stable(f.eval(h * i)) ? 1 : 0;
    }
    for (int i = 1; i <= n; ++i) {
        if (ok[i]) {
            continue;
        }
        double lo = h * (i - 1);
        bool isolated = i < n && ok[i + 1];
        if (isolated) {
            double hi = h * (i + 1);
            auto [ym, cm] = golden_max([&](double y) { return std::abs(f.eval(y).c); }, lo, hi);
            auto v = f.eval(ym);
            if (cm <= 1 + kTangentSlack && std::abs(v.s) + std::sqrt(std::max(v.q, 0.0)) <= kIdentityTol) {
                continue;
            }
            if (cm > 1 - kStableSlack) {
                return bisect_threshold(f, lo, ym);
            }
        }
        return bisect_threshold(f, lo, h * i);
    }
    return y_max;
}

double epsilon_sup(const SplitCoefficients &c, double theta) { return epsilon_sup(cs_source(c), theta); }

double delta_sup(const SplitCoefficients &c, double theta) { return delta_sup(cs_source(c), theta); }

double stability_threshold(const SplitCoefficients &c) {
    double y_max = 2.0 * static_cast<double>(c.stages()) * 1.01 + 0.1;
    return stability_threshold(cs_source(c), y_max);
}

MuNu mu_nu(const SplitCoefficients &c, double theta) {
    double ys = stability_threshold(c);
    if (std::abs(theta) > ys * (1 + 1e-12)) {
        std::ostringstream msg;
        msg << "mu_nu: theta = " << theta << " exceeds the stability threshold " << ys;
        throw OutOfStability(msg.str());
    }
    return mu_nu_unchecked(cs_source(c), theta);
}

MethodErrorProfile error_profile(const CsSource &f, double theta, double y_star) {
    MethodErrorProfile p;
    p.theta_max = theta;
    p.y_star = y_star;
    p.eps = epsilon_sup(f, theta);
    p.delta = delta_sup(f, theta);
    if (theta <= y_star * (1 + 1e-12)) {
        auto mn = mu_nu_unchecked(f, theta);
        p.mu = mn.mu;
        p.nu = mn.nu;
        p.has_mu_nu = true;
    } else {
        p.has_mu_nu = false;
    }
    return p;
}

MethodErrorProfile error_profile(const SplitCoefficients &c, double theta) {
    return error_profile(cs_source(c), theta, stability_threshold(c));
}

double nstep_bound(const MethodErrorProfile &profile, int n) {
    if (n < 0) {
        throw InvalidInput("nstep_bound: negative step count");
    }
    return n * profile.mu + profile.nu;
}

double combined_bound(const MethodErrorProfile &tail, const MethodErrorProfile &head, int n, bool simplified) {
    if (n == 0) {
        return tail.eps;
    }
    double h = nstep_bound(head, n);
    return tail.eps + (simplified ? 1.0 : 1.0 + tail.delta) * h;
}

double combined_bound(const std::optional<MethodErrorProfile> &tail, const MethodErrorProfile &head, int n,
                      bool simplified) {
    if (!tail) {
        return nstep_bound(head, n);
    }
    return combined_bound(*tail, head, n, simplified);
}

double taylor_bound(int m, double theta) {
    if (m < 0) {
        throw InvalidInput("taylor_bound: negative degree");
    }
    theta = std::abs(theta);
    if (theta == 0.0) {
        return 0.0;
    }
    if (theta <= 50 && m <= 400) {
        double r = 1.0;
        for (int k = 1; k <= m + 1; ++k) {
            r *= theta / k;
        }
        return r;
    }
    return std::exp((m + 1) * std::log(theta) - std::lgamma(m + 2.0));
}

double chebyshev_bound(int m, double theta) {
    theta = std::abs(theta);
    if (!(m > theta)) {
        std::ostringstream msg;
        msg << "chebyshev_bound: requires m > theta (m = " << m << ", theta = " << theta << ")";
        throw ValidityError(msg.str());
    }
    if (theta == 0.0) {
        return 0.0;
    }
    double x = theta / (2.0 * m + 2.0);
    double lg = std::log(4.0) + (m + 1) * (1 - x * x + std::log(x));
    return std::exp(lg);
}

int min_degree(BoundKind kind, double theta, double tol) {
    if (!(tol > 0)) {
        throw InvalidInput("min_degree: tolerance must be positive");
    }
    theta = std::abs(theta);
    auto bound = [&](int m) { return kind == BoundKind::Taylor ? taylor_bound(m, theta) : chebyshev_bound(m, theta); };
    int lo;
    if (kind == BoundKind::Taylor) {
        if (theta <= tol) {
            return 0;
        }
        lo = std::max(0, static_cast<int>(std::ceil(theta)) - 1);
    } else {
        lo = static_cast<int>(std::floor(theta)) + 1;
    }
    // Both bounds decrease monotonically from the bracket start on.
    if (bound(lo) <= tol) {
        return lo;
    }
    int step = 1;
    int hi = lo + step;
    while (bound(hi) > tol) {
        lo = hi;
        step *= 2;
        hi = lo + step;
        if (hi > 100000000) {
            throw NumericalFailure("min_degree: no degree reaches the tolerance");
        }
    }
    // bound(lo) > tol >= bound(hi)
    while (hi - lo > 1) {
        int mid = lo + (hi - lo) / 2;
        if (bound(mid) <= tol) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::vector<TraceRow> trace(const CsSource &f, double theta, int points) {
    std::vector<TraceRow> rows;
    if (points < 2) {
        points = 2;
    }
    rows.reserve(points);
    for (int i = 0; i < points; ++i) {
        double y = -theta + 2 * theta * i / (points - 1);
        auto v = f.eval(y);
        rows.push_back({y, v.c, v.s, epsilon_at(v, y), delta_at(v) + 1});
    }
    return rows;
}

}  // namespace splitprop
