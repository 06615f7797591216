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
#include <limits>
#include <random>
#include <sstream>

#include "design_internal.hpp"
#include "splitprop/designer.hpp"

namespace splitprop {

using std::abs;
using std::ldexp;
using std::sqrt;

namespace detail {

using Mat = cheb::Matrix<Real>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using Complex = std::complex<Real>;

Series wide_c(const CandidateP &p) {
    if (p.wide) return p.wide->c;
    return Series(p.c.begin(), p.c.end());
}

Series wide_s(const CandidateP &p) {
    if (p.wide) return p.wide->s;
    return Series(p.s.begin(), p.s.end());
}

CandidateP make_candidate(Series c, Series s, double theta, std::vector<double> nodes) {
    CandidateP p;
    p.theta = theta;
    p.nodes = std::move(nodes);
    for (const auto &x : c) p.c.push_back(static_cast<long double>(x));
    for (const auto &x : s) p.s.push_back(static_cast<long double>(x));
    p.wide = std::make_shared<CandidateWide>(CandidateWide{std::move(c), std::move(s)});
    return p;
}

Series defect(const CandidateP &p) {
    const Series c = wide_c(p), s = wide_s(p);
    Series q = cheb::add(cheb::mul(c, c), cheb::mul(s, s));
    if (q.empty()) q.push_back(0);
    q[0] -= 1;
    for (std::size_t k = 1; k < q.size(); k += 2) q[k] = 0;
    return q;
}

Series real_from_roots(const std::vector<Real> &roots) {
    Series p{1};
    for (Real r : roots) {
        Series px = cheb::mulx(p);
        for (std::size_t k = 0; k < p.size(); ++k) px[k] -= r * p[k];
        p = std::move(px);
    }
    return p;
}

namespace {

int series_degree(const Series &s) {
    Real scale = cheb::max_abs(s);
    for (int k = static_cast<int>(s.size()) - 1; k > 0; --k) {
        if (abs(s[k]) > scale * Real(1e-30)) return k;
    }
    return 0;
}

double relative_misfit(const CandidateP &p, const Series &q, const Series &v, const Series &w2) {
    const int n = 2 * static_cast<int>(q.size()) + 2;
    Real worst = 0, scale = 1;
    const Series c = wide_c(p), s = wide_s(p);
    for (Real x : cheb::points<Real>(n)) {
        Real cv = cheb::eval(c, x), sv = cheb::eval(s, x);
        scale = std::max(scale, cv * cv + sv * sv);
        worst = std::max(worst, abs(cheb::eval(q, x) - cheb::eval(v, x) * cheb::eval(w2, x)));
    }
    return static_cast<double>(worst / scale);
}

}  // namespace

Deflation deflate(const CandidateP &p) {
    Deflation d;
    d.q = defect(p);
    const int dq = series_degree(d.q);
    if (!p.nodes.empty()) {
        for (double y : p.nodes) d.w_roots.push_back(Real(y) / Real(p.theta));
        d.w = real_from_roots(d.w_roots);
        Series w2 = cheb::mul(d.w, d.w);
        const int nw = 2 * static_cast<int>(d.w_roots.size());
        const int dv = dq - nw;
        if (dv < 0 || dv % 2 != 0) {
            throw DesignFailure("deflate: defect degree " + std::to_string(dq) + " incompatible with " +
                                std::to_string(d.w_roots.size()) + " nodes");
        }
        const int nu = dv / 2 + 1;
        const int n = 2 * (dq + 1);
        Mat a(n, nu);
        Vec rhs(n);
        auto xs = cheb::points<Real>(n);
        std::vector<Real> t;
        for (int i = 0; i < n; ++i) {
            Real w2x = cheb::eval(w2, xs[i]);
            Real t0 = 1, t1 = xs[i];
            for (int k = 0; k <= dv; ++k) {
                Real tk = k == 0 ? t0 : (k == 1 ? t1 : Real(0));
                if (k >= 2) {
                    tk = 2 * xs[i] * t1 - t0;
                    t0 = t1;
                    t1 = tk;
                }
                if (k % 2 == 0) a(i, k / 2) = w2x * tk;
            }
            rhs[i] = cheb::eval(d.q, xs[i]);
        }
        Vec sol = a.colPivHouseholderQr().solve(rhs);
        d.v.assign(dv + 1, Real(0));
        for (int k = 0; k < nu; ++k) d.v[2 * k] = sol[k];
        d.residual = relative_misfit(p, d.q, d.v, w2);
        return d;
    }
    // A zero of Q at x = 0 is accepted when the remainders are at the level
    // that double-precision input coefficients leave behind (squared, since
    // Q is quadratic in the consistency defects).
    Real sc = 0, ss = 0;
    for (const Real &x : wide_c(p)) sc += abs(x);
    for (const Real &x : wide_s(p)) ss += abs(x);
    const Real de = std::numeric_limits<double>::epsilon();
    const Real noise = Real(1e4) * de * de * (1 + sc * sc + ss * ss) * Real(d.q.size());
    Series v = cheb::trim(d.q);
    int k = 0;
    while (series_degree(v) >= 2) {
        Real r1 = 0, r2 = 0;
        Series v1 = cheb::divx(v, &r1);
        Series v2 = cheb::divx(v1, &r2);
        if (abs(r1) > noise || abs(r2) > noise) break;
        for (std::size_t i = 1; i < v2.size(); i += 2) v2[i] = 0;
        v = v2;
        ++k;
    }
    d.v = v;
    d.w = Series{1};
    for (int i = 0; i < k; ++i) {
        d.w = cheb::mulx(d.w);
        d.w_roots.push_back(0);
    }
    d.residual = relative_misfit(p, d.q, d.v, cheb::mul(d.w, d.w));
    return d;
}

}  // namespace detail

namespace {

using detail::Complex;
using detail::Real;
using detail::Series;
using Mat = cheb::Matrix<Real>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Root groups of an even real polynomial.
struct RootGroups {
    std::vector<Complex> quads;    // a + ib with a, b > 0
    std::vector<Real> imag;        // b > 0 of +-ib
    std::vector<Real> real_pairs;  // a > 0 of double roots at +-a
};

bool classify(const std::vector<Complex> &roots, Real tol, RootGroups &g) {
    g = {};
    std::vector<Complex> quad;
    std::vector<Real> im, re;
    for (const auto &z : roots) {
        Real s = std::max(Real(1), abs(z));
        bool on_real = abs(z.imag()) <= tol * s;
        bool on_imag = abs(z.real()) <= tol * s;
        if (on_real && on_imag) {
            return false;  // zero roots are deflated before this point
        }
        if (on_real) {
            re.push_back(z.real());
        } else if (on_imag) {
            im.push_back(z.imag());
        } else {
            quad.push_back(z);
        }
    }
    for (const auto &z : quad) {
        if (z.real() > 0 && z.imag() > 0) g.quads.push_back(z);
    }
    if (quad.size() != 4 * g.quads.size()) return false;
    for (Real b : im) {
        if (b > 0) g.imag.push_back(b);
    }
    if (im.size() != 2 * g.imag.size()) return false;
    std::vector<Real> pos;
    for (Real a : re) {
        if (a > 0) pos.push_back(a);
    }
    if (re.size() != 2 * pos.size() || pos.size() % 2 != 0) return false;
    std::sort(pos.begin(), pos.end());
    for (std::size_t i = 0; i < pos.size(); i += 2) {
        if (abs(pos[i + 1] - pos[i]) > sqrt(tol) * std::max(Real(1), pos[i])) return false;
        g.real_pairs.push_back((pos[i] + pos[i + 1]) / 2);
    }
    return true;
}

// (xK)[n] when K has no terms above n - 1.
Real top_of_x(const Series &k, int n) {
    if (n - 1 < 0 || n - 1 >= static_cast<int>(k.size())) return 0;
    return n - 1 == 0 ? k[0] : k[n - 1] / 2;
}

Real coef(const Series &s, int n) { return n >= 0 && n < static_cast<int>(s.size()) ? s[n] : Real(0); }

Series resized(Series s, int degree) {
    s.resize(std::max(degree + 1, 1), Real(0));
    return s;
}

// Least-squares shear parameter zeroing u - alpha v in both entries.
Real shear(Real u1, Real v1, Real u2, Real v2, Real &misfit) {
    Real den = v1 * v1 + v2 * v2;
    if (!(den > 0)) {
        misfit = std::numeric_limits<Real>::infinity();
        return 0;
    }
    Real al = (u1 * v1 + u2 * v2) / den;
    Real scale = std::max({abs(u1), abs(u2), Real(1e-300)});
    misfit = std::max(abs(u1 - al * v1), abs(u2 - al * v2)) / scale;
    return al;
}

// Chebyshev coefficients of C (even) and S (odd) for a sequence, stacked.
Vec cs_coefficients(const std::vector<Real> &v, int m, Real theta) {
    Series k11{1}, k12{0}, k21{0}, k22{1};
    for (int j = 0; j <= m; ++j) {
        Real al = v[j] * theta;
        k11 = cheb::add(k11, cheb::mulx(k21), al);
        k12 = cheb::add(k12, cheb::mulx(k22), al);
        if (j == m) break;
        Real be = v[m + 1 + j] * theta;
        k21 = cheb::add(k21, cheb::mulx(k11), -be);
        k22 = cheb::add(k22, cheb::mulx(k12), -be);
    }
    Vec out = Vec::Zero(2 * m + 2);
    for (int k = 0; k <= m; ++k) {
        out[k] = (coef(k11, 2 * k) + coef(k22, 2 * k)) / 2;
        out[m + 1 + k] = (coef(k12, 2 * k + 1) - coef(k21, 2 * k + 1)) / 2;
    }
    return out;
}

// Gauss-Newton refinement of a sequence against the target (C, S). Each
// coefficient enters the stability matrix affinely, so Jacobian columns are
// exact differences.
SplitCoefficients polish(const SplitCoefficients &start, const Series &c, const Series &s, int m, Real theta) {
    Vec target(2 * m + 2);
    for (int k = 0; k <= m; ++k) {
        target[k] = coef(c, 2 * k);
        target[m + 1 + k] = coef(s, 2 * k + 1);
    }
    const Real scale = std::max(target.cwiseAbs().maxCoeff(), Real(1));
    std::vector<Real> v;
    for (double x : start.a) v.push_back(x);
    for (double x : start.b) v.push_back(x);
    const int n = static_cast<int>(v.size());
    auto residual = [&](const std::vector<Real> &w) { return Vec((cs_coefficients(w, m, theta) - target) / scale); };
    Vec r = residual(v);
    for (int it = 0; it < 40; ++it) {
        Mat j(2 * m + 2, n);
        for (int col = 0; col < n; ++col) {
            std::vector<Real> w = v;
            w[col] = 1;
            Vec hi = cs_coefficients(w, m, theta);
            w[col] = 0;
            j.col(col) = (hi - cs_coefficients(w, m, theta)) / scale;
        }
        Vec step = j.colPivHouseholderQr().solve(-r);
        Real t = 1;
        bool moved = false;
        for (int ls = 0; ls < 30; ++ls, t /= 2) {
            std::vector<Real> w = v;
            for (int i = 0; i < n; ++i) w[i] += t * step[i];
            Vec rn = residual(w);
            if (rn.norm() < r.norm()) {
                v = w;
                r = rn;
                moved = true;
                break;
            }
        }
        if (!moved || t * step.norm() <= Real(1e-17) * (1 + step.norm())) break;
    }
    std::vector<double> a(m + 1), b(m);
    for (int i = 0; i <= m; ++i) a[i] = static_cast<double>(v[i]);
    for (int i = 0; i < m; ++i) b[i] = static_cast<double>(v[m + 1 + i]);
    return SplitCoefficients(a, b);
}

double l1_norm(const SplitCoefficients &c) {
    double l1 = 0;
    for (double x : c.a) l1 += abs(x);
    for (double x : c.b) l1 += abs(x);
    return l1;
}

struct Branch {
    SplitCoefficients coeffs;
    double peel_misfit = 0;
    double roundtrip = 0;
    double l1 = 0;
};

Branch peel(const Series &c, const Series &s, const Series &d, const Series &e, int m, Real theta) {
    Series k11 = resized(cheb::add(c, d), 2 * m);
    Series k22 = resized(cheb::add(c, d, Real(-1)), 2 * m);
    Series k12 = resized(cheb::add(s, e), 2 * m + 1);
    Series k21 = resized(cheb::add(e, s, Real(-1)), 2 * m - 1);
    std::vector<double> a(m + 1), b(m);
    Real worst = 0;
    for (int k = m; k >= 1; --k) {
        Real mis;
        Real al = shear(coef(k11, 2 * k), top_of_x(k21, 2 * k), coef(k12, 2 * k + 1), top_of_x(k22, 2 * k + 1), mis);
        worst = std::max(worst, mis);
        k11 = resized(cheb::add(k11, cheb::mulx(k21), -al), 2 * k - 2);
        k12 = resized(cheb::add(k12, cheb::mulx(k22), -al), 2 * k - 1);
        a[k] = static_cast<double>(al / theta);

        Real be = shear(coef(k21, 2 * k - 1), -top_of_x(k11, 2 * k - 1), coef(k22, 2 * k), -top_of_x(k12, 2 * k), mis);
        worst = std::max(worst, mis);
        k21 = resized(cheb::add(k21, cheb::mulx(k11), be), 2 * k - 3);
        k22 = resized(cheb::add(k22, cheb::mulx(k12), be), 2 * k - 2);
        b[k - 1] = static_cast<double>(be / theta);
    }
    a[0] = static_cast<double>(coef(k12, 1) / theta);
    Real rest = std::max({abs(coef(k11, 0) - 1), abs(coef(k22, 0) - 1), abs(coef(k21, 0)),
                          abs(coef(k12, 0))});
    worst = std::max(worst, rest);
    Branch br{SplitCoefficients(a, b), static_cast<double>(worst), 0, 0};
    br.l1 = l1_norm(br.coeffs);
    return br;
}

double roundtrip_error(const SplitCoefficients &coeffs, const CandidateP &p) {
    constexpr int kSamples = 1000;
    double worst = 0, scale = 1;
    for (int i = 0; i <= kSamples; ++i) {
        double y = p.theta * i / kSamples;
        auto ref = p.sample(y);
        auto got = cs_sample(coeffs, y);
        scale = std::max({scale, abs(ref.c), abs(ref.s)});
        worst = std::max({worst, abs(got.c - ref.c), abs(got.s - ref.s)});
    }
    return worst / scale;
}

}  // namespace

SplitCoefficients split_factorization(const CandidateP &p, int m, FactorizationReport *report) {
    if (m < 1) {
        throw InvalidInput("split_factorization: m must be at least 1");
    }
    if (p.degree() > 2 * m + 1) {
        throw InvalidInput("split_factorization: candidate degree exceeds 2m + 1");
    }
    const Real theta = p.theta;
    Series c = resized(detail::wide_c(p), 2 * m), s = resized(detail::wide_s(p), 2 * m + 1);
    for (int k = 1; k <= 2 * m; k += 2) c[k] = 0;
    for (int k = 0; k <= 2 * m + 1; k += 2) s[k] = 0;
    if (s[2 * m + 1] == 0) {
        throw DesignFailure("split_factorization: S has degree below 2m + 1");
    }
    const Real s_mono = ldexp(s[2 * m + 1], 2 * m);

    detail::Deflation d = detail::deflate(p);
    if (d.residual > 1e-8) {
        std::ostringstream msg;
        msg << "split_factorization: deflation residual " << d.residual;
        throw DesignFailure(msg.str());
    }
    std::vector<Complex> vr = cheb::roots(d.v);
    RootGroups groups;
    bool ok = false;
    for (Real tol : {Real(1e-12), Real(1e-10), Real(1e-8), Real(1e-6)}) {
        if (classify(vr, tol, groups)) {
            ok = true;
            break;
        }
    }
    if (!ok) {
        throw DesignFailure("split_factorization: roots of C^2 + S^2 - 1 do not form a non-negative pattern");
    }
    const std::size_t nq = groups.quads.size(), ni = groups.imag.size();
    const std::size_t nbits = nq + ni;
    constexpr std::size_t kMaxBranches = 1u << 16;
    std::vector<std::uint64_t> masks;
    if (nbits < 16) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nbits); ++mask) masks.push_back(mask);
    } else {
        std::mt19937_64 rng(0x5eed);
        masks.push_back(0);
        masks.push_back(~std::uint64_t{0});
        while (masks.size() < kMaxBranches) masks.push_back(rng());
    }

    std::optional<Branch> best;
    double best_err = std::numeric_limits<double>::infinity();
    int accepted = 0;
    std::vector<Branch> rough;
    for (std::uint64_t mask : masks) {
        std::vector<Complex> chosen;
        for (Real w : d.w_roots) chosen.emplace_back(w, 0);
        for (std::size_t i = 0; i < nq; ++i) {
            Complex z = groups.quads[i];
            if ((mask >> i) & 1) {
                chosen.push_back(std::conj(z));
                chosen.push_back(-z);
            } else {
                chosen.push_back(z);
                chosen.push_back(-std::conj(z));
            }
        }
        for (std::size_t i = 0; i < ni; ++i) {
            Real bv = groups.imag[i];
            chosen.emplace_back(0, ((mask >> (nq + i)) & 1) ? -bv : bv);
        }
        for (Real a : groups.real_pairs) {
            chosen.emplace_back(a, 0);
            chosen.emplace_back(-a, 0);
        }
        if (static_cast<int>(chosen.size()) != 2 * m + 1) {
            throw DesignFailure("split_factorization: root count " + std::to_string(chosen.size()) +
                                " does not match degree 2m + 1");
        }
        auto g = cheb::from_roots(chosen);
        Series e(2 * m + 2, Real(0)), dd(2 * m + 1, Real(0));
        for (int k = 0; k <= 2 * m + 1; ++k) {
            Complex v = s_mono * g[k];
            if (k % 2 == 1) {
                e[k] = v.real();
            } else {
                dd[k] = v.imag();
            }
        }
        e[2 * m + 1] = s[2 * m + 1];
        Branch br = peel(c, s, dd, e, m, theta);
        if (!std::isfinite(br.peel_misfit)) continue;
        if (br.peel_misfit < 1e-6) {
            br.roundtrip = roundtrip_error(br.coeffs, p);
        } else {
            br.roundtrip = std::numeric_limits<double>::infinity();
        }
        if (!(br.roundtrip <= 1e-9)) {
            rough.push_back(br);
            continue;
        }
        ++accepted;
        if (!best || br.l1 < best->l1) best = br;
    }
    // Peeling loses accuracy when the leading coefficients are small; refine
    // the most promising branches against (C, S) directly.
    if (!best) {
        std::sort(rough.begin(), rough.end(),
                  [](const Branch &x, const Branch &y) { return x.peel_misfit < y.peel_misfit; });
        if (rough.size() > 16) rough.resize(16);
        for (auto &br : rough) {
            br.coeffs = polish(br.coeffs, c, s, m, theta);
            br.roundtrip = roundtrip_error(br.coeffs, p);
            br.l1 = l1_norm(br.coeffs);
            best_err = std::min(best_err, br.roundtrip);
            if (!(br.roundtrip <= 1e-9)) continue;
            ++accepted;
            if (!best || br.l1 < best->l1) best = br;
        }
    }
    if (report) {
        report->branches = static_cast<int>(masks.size());
        report->accepted = accepted;
        report->roundtrip_error = best ? best->roundtrip : best_err;
        report->l1_norm = best ? best->l1 : 0;
    }
    if (!best) {
        std::ostringstream msg;
        msg << "split_factorization: no branch reproduces (C, S); best error " << best_err << " over "
            << masks.size() << " branches";
        throw DesignFailure(msg.str());
    }
    return best->coeffs;
}

}  // namespace splitprop
