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

#include "splitprop/designer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "design_internal.hpp"
#include "json.hpp"

namespace splitprop {

using std::abs;
using std::cos;
using std::ldexp;
using std::sin;
using std::sqrt;

using detail::Real;
using detail::Series;
using Mat = cheb::Matrix<Real>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

std::vector<double> chebyshev_nodes(int l, double theta) {
    if (l < 1) {
        throw InvalidInput("chebyshev_nodes: need l >= 1");
    }
    std::vector<double> x(l, 0.0);
    for (int k = 0; k < l / 2; ++k) {
        double v = theta * cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * l));
        x[l - 1 - k] = v;
        x[k] = -v;
    }
    return x;
}

DesignProblem make_design_problem(int m, double theta, int l) {
    if (m < 1) {
        throw InvalidInput("design: m must be at least 1");
    }
    if (!(theta > 0) || !std::isfinite(theta)) {
        throw InvalidInput("design: theta must be positive and finite");
    }
    if (l % 2 == 0 || l < m + 1 || l > 2 * m + 1) {
        throw InvalidInput("design: l must be odd with m + 1 <= l <= 2m + 1 (got l = " + std::to_string(l) + ")");
    }
    return {m, theta, l, chebyshev_nodes(l, theta)};
}

namespace {

// T_k(x) and T_k'(x) for k = 0..n.
template <class T>
void basis(T x, int n, std::vector<T> &t, std::vector<T> &dt) {
    t.assign(n + 1, T(0));
    dt.assign(n + 1, T(0));
    std::vector<T> u(n + 1, T(0));
    t[0] = 1;
    u[0] = 1;
    if (n >= 1) {
        t[1] = x;
        u[1] = 2 * x;
    }
    for (int k = 2; k <= n; ++k) {
        t[k] = 2 * x * t[k - 1] - t[k - 2];
        u[k] = 2 * x * u[k - 1] - u[k - 2];
    }
    for (int k = 1; k <= n; ++k) dt[k] = T(k) * u[k - 1];
}

template <class T>
using MatT = cheb::Matrix<T>;
template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Hermite conditions at symmetric nodes, split by parity. C carries values at
// x >= 0 and slopes at x > 0; S carries values at x > 0 and slopes at x >= 0.
template <class T>
struct Hermite {
    using M = MatT<T>;
    using V = VecT<T>;
    T theta = 1;
    int l = 0;
    std::vector<T> xs;  // distinct non-negative nodes in x units
    bool has_zero = false;
    M mc_inv, ms_inv;
    M tb, td;  // T_{2j+1} and T'_{2j+1} at xs

    Hermite(const std::vector<double> &nodes, double theta_) : theta(theta_), l(static_cast<int>(nodes.size())) {
        if (l < 1) {
            throw InvalidInput("hermite: empty node set");
        }
        std::vector<double> sorted = nodes;
        std::sort(sorted.begin(), sorted.end());
        const double tol = 1e-12 * theta_;
        for (int i = 0; i < l; ++i) {
            if (std::abs(sorted[i] + sorted[l - 1 - i]) > tol) {
                throw InvalidInput("hermite: node set is not symmetric about zero");
            }
            if (i > 0 && sorted[i] - sorted[i - 1] <= tol) {
                throw InvalidInput("hermite: node collision");
            }
        }
        for (int i = l / 2; i < l; ++i) {
            T x = T(sorted[i]) / T(theta_);
            if (l % 2 == 1 && i == l / 2) {
                x = 0;
                has_zero = true;
            }
            xs.push_back(x);
        }
        const int nx = static_cast<int>(xs.size());
        const int npos = nx - (has_zero ? 1 : 0);
        M mc(l, l), ms(l, l);
        tb.resize(nx, l);
        td.resize(nx, l);
        std::vector<T> t, dt;
        int rc = 0, rs = 0;
        for (int i = 0; i < nx; ++i) {
            basis(xs[i], 2 * l, t, dt);
            for (int k = 0; k < l; ++k) {
                mc(rc, k) = t[2 * k];
                tb(i, k) = t[2 * k + 1];
                td(i, k) = dt[2 * k + 1];
            }
            ++rc;
        }
        for (int i = 0; i < nx; ++i) {
            if (xs[i] == 0) continue;
            basis(xs[i], 2 * l, t, dt);
            for (int k = 0; k < l; ++k) {
                mc(rc, k) = dt[2 * k];
                ms(rs, k) = t[2 * k + 1];
            }
            ++rc;
            ++rs;
        }
        for (int i = 0; i < nx; ++i) {
            basis(xs[i], 2 * l, t, dt);
            for (int k = 0; k < l; ++k) ms(rs, k) = dt[2 * k + 1];
            ++rs;
        }
        if (rc != l || rs != l || npos + nx != l) {
            throw InvalidInput("hermite: inconsistent node count");
        }
        Eigen::FullPivLU<M> lc(mc), ls(ms);
        if (!lc.isInvertible() || !ls.isInvertible()) {
            throw DesignFailure("hermite: singular interpolation system");
        }
        mc_inv = lc.inverse();
        ms_inv = ls.inverse();
    }

    // Coefficients of C (T_{2k}) and S (T_{2k+1}); Jacobians w.r.t. e when requested.
    void solve(const V &e, V &cc, V &cs, M *jc, M *js) const {
        const int nx = static_cast<int>(xs.size());
        V dc(l), ds(l);
        M jdc, jds;
        if (jc) {
            jdc.resize(l, l);
            jds.resize(l, l);
        }
        V ev = tb * e;
        V dev = td * e;
        int rc = 0, rs = 0;
        for (int i = 0; i < nx; ++i) {
            T g = theta * xs[i] + ev[i];
            dc[rc] = cos(g);
            if (jc) jdc.row(rc) = -sin(g) * tb.row(i);
            ++rc;
        }
        for (int i = 0; i < nx; ++i) {
            if (xs[i] == 0) continue;
            T g = theta * xs[i] + ev[i], gx = theta + dev[i];
            T sg = sin(g), cg = cos(g);
            dc[rc] = -gx * sg;
            ds[rs] = sg;
            if (jc) {
                jdc.row(rc) = -sg * td.row(i) - gx * cg * tb.row(i);
                jds.row(rs) = cg * tb.row(i);
            }
            ++rc;
            ++rs;
        }
        for (int i = 0; i < nx; ++i) {
            T g = theta * xs[i] + ev[i], gx = theta + dev[i];
            T sg = sin(g), cg = cos(g);
            ds[rs] = gx * cg;
            if (jc) jds.row(rs) = cg * td.row(i) - gx * sg * tb.row(i);
            ++rs;
        }
        cc = mc_inv * dc;
        cs = ms_inv * ds;
        if (jc) {
            *jc = mc_inv * jdc;
            *js = ms_inv * jds;
        }
    }
};

Vec to_vec(const Series &v) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

std::vector<long double> from_vec(const Vec &v) {
    std::vector<long double> out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = static_cast<long double>(v[i]);
    return out;
}

CandidateP assemble(const Vec &cc, const Vec &cs, int keep, double theta, const std::vector<double> &nodes) {
    Series c(2 * keep + 1, Real(0)), s(2 * keep + 2, Real(0));
    for (int k = 0; k <= keep; ++k) {
        c[2 * k] = cc[k];
        s[2 * k + 1] = cs[k];
    }
    return detail::make_candidate(std::move(c), std::move(s), theta, nodes);
}

}  // namespace

long double PhasePoly::operator()(long double y) const {
    std::vector<long double> full(2 * coeffs.size(), 0.0L);
    for (std::size_t j = 0; j < coeffs.size(); ++j) full[2 * j + 1] = coeffs[j];
    return cheb::eval(full, y / static_cast<long double>(theta));
}

double PhasePoly::norm() const {
    long double s = 0;
    for (auto c : coeffs) s += c * c;
    return static_cast<double>(std::sqrt(s));
}

int CandidateP::degree() const {
    int d = 0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
        if (c[k] != 0) {
            d = std::max(d, k);
            break;
        }
    }
    for (int k = static_cast<int>(s.size()) - 1; k >= 0; --k) {
        if (s[k] != 0) {
            d = std::max(d, k);
            break;
        }
    }
    return d;
}

long double CandidateP::p(long double y) const {
    long double x = y / static_cast<long double>(theta);
    return cheb::eval(c, x) + cheb::eval(s, x);
}

CsSample CandidateP::sample(double y) const {
    if (wide) {
        Real x = Real(y) / Real(theta);
        Real cv = cheb::eval(wide->c, x), sv = cheb::eval(wide->s, x);
        return {static_cast<double>(cv), static_cast<double>(sv), static_cast<double>(cv * cv + sv * sv - 1)};
    }
    long double x = static_cast<long double>(y) / static_cast<long double>(theta);
    long double cv = cheb::eval(c, x), sv = cheb::eval(s, x);
    return {static_cast<double>(cv), static_cast<double>(sv), static_cast<double>(cv * cv + sv * sv - 1)};
}

CsSource CandidateP::source() const {
    CandidateP copy = *this;
    return {[copy](double y) { return copy.sample(y); }, std::max(1, degree())};
}

CandidateP candidate_from_sequence(const SplitCoefficients &c, double theta) {
    if (c.a.size() != c.b.size() + 1) {
        throw InvalidInput("candidate_from_sequence: need len(a) = len(b) + 1");
    }
    if (!(theta > 0)) {
        throw InvalidInput("candidate_from_sequence: theta must be positive");
    }
    const Real th = theta;
    Series k11{1}, k12{0}, k21{0}, k22{1};
    const std::size_t m = c.b.size();
    for (std::size_t j = 0; j <= m; ++j) {
        Real al = Real(c.a[j]) * th;
        k11 = cheb::add(k11, cheb::mulx(k21), al);
        k12 = cheb::add(k12, cheb::mulx(k22), al);
        if (j == m) break;
        Real be = Real(c.b[j]) * th;
        k21 = cheb::add(k21, cheb::mulx(k11), -be);
        k22 = cheb::add(k22, cheb::mulx(k12), -be);
    }
    Series cc = cheb::add(k11, k22), ss = cheb::add(k12, k21, Real(-1));
    Series pc(2 * m + 1, Real(0)), ps(2 * m + 2, Real(0));
    for (std::size_t k = 0; k < pc.size() && k < cc.size(); k += 2) pc[k] = cc[k] / 2;
    for (std::size_t k = 1; k < ps.size() && k < ss.size(); k += 2) ps[k] = ss[k] / 2;
    return detail::make_candidate(std::move(pc), std::move(ps), theta, {});
}

CandidateP hermite_interpolant(const PhasePoly &e, const std::vector<double> &nodes) {
    Hermite<Real> h(nodes, e.theta);
    Vec ev = Vec::Zero(h.l);
    for (int j = 0; j < h.l && j < static_cast<int>(e.coeffs.size()); ++j) ev[j] = Real(e.coeffs[j]);
    for (std::size_t j = h.l; j < e.coeffs.size(); ++j) {
        if (e.coeffs[j] != 0) {
            throw InvalidInput("hermite_interpolant: phase degree exceeds 2l - 1");
        }
    }
    Vec cc, cs;
    h.solve(ev, cc, cs, nullptr, nullptr);
    return assemble(cc, cs, h.l - 1, e.theta, nodes);
}

namespace {

template <class T>
struct Constraint {
    using M = MatT<T>;
    using V = VecT<T>;
    const Hermite<T> &h;
    int m;

    int count() const { return 2 * (h.l - m - 1); }

    // Constraint residual, its Jacobian and the scale of the retained part.
    T eval(const V &e, V &r, M *j) const {
        V cc, cs;
        M jc, js;
        h.solve(e, cc, cs, j ? &jc : nullptr, j ? &js : nullptr);
        const int nk = h.l - m - 1;
        r.resize(2 * nk);
        if (j) j->resize(2 * nk, h.l);
        for (int k = 0; k < nk; ++k) {
            r[k] = cc[m + 1 + k];
            r[nk + k] = cs[m + 1 + k];
            if (j) {
                j->row(k) = jc.row(m + 1 + k);
                j->row(nk + k) = js.row(m + 1 + k);
            }
        }
        T scale = 0;
        for (int k = 0; k <= m; ++k) scale = std::max({scale, T(abs(cc[k])), T(abs(cs[k]))});
        return scale;
    }
};

template <class V>
auto inf_norm(const V &v) {
    using T = typename V::Scalar;
    return v.size() ? T(v.cwiseAbs().maxCoeff()) : T(0);
}

template <class T>
struct RunOutcome {
    VecT<T> e;
    T residual = std::numeric_limits<T>::infinity();
    int iterations = 0;
};

// Minimum-norm Gauss-Newton projections onto the constraint set.
template <class T>
void project(const Constraint<T> &con, VecT<T> &x, int &it, int max_iterations) {
    using M = MatT<T>;
    using V = VecT<T>;
    V r;
    M j;
    T scale = con.eval(x, r, nullptr);
    const T floor = T(64) * std::numeric_limits<T>::epsilon() * std::max(scale, T(1e-300));
    for (; it < max_iterations; ++it) {
        con.eval(x, r, &j);
        T rn0 = inf_norm(r);
        if (rn0 <= floor) break;
        Eigen::CompleteOrthogonalDecomposition<M> cod(j);
        V dir = V(cod.solve(V(j * x - r))) - x;
        T t = 1;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls, t /= 2) {
            V xn = x + t * dir;
            V rn;
            con.eval(xn, rn, nullptr);
            if (inf_norm(rn) < rn0) {
                x = xn;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
}

template <class T>
RunOutcome<T> run_from(const Constraint<T> &con, VecT<T> x, const PhaseOptions &opts) {
    using M = MatT<T>;
    using V = VecT<T>;
    V r;
    M j;
    RunOutcome<T> out;
    int it = 0;
    T scale0 = con.eval(x, r, nullptr);
    if (!(scale0 > 0)) scale0 = 1;

    // Penalty continuation: min |e|^2 + rho |r|^2 for growing rho.
    for (T rho = 1; rho <= T(1e24) && it < opts.max_iterations; rho *= 100) {
        const T sr = sqrt(rho) / scale0;
        for (int inner = 0; inner < 4 && it < opts.max_iterations; ++inner, ++it) {
            con.eval(x, r, &j);
            M a(x.size() + r.size(), x.size());
            a << M::Identity(x.size(), x.size()), sr * j;
            V f(x.size() + r.size());
            f << x, sr * r;
            T merit = f.squaredNorm();
            V step = -a.colPivHouseholderQr().solve(f);
            T t = 1;
            bool moved = false;
            for (int ls = 0; ls < 30; ++ls, t /= 2) {
                V xn = x + t * step;
                V rn;
                con.eval(xn, rn, nullptr);
                if (xn.squaredNorm() + sr * sr * rn.squaredNorm() < merit) {
                    x = xn;
                    moved = true;
                    break;
                }
            }
            if (!moved || t * step.norm() <= T(1e-15) * (1 + x.norm())) break;
        }
    }
    project(con, x, it, opts.max_iterations);
    T scale = con.eval(x, r, nullptr);
    out.e = x;
    out.residual = inf_norm(r) / std::max(scale, T(1e-300));
    out.iterations = it;
    return out;
}

}  // namespace

PhaseResult optimize_phase(const DesignProblem &problem, const PhaseOptions &opts) {
    using L = long double;
    const int m = problem.m, l = problem.l;
    if (l < m + 1) {
        throw InvalidInput("optimize_phase: need l >= m + 1");
    }
    Hermite<Real> hw(problem.nodes, problem.theta);
    Constraint<Real> cw{hw, m};
    PhaseResult res;
    res.e.theta = problem.theta;

    auto finish = [&](const Vec &e, int iterations) {
        Vec r;
        Real scale = cw.eval(e, r, nullptr);
        Real residual = cw.count() ? inf_norm(r) / std::max(scale, Real(1e-300)) : Real(0);
        res.e.coeffs = from_vec(e);
        Vec cc, cs;
        hw.solve(e, cc, cs, nullptr, nullptr);
        res.candidate = assemble(cc, cs, m, problem.theta, problem.nodes);
        res.residual = static_cast<double>(residual);
        res.converged = residual <= Real(opts.tolerance);
        res.iterations = iterations;
    };

    if (cw.count() == 0) {
        finish(Vec::Zero(l), 0);
        return res;
    }

    // Search in long double, then polish the constraints in full precision so
    // that the dropped coefficients vanish to the level the defect needs.
    Hermite<L> hl(problem.nodes, problem.theta);
    Constraint<L> cl{hl, m};
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    RunOutcome<L> best;
    bool have = false;
    int total = 0;
    for (int s = 0; s < std::max(1, opts.starts); ++s) {
        VecT<L> x0 = VecT<L>::Zero(l);
        if (s > 0) {
            for (int k = 0; k < l; ++k) x0[k] = L(0.05 * nd(rng));
        }
        RunOutcome<L> o = run_from(cl, x0, opts);
        total += o.iterations;
        bool ok = o.residual <= L(opts.tolerance);
        bool best_ok = have && best.residual <= L(opts.tolerance);
        if (!have || (ok && (!best_ok || o.e.norm() < best.e.norm())) || (!ok && !best_ok && o.residual < best.residual)) {
            best = o;
            have = true;
        }
    }
    Vec x(l);
    for (int k = 0; k < l; ++k) x[k] = Real(best.e[k]);
    int extra = 0;
    project(cw, x, extra, 30);
    finish(x, total + extra);
    return res;
}

PhaseResult optimize_phase(int m, double theta, int l, const PhaseOptions &opts) {
    return optimize_phase(make_design_problem(m, theta, l), opts);
}

namespace {

// Sign changes of V on the real line outside [-1, 1]: real roots that do not pair up.
bool unpaired_outer_roots(const Series &v) {
    std::vector<Real> outer;
    for (const auto &z : cheb::roots(v)) {
        if (abs(z.imag()) <= Real(1e-6) * std::max(Real(1), abs(z)) && abs(z.real()) > 1) {
            outer.push_back(z.real());
        }
    }
    std::sort(outer.begin(), outer.end());
    for (std::size_t i = 0; i < outer.size();) {
        if (i + 1 < outer.size() && abs(outer[i + 1] - outer[i]) <= Real(1e-4) * abs(outer[i])) {
            i += 2;
        } else {
            return true;
        }
    }
    return false;
}

}  // namespace

ValidationReport validate_candidate(const CandidateP &p, int m, double theta) {
    if (abs(p.theta - theta) > 1e-12 * theta) {
        throw InvalidInput("validate_candidate: theta mismatch");
    }
    if (p.degree() > 2 * m + 1) {
        throw InvalidInput("validate_candidate: candidate degree exceeds 2m + 1");
    }
    ValidationReport rep;
    detail::Deflation d = detail::deflate(p);
    rep.deflation_residual = d.residual;
    for (const auto &x : d.v) rep.v.push_back(static_cast<long double>(x));
    if (d.residual > 1e-8) {
        std::ostringstream msg;
        msg << "deflation residual " << d.residual << " exceeds 1e-8";
        throw DesignFailure(msg.str());
    }

    const Series pc = detail::wide_c(p);
    const int grid = std::max(4001, 64 * (2 * m + 2));
    Real vmin = std::numeric_limits<Real>::infinity(), vmax = 0;
    Real cmax = 0;
    for (int i = 0; i < grid; ++i) {
        Real x = Real(-1) + Real(2) * i / (grid - 1);
        Real v = cheb::eval(d.v, x);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, abs(v));
        cmax = std::max(cmax, abs(cheb::eval(pc, x)));
    }
    const bool outer = unpaired_outer_roots(d.v);
    rep.v_nonnegative = vmin >= -Real(1e-9) * std::max(vmax, Real(1e-300)) && !outer;
    rep.max_abs_c = static_cast<double>(cmax);
    rep.stable = cmax <= Real(1) + Real(1e-12);

    CsSource src = p.source();
    rep.eps = epsilon_sup(src, theta);
    rep.delta = delta_sup(src, theta);
    if (rep.stable) {
        auto mn = mu_nu_unchecked(src, theta);
        rep.mu = mn.mu;
        rep.nu = mn.nu;
        rep.has_mu_nu = true;
    }
    std::ostringstream msg;
    if (outer) {
        msg << "V changes sign outside [-theta, theta]; ";
    } else if (!rep.v_nonnegative) {
        msg << "V takes negative values (min " << static_cast<double>(vmin) << "); ";
    }
    if (!rep.stable) msg << "max |C| = " << rep.max_abs_c << " exceeds 1; ";
    rep.message = msg.str();
    return rep;
}

namespace {

// Nodes anchored at the given points plus free pairs chosen to minimize the
// Chebyshev coefficients of the monic node polynomial.
std::vector<double> place_free_nodes(const std::vector<Real> &anchors, int l, double theta) {
    const int na = static_cast<int>(anchors.size());
    const int fp = (l - na) / 2;
    std::vector<Real> all = anchors;
    if (fp > 0) {
        Series a = detail::real_from_roots(anchors);
        const Real top = ldexp(Real(1), 1 - 2 * fp);
        Series tn(2 * fp + 1, Real(0));
        tn[2 * fp] = top;
        Series w0 = cheb::mul(a, tn);
        Mat b(w0.size(), fp);
        b.setZero();
        for (int k = 0; k < fp; ++k) {
            Series tk(2 * k + 1, Real(0));
            tk[2 * k] = 1;
            Series col = cheb::mul(a, tk);
            for (std::size_t i = 0; i < col.size(); ++i) b(i, k) = col[i];
        }
        Vec f = b.colPivHouseholderQr().solve(-to_vec(w0));
        Series fs(2 * fp + 1, Real(0));
        for (int k = 0; k < fp; ++k) fs[2 * k] = f[k];
        fs[2 * fp] = top;
        for (const auto &z : cheb::roots(fs)) {
            if (abs(z.imag()) > Real(1e-8) || abs(z.real()) >= 1) {
                throw DesignFailure("stabilize: free nodes left the interval");
            }
            all.push_back(z.real());
        }
    }
    std::sort(all.begin(), all.end());
    std::vector<double> nodes(all.size());
    const int n = static_cast<int>(all.size());
    for (int i = 0; i < n; ++i) {
        Real v = (all[i] - all[n - 1 - i]) / 2;
        nodes[i] = static_cast<double>(v * Real(theta));
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
    return nodes;
}

}  // namespace

StabilizeResult stabilize_nodes(const DesignProblem &problem, const PhaseOptions &opts) {
    StabilizeResult res;
    res.problem = problem;
    const double theta = problem.theta;
    const int l = problem.l;
    if (theta < std::numbers::pi) {
        res.phase = optimize_phase(problem, opts);
        res.converged = res.phase.converged;
        return res;
    }

    // Start from the zeros of sin y, where C = +-1 for the exact propagator.
    std::vector<Real> anchors;
    for (int j = -static_cast<int>(std::floor(theta / std::numbers::pi)); j * std::numbers::pi <= theta; ++j) {
        anchors.push_back(Real(j) * cheb::pi<Real>() / Real(theta));
    }
    std::vector<double> prev;
    for (int it = 1; it <= 50; ++it) {
        if (static_cast<int>(anchors.size()) > l || (l - static_cast<int>(anchors.size())) % 2 != 0) {
            throw DesignFailure("stabilize: anchor count " + std::to_string(anchors.size()) +
                                " incompatible with l = " + std::to_string(l));
        }
        res.problem.nodes = place_free_nodes(anchors, l, theta);
        res.phase = optimize_phase(res.problem, opts);
        res.iterations = it;
        if (!prev.empty()) {
            double mv = 0;
            for (int i = 0; i < l; ++i) mv = std::max(mv, abs(res.problem.nodes[i] - prev[i]));
            res.movement = mv;
            if (mv < 1e-10 * theta) {
                res.converged = res.phase.converged;
                return res;
            }
        }
        prev = res.problem.nodes;
        // Extrema of C inside the interval become the next anchors.
        const Series cw = detail::wide_c(res.phase.candidate);
        Series dc = cheb::deriv(cw);
        std::vector<Real> next;
        for (Real x : cheb::real_roots_in_interval(dc, Real(0), Real(1e-8))) {
            Real cv = cheb::eval(cw, x);
            if (abs(cv) >= Real(0.5)) next.push_back(x);
        }
        // Keep the set symmetric and collision free.
        std::vector<Real> sym;
        for (Real x : next) {
            if (x > Real(1e-9)) {
                sym.push_back(x);
                sym.push_back(-x);
            }
        }
        sym.push_back(0);
        std::sort(sym.begin(), sym.end());
        sym.erase(std::unique(sym.begin(), sym.end(), [](Real a, Real b) { return abs(a - b) < Real(1e-9); }),
                  sym.end());
        if (sym.size() == anchors.size()) {
            anchors = sym;
        } else {
            res.movement = std::numeric_limits<double>::infinity();
            break;
        }
    }
    res.converged = false;
    return res;
}

std::vector<int> l_candidates(int m, int window) {
    std::vector<int> ls;
    for (int l = m + 1; l <= 2 * m + 1; ++l) {
        if (l % 2 == 1) ls.push_back(l);
    }
    const double center = (3.0 * m + 3.0) / 2.0;
    std::stable_sort(ls.begin(), ls.end(),
                     [center](int a, int b) { return abs(a - center) < abs(b - center); });
    if (window >= 0 && static_cast<int>(ls.size()) > window) ls.resize(window);
    return ls;
}

namespace {

struct Trial {
    DesignAttempt attempt;
    std::optional<MethodRecord> record;
};

std::string gamma_label(double gamma) {
    std::ostringstream os;
    os.precision(6);
    os << gamma;
    return os.str();
}

// The phase perturbation moves S'(0) and C''(0) off 1 and -1 by about |e'(0)|;
// rescaling each family restores sum a = sum b = 1 at the same order.
SplitCoefficients make_consistent(const SplitCoefficients &c) {
    double sa = 0, sb = 0;
    for (double v : c.a) sa += v;
    for (double v : c.b) sb += v;
    if (!(sa > 0) || !(sb > 0)) {
        throw DesignFailure("factorization produced non-positive coefficient sums");
    }
    std::vector<double> a = c.a, b = c.b;
    for (double &v : a) v /= sa;
    for (double &v : b) v /= sb;
    return SplitCoefficients(std::move(a), std::move(b));
}

MethodRecord base_record(int m, double theta, SplitCoefficients coeffs, MethodErrorProfile prof) {
    MethodRecord r;
    r.gamma = theta / m;
    r.name = "D" + std::to_string(m) + "_" + gamma_label(r.gamma);
    r.m = m;
    r.theta_max = theta;
    r.profile = prof;
    r.coefficients = std::move(coeffs);
    r.certified = true;
    return r;
}

Trial try_design(int m, double theta, int l, const DesignOptions &opts) {
    Trial t;
    t.attempt.l = l;
    try {
        DesignProblem problem = make_design_problem(m, theta, l);
        StabilizeResult st = stabilize_nodes(problem, opts.phase);
        if (!st.phase.converged) {
            std::ostringstream msg;
            msg << "phase optimization did not converge (residual " << st.phase.residual << ")";
            throw DesignFailure(msg.str());
        }
        if (theta >= std::numbers::pi && !st.converged) {
            throw DesignFailure("node stabilization did not converge");
        }
        ValidationReport v = validate_candidate(st.phase.candidate, m, theta);
        if (!v.v_nonnegative || !v.stable) {
            throw DesignFailure("validation failed: " + v.message);
        }
        FactorizationReport fr;
        SplitCoefficients coeffs = make_consistent(split_factorization(st.phase.candidate, m, &fr));
        MethodErrorProfile prof = error_profile(coeffs, theta);
        if (!prof.has_mu_nu || prof.y_star < theta * (1 - 1e-9)) {
            std::ostringstream msg;
            msg << "stability threshold " << prof.y_star << " below theta";
            throw DesignFailure(msg.str());
        }
        MethodRecord r = base_record(m, theta, coeffs, prof);
        nlohmann::json pj;
        pj["l"] = l;
        pj["nodes"] = st.problem.nodes;
        pj["e_norm"] = st.phase.e.norm();
        pj["residuals"] = {{"phase", st.phase.residual},
                           {"deflation", v.deflation_residual},
                           {"roundtrip", fr.roundtrip_error}};
        r.provenance = pj.dump();
        t.record = r;
        t.attempt.ok = true;
        t.attempt.eps = prof.eps;
    } catch (const std::exception &ex) {
        t.attempt.ok = false;
        t.attempt.message = ex.what();
    }
    return t;
}

}  // namespace

DesignResult design_method(int m, double theta, const DesignOptions &opts) {
    if (m < 1) {
        throw InvalidInput("design: m must be at least 1");
    }
    if (!(theta > 0) || !std::isfinite(theta)) {
        throw InvalidInput("design: theta must be positive and finite");
    }
    if (theta >= 2.0 * m) {
        throw InvalidInput("design: theta must be below 2m for a stable method of size m");
    }
    std::vector<int> ls = opts.l_values.empty() ? l_candidates(m, opts.l_window) : opts.l_values;
    std::sort(ls.begin(), ls.end());
    std::vector<std::future<Trial>> jobs;
    for (int l : ls) {
        jobs.push_back(std::async(std::launch::async, try_design, m, theta, l, opts));
    }
    DesignResult out;
    std::optional<MethodRecord> best;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        Trial t = jobs[i].get();
        out.attempts.push_back(t.attempt);
        if (t.record && (!best || t.record->profile.eps < best->profile.eps)) {
            best = t.record;
            out.l = ls[i];
        }
    }
    if (!best) {
        std::ostringstream msg;
        msg << "design failed for m = " << m << ", theta = " << theta << ":";
        for (const auto &a : out.attempts) msg << "\n  l = " << a.l << ": " << a.message;
        throw DesignFailure(msg.str());
    }
    out.record = *best;
    return out;
}

}  // namespace splitprop
