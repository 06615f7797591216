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


#include "cli/bench.hpp"

#include <cfloat>
#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"
#include "splitprop/analysis.hpp"
#include "splitprop/hamiltonians.hpp"
#include "splitprop/propagators.hpp"

namespace splitprop::cli {

WaveState reference_solution(const LinearHamiltonian &h, double t, const WaveState &u0) {
    const std::size_t n = h.dim();
    if (u0.size() != n) throw InvalidInput("reference_solution: state size mismatch");
    if (t == 0) return u0;
    if (n > 512) {
        const double theta = spectral_shift(h).beta * t;
        return chebyshev_propagate(h, t, min_degree(BoundKind::Chebyshev, theta, 1e-14), u0).state;
    }
    Eigen::MatrixXd a(n, n);
    std::vector<double> e(n, 0.0), col(n);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        h.apply(e, col);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
    }
    a = (a + a.transpose()).eval() / 2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::MatrixXd &v = es.eigenvectors();
    Eigen::Map<const Eigen::VectorXd> q(u0.q.data(), n), p(u0.p.data(), n);
    Eigen::VectorXd cq = v.transpose() * q, cp = v.transpose() * p;
    for (std::size_t k = 0; k < n; ++k) {
        const double c = std::cos(es.eigenvalues()[k] * t), s = std::sin(es.eigenvalues()[k] * t);
        const double rq = c * cq[k] + s * cp[k], rp = c * cp[k] - s * cq[k];
        cq[k] = rq;
        cp[k] = rp;
    }
    Eigen::VectorXd oq = v * cq, op = v * cp;
    return WaveState(std::vector<double>(oq.data(), oq.data() + n), std::vector<double>(op.data(), op.data() + n));
}

double energy(const LinearHamiltonian &h, const WaveState &u) {
    return inner_real(u.q, h.apply(u.q)) + inner_real(u.p, h.apply(u.p));
}

double chebyshev_rounding(double theta, int m) {
    std::vector<double> j = bessel_j_sequence(m, theta);
    double sum = std::abs(j[0]);
    for (int k = 1; k <= m; ++k) sum += 2 * std::abs(j[k]);
    return (2 * m + 1) * DBL_EPSILON * sum;
}

double taylor_rounding(double theta, int m, int steps) {
    const double h = theta / steps;
    double term = 1, sum = 1;
    for (int k = 1; k <= m; ++k) {
        term *= h / k;
        sum += term;
    }
    return steps * (2 * m + 1) * DBL_EPSILON * sum;
}

double splitting_rounding(const SplitCoefficients &c, double theta_step, int steps) {
    double l1 = 0;
    for (double v : c.a) l1 += std::abs(v);
    for (double v : c.b) l1 += std::abs(v);
    return steps * (2.0 * c.b.size() + 1) * DBL_EPSILON * (1 + l1 * theta_step);
}

namespace {

Example1Row measure(const std::string &method, int m, int steps, double t, const PropagationResult &r,
                    const WaveState &exact) {
    Example1Row row;
    row.method = method;
    row.m = m;
    row.steps = steps;
    row.t = t;
    row.products = r.report.products_real;
    row.error = distance(r.state, exact);
    row.unitarity_error = std::abs(r.state.norm() - 1.0);
    row.bound = r.report.bound;
    return row;
}

std::vector<int> default_sweep() {
    std::vector<int> v;
    for (int m = 20; m <= 60; m += 2) v.push_back(m);
    return v;
}

}  // namespace

std::vector<Example1Row> run_example1(const Example1Options &opts) {
    TridiagonalLaplacian h(opts.n);
    const WaveState u0 = random_unit_state(opts.n, opts.seed);
    const double beta = spectral_shift(h).beta;
    const double e0 = energy(h, u0);
    const WaveState exact = reference_solution(h, opts.t, u0);

    auto finish = [&](Example1Row row, const PropagationResult &r) {
        const double e = energy(h, r.state);
        row.energy_error = e0 != 0 ? std::abs(e - e0) / std::abs(e0) : std::abs(e - e0);
        return row;
    };

    std::vector<std::future<Example1Row>> jobs;
    const std::vector<int> tm = opts.taylor_m.empty() ? default_sweep() : opts.taylor_m;
    const std::vector<int> cm = opts.chebyshev_m.empty() ? default_sweep() : opts.chebyshev_m;
    for (int m : tm) {
        jobs.push_back(std::async(std::launch::async, [&, m] {
            PropagationResult r = taylor_propagate(h, opts.t, m, u0);
            int s = default_taylor_substeps(beta * opts.t, m);
            Example1Row row = finish(measure("taylor", m, s, opts.t, r, exact), r);
            row.rounding = taylor_rounding(beta * opts.t, m, s);
            return row;
        }));
    }
    for (int m : cm) {
        jobs.push_back(std::async(std::launch::async, [&, m] {
            PropagationResult r = chebyshev_propagate(h, opts.t, m, u0);
            Example1Row row = finish(measure("chebyshev", m, 1, opts.t, r, exact), r);
            if (!(m > beta * opts.t)) row.bound = -1;
            row.rounding = chebyshev_rounding(beta * opts.t, m);
            return row;
        }));
    }
    for (const MethodRecord &rec : opts.splitting) {
        if (!rec.coefficients || !(rec.theta_max > 0)) {
            throw InvalidInput("example1: splitting record " + rec.name + " needs coefficients and theta_max");
        }
        jobs.push_back(std::async(std::launch::async, [&] {
            const double theta = beta * opts.t;
            const int n = std::max(1, static_cast<int>(std::ceil(theta / rec.theta_max - 1e-12)));
            PropagationPlan plan;
            plan.shift = spectral_shift(h);
            plan.total_time = opts.t;
            plan.stages.push_back({rec.name, *rec.coefficients, opts.t / n, n, rec.theta_max});
            plan.bound = n == 1 ? rec.profile.eps : nstep_bound(rec.profile, n);
            PropagationResult r = execute_plan(plan, h, u0);
            Example1Row row = finish(measure(rec.name, static_cast<int>(rec.m), n, opts.t, r, exact), r);
            row.rounding = splitting_rounding(*rec.coefficients, theta / n, n);
            return row;
        }));
        jobs.push_back(std::async(std::launch::async, [&] {
            const double t1 = rec.theta_max / beta;
            PropagationPlan plan;
            plan.shift = spectral_shift(h);
            plan.total_time = t1;
            plan.stages.push_back({rec.name, *rec.coefficients, t1, 1, rec.theta_max});
            plan.bound = rec.profile.eps;
            PropagationResult r = execute_plan(plan, h, u0);
            WaveState ex1 = reference_solution(h, t1, u0);
            Example1Row row = finish(measure(rec.name + "@single", static_cast<int>(rec.m), 1, t1, r, ex1), r);
            row.rounding = splitting_rounding(*rec.coefficients, rec.theta_max, 1);
            return row;
        }));
    }
    std::vector<Example1Row> rows;
    for (auto &j : jobs) rows.push_back(j.get());
    return rows;
}

std::string example1_csv(const std::vector<Example1Row> &rows, std::uint64_t seed) {
    std::ostringstream out;
    out << std::setprecision(10);
    out << "# seed=" << seed << "\n";
    out << "method,m,steps,t,products,error,energy_error,unitarity_error,bound,rounding\n";
    for (const auto &r : rows) {
        out << r.method << ',' << r.m << ',' << r.steps << ',' << r.t << ',' << r.products << ',' << r.error << ','
            << r.energy_error << ',' << r.unitarity_error << ',';
        if (r.bound >= 0) out << r.bound;
        out << ',' << r.rounding << '\n';
    }
    return out.str();
}

Example2Report run_example2(std::size_t n, double t, double tol, const Catalog &catalog, int taylor_substeps) {
    if (n < 64 || n > 1024 || (n & (n - 1)) != 0) {
        throw InvalidInput("example2: N must be one of 64, 128, 256, 512, 1024");
    }
    if (!(t >= 0) || !(tol > 0)) throw InvalidInput("example2: need t >= 0 and tol > 0");
    Example2Report rep;
    rep.n = n;
    rep.t = t;
    rep.tol = tol;
    const FourierCollocation1D h = FourierCollocation1D::poschl_teller(n, rep.length, PoschlTellerPotential{});
    std::tie(rep.e_min, rep.e_max) = spectral_bounds(h);
    const SpectralShift shift = spectral_shift(h);
    rep.alpha = shift.alpha;
    rep.beta = shift.beta;
    rep.t_beta = shift.beta * t;
    const WaveState u0 = gaussian_state(h);
    const WaveState exact = reference_solution(h, t, u0);

    {
        Example2Row row;
        row.method = "taylor";
        // Substeps keep the largest Taylor term, about exp(theta / s), below tol / eps.
        int s = taylor_substeps;
        if (s <= 0) {
            s = std::max(1, static_cast<int>(std::ceil(rep.t_beta / std::log(tol / DBL_EPSILON))));
        }
        const int per = min_degree(BoundKind::Taylor, rep.t_beta / s, tol / s);
        row.degree_equivalent = static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(per);
        PropagationResult r = taylor_propagate(h, t, per, u0, s);
        row.ran = true;
        row.products = r.report.products_real;
        row.error = distance(r.state, exact);
        row.bound = r.report.bound;
        row.note = std::to_string(s) + " substeps of degree " + std::to_string(per);
        rep.rows.push_back(row);
    }
    {
        Example2Row row;
        row.method = "chebyshev";
        const int m = min_degree(BoundKind::Chebyshev, rep.t_beta, tol);
        row.degree_equivalent = static_cast<std::uint64_t>(m);
        PropagationResult r = chebyshev_propagate(h, t, m, u0);
        row.ran = true;
        row.products = r.report.products_real;
        row.error = distance(r.state, exact);
        row.bound = r.report.bound;
        rep.rows.push_back(row);
    }
    {
        Example2Row row;
        SelectionPlan plan = select_method(rep.t_beta, tol, catalog);
        row.method = "splitting";
        row.degree_equivalent = plan.cost_degree_equivalent;
        row.bound = plan.certified_bound;
        std::ostringstream note;
        if (plan.head) note << plan.head->n << "x" << plan.head->name;
        if (plan.tail) note << (plan.head ? " + " : "") << plan.tail->name;
        if (!plan.tolerance_met) note << " (tolerance not met)";
        try {
            PropagationPlan pp = to_propagation_plan(plan, catalog, shift, t);
            PropagationResult r = execute_plan(pp, h, u0);
            row.ran = true;
            row.products = r.report.products_real;
            row.error = distance(r.state, exact);
        } catch (const InvalidInput &e) {
            note << "; not run: " << e.what();
        }
        row.note = note.str();
        rep.rows.push_back(row);
    }
    return rep;
}

std::string to_json(const Example2Report &r) {
    nlohmann::json j;
    j["N"] = r.n;
    j["L"] = r.length;
    j["e_min"] = r.e_min;
    j["e_max"] = r.e_max;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["t"] = r.t;
    j["t_beta"] = r.t_beta;
    j["tol"] = r.tol;
    j["rows"] = nlohmann::json::array();
    for (const auto &row : r.rows) {
        nlohmann::json x = {{"method", row.method},   {"degree_equivalent", row.degree_equivalent},
                            {"ran", row.ran},         {"products_real", row.products},
                            {"note", row.note}};
        x["error"] = row.ran ? nlohmann::json(row.error) : nlohmann::json(nullptr);
        x["bound"] = row.bound >= 0 ? nlohmann::json(row.bound) : nlohmann::json(nullptr);
        j["rows"].push_back(x);
    }
    return j.dump(2);
}

std::vector<DegreeRow> degree_curves(const std::vector<double> &tolerances, const std::vector<double> &thetas,
                                     const Catalog &catalog) {
    std::vector<DegreeRow> rows;
    for (double tol : tolerances) {
        for (double theta : thetas) {
            DegreeRow r;
            r.theta = theta;
            r.tol = tol;
            r.m_taylor = min_degree(BoundKind::Taylor, theta, tol);
            r.m_chebyshev = min_degree(BoundKind::Chebyshev, theta, tol);
            SelectionPlan plan = select_method(theta, tol, catalog);
            r.splitting = plan.tolerance_met ? plan.cost_degree_equivalent : 0;
            rows.push_back(r);
        }
    }
    return rows;
}

std::string degree_csv(const std::vector<DegreeRow> &rows) {
    std::ostringstream out;
    out << std::setprecision(10);
    out << "theta,tol,m_taylor,m_chebyshev,splitting\n";
    for (const auto &r : rows) {
        out << r.theta << ',' << r.tol << ',' << r.m_taylor << ',' << r.m_chebyshev << ',' << r.splitting << '\n';
    }
    return out.str();
}

}  // namespace splitprop::cli
