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

#include "splitprop/propagators.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "splitprop/analysis.hpp"

namespace splitprop {

SplitCoefficients::SplitCoefficients(std::vector<double> a_, std::vector<double> b_)
    : a(std::move(a_)), b(std::move(b_)) {
    if (a.size() != b.size() + 1) {
        throw InvalidInput("SplitCoefficients: need len(a) = len(b) + 1");
    }
}

bool SplitCoefficients::is_consistent(double tol) const {
    if (a.size() != b.size() + 1 || b.empty()) {
        return false;
    }
    double sa = 0, sb = 0;
    for (double x : a) sa += x;
    for (double x : b) sb += x;
    return std::abs(sa - 1) <= tol && std::abs(sb - 1) <= tol;
}

namespace {

void check_state(const ShiftedOperator &op, const WaveState &u) {
    if (u.size() != op.dim() || u.q.size() != u.p.size()) {
        throw InvalidInput("state size " + std::to_string(u.size()) + " does not match operator dimension " +
                           std::to_string(op.dim()));
    }
}

}  // namespace

WaveState taylor_apply(const ShiftedOperator &op, double t, int m, const WaveState &u0) {
    check_state(op, u0);
    if (m < 0) {
        throw InvalidInput("taylor_apply: degree must be non-negative");
    }
    const std::size_t n = u0.size();
    WaveState y = u0;
    WaveState hy(n);
    // y_k = u0 - i t/(m+1-k) H y_{k-1}
    for (int k = 1; k <= m; ++k) {
        double c = t / static_cast<double>(m + 1 - k);
        op.apply(y.q, hy.q);
        op.apply(y.p, hy.p);
        for (std::size_t i = 0; i < n; ++i) {
            y.q[i] = u0.q[i] + c * hy.p[i];
            y.p[i] = u0.p[i] - c * hy.q[i];
        }
    }
    return y;
}

WaveState chebyshev_apply(const ShiftedOperator &op, double beta, double t, int m, const WaveState &u0) {
    check_state(op, u0);
    if (m < 1) {
        throw InvalidInput("chebyshev_apply: degree must be at least 1");
    }
    if (t < 0 || beta < 0) {
        throw InvalidInput("chebyshev_apply: need t >= 0 and beta >= 0");
    }
    const double theta = beta * t;
    if (theta == 0.0) {
        return u0;
    }
    const std::size_t n = u0.size();
    std::vector<double> jk = bessel_j_sequence(m, theta);

    // Coefficient c_k = 2 (-i)^k J_k times u0, as a (re, im) pair.
    auto add_coef_times_u0 = [&](int k, WaveState &dst) {
        double w = (k == 0 ? 1.0 : 2.0) * jk[k];
        switch (k % 4) {
            case 0:
                for (std::size_t i = 0; i < n; ++i) dst.q[i] += w * u0.q[i], dst.p[i] += w * u0.p[i];
                break;
            case 1:  // -i
                for (std::size_t i = 0; i < n; ++i) dst.q[i] += w * u0.p[i], dst.p[i] -= w * u0.q[i];
                break;
            case 2:
                for (std::size_t i = 0; i < n; ++i) dst.q[i] -= w * u0.q[i], dst.p[i] -= w * u0.p[i];
                break;
            default:  // +i
                for (std::size_t i = 0; i < n; ++i) dst.q[i] -= w * u0.p[i], dst.p[i] += w * u0.q[i];
                break;
        }
    };

    const double inv_beta = 1.0 / beta;
    WaveState b1(n), b2(n), xb(n);
    // b_k = c_k u0 + 2 X b_{k+1} - b_{k+2},  X = H / beta
    for (int k = m; k >= 1; --k) {
        WaveState next(n);
        if (k < m) {
            op.apply(b1.q, xb.q);
            op.apply(b1.p, xb.p);
            for (std::size_t i = 0; i < n; ++i) {
                next.q[i] = 2 * inv_beta * xb.q[i] - b2.q[i];
                next.p[i] = 2 * inv_beta * xb.p[i] - b2.p[i];
            }
        }
        add_coef_times_u0(k, next);
        b2 = std::move(b1);
        b1 = std::move(next);
    }
    // c_0 u0 + X b_1 - b_2
    op.apply(b1.q, xb.q);
    op.apply(b1.p, xb.p);
    WaveState out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.q[i] = inv_beta * xb.q[i] - b2.q[i];
        out.p[i] = inv_beta * xb.p[i] - b2.p[i];
    }
    add_coef_times_u0(0, out);
    return out;
}

void splitting_step_inplace(const ShiftedOperator &op, double tau, const SplitCoefficients &c, WaveState &state,
                            std::vector<double> &scratch) {
    check_state(op, state);
    if (c.a.size() != c.b.size() + 1) {
        throw InvalidInput("splitting_step: malformed coefficient sequence");
    }
    const std::size_t n = state.size();
    scratch.resize(n);
    auto &q = state.q;
    auto &p = state.p;
    const std::size_t m = c.b.size();
    for (std::size_t k = 0; k < m; ++k) {
        op.apply(p, scratch);
        double ak = c.a[k] * tau;
        for (std::size_t i = 0; i < n; ++i) q[i] += ak * scratch[i];
        op.apply(q, scratch);
        double bk = c.b[k] * tau;
        for (std::size_t i = 0; i < n; ++i) p[i] -= bk * scratch[i];
    }
    op.apply(p, scratch);
    double am = c.a[m] * tau;
    for (std::size_t i = 0; i < n; ++i) q[i] += am * scratch[i];
}

WaveState splitting_step(const ShiftedOperator &op, double tau, const SplitCoefficients &c, const WaveState &state) {
    WaveState out = state;
    std::vector<double> scratch;
    splitting_step_inplace(op, tau, c, out, scratch);
    return out;
}

std::string to_json(const RunReport &report) {
    nlohmann::json j;
    j["method"] = report.method;
    j["products_real"] = report.products_real;
    j["degree_equivalent"] = report.degree_equivalent;
    if (report.bound >= 0) {
        j["bound"] = report.bound;
    } else {
        j["bound"] = nullptr;
    }
    j["wall_time_s"] = report.wall_time_s;
    if (!report.warnings.empty()) {
        j["warnings"] = report.warnings;
    }
    return j.dump(2);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

PropagationResult execute_plan(const PropagationPlan &plan, const LinearHamiltonian &h, const WaveState &u0) {
    if (u0.size() != h.dim()) {
        throw InvalidInput("execute_plan: state size does not match the Hamiltonian");
    }
    double covered = 0.0;
    for (const auto &st : plan.stages) {
        if (st.count < 1) {
            throw InvalidInput("execute_plan: stage '" + st.name + "' has non-positive count");
        }
        if (st.coefficients.b.empty() || st.coefficients.a.size() != st.coefficients.b.size() + 1) {
            throw InvalidInput("execute_plan: stage '" + st.name + "' has no usable coefficients");
        }
        covered += st.tau * st.count;
    }
    // A plan without stages is a pure phase rotation, valid for any total_time.
    if (!plan.stages.empty() &&
        std::abs(covered - plan.total_time) > 1e-12 * std::max(1.0, std::abs(plan.total_time))) {
        throw InvalidInput("execute_plan: stage durations do not add up to total_time");
    }

    auto start = Clock::now();
    PropagationResult res{u0, {}};
    res.report.method = plan.method;
    res.report.bound = plan.bound;
    ShiftedOperator op(h, plan.shift);
    std::vector<double> scratch;
    for (const auto &st : plan.stages) {
        double step_theta = std::abs(st.tau) * plan.shift.beta;
        if (st.theta_max > 0 && step_theta > st.theta_max * (1 + 1e-12)) {
            std::ostringstream msg;
            msg << "stage '" << st.name << "': step tau*beta = " << step_theta << " exceeds theta_max = "
                << st.theta_max << "; bound not certified";
            res.report.warnings.push_back(msg.str());
        }
        for (int i = 0; i < st.count; ++i) {
            splitting_step_inplace(op, st.tau, st.coefficients, res.state, scratch);
        }
        res.report.degree_equivalent += static_cast<std::uint64_t>(st.count) * st.coefficients.stages();
    }
    res.state = restore_phase(res.state, plan.shift.alpha, plan.total_time);
    res.report.products_real = op.products();
    res.report.wall_time_s = seconds_since(start);
    return res;
}

int default_taylor_substeps(double theta, int m) {
    if (m <= 0) {
        return 1;
    }
    double s = std::ceil(std::numbers::e * std::abs(theta) / m);
    return std::max(1, static_cast<int>(s));
}

PropagationResult taylor_propagate(const LinearHamiltonian &h, double t, int m, const WaveState &u0, int substeps) {
    auto shift = spectral_shift(h);
    double theta = std::abs(t) * shift.beta;
    if (substeps <= 0) {
        substeps = default_taylor_substeps(theta, m);
    }
    auto start = Clock::now();
    ShiftedOperator op(h, shift);
    double dt = t / substeps;
    WaveState u = u0;
    for (int s = 0; s < substeps; ++s) {
        u = taylor_apply(op, dt, m, u);
    }
    PropagationResult res{restore_phase(u, shift.alpha, t), {}};
    res.report.method = "taylor";
    res.report.products_real = op.products();
    res.report.degree_equivalent = static_cast<std::uint64_t>(m) * substeps;
    res.report.bound = substeps * taylor_bound(m, theta / substeps);
    res.report.wall_time_s = seconds_since(start);
    return res;
}

PropagationResult chebyshev_propagate(const LinearHamiltonian &h, double t, int m, const WaveState &u0) {
    auto shift = spectral_shift(h);
    auto start = Clock::now();
    ShiftedOperator op(h, shift);
    WaveState u = chebyshev_apply(op, shift.beta, t, m, u0);
    PropagationResult res{restore_phase(u, shift.alpha, t), {}};
    res.report.method = "chebyshev";
    res.report.products_real = op.products();
    res.report.degree_equivalent = static_cast<std::uint64_t>(m);
    double theta = t * shift.beta;
    if (m > theta) {
        res.report.bound = chebyshev_bound(m, theta);
    } else {
        res.report.warnings.push_back("degree does not exceed beta*t; Chebyshev bound not valid");
    }
    res.report.wall_time_s = seconds_since(start);
    return res;
}

}  // namespace splitprop
