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


#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "splitprop/analysis.hpp"

namespace splitprop::cli {

using nlohmann::json;

namespace {

const json &single_entry(const json &j, const char *what) {
    if (!j.is_object() || j.size() != 1) {
        throw InvalidInput(std::string("config: '") + what + "' needs exactly one entry");
    }
    return j;
}

ProblemConfig parse_problem(const json &j) {
    single_entry(j, "problem");
    ProblemConfig p;
    if (j.contains("tridiagonal")) {
        const json &t = j.at("tridiagonal");
        p.kind = ProblemConfig::Kind::Tridiagonal;
        p.n = t.value("n", std::size_t{100});
        if (p.n < 1) throw InvalidInput("config: tridiagonal n must be positive");
        return p;
    }
    if (j.contains("fourier1d")) {
        const json &f = j.at("fourier1d");
        p.kind = ProblemConfig::Kind::Fourier1D;
        p.n = f.value("N", std::size_t{128});
        p.length = f.value("L", 10.0);
        p.pot.mass = f.value("mass", 1745.0);
        if (p.n < 2 || p.n % 2 != 0) throw InvalidInput("config: fourier1d N must be even and >= 2");
        if (!(p.length > 0) || !(p.pot.mass > 0)) throw InvalidInput("config: L and mass must be positive");
        if (f.contains("potential")) {
            const json &v = single_entry(f.at("potential"), "potential");
            if (v.contains("poschl_teller")) {
                p.pot.a = v.at("poschl_teller").value("a", 2.0);
                p.pot.lambda = v.at("poschl_teller").value("lambda", 24.5);
            } else if (v.contains("csv")) {
                p.potential_csv = v.at("csv").get<std::string>();
            } else {
                throw InvalidInput("config: unknown potential " + v.begin().key());
            }
        }
        return p;
    }
    throw InvalidInput("config: unknown problem " + j.begin().key());
}

MethodConfig parse_method(const json &j) {
    MethodConfig m;
    if (j.is_string()) {
        if (j.get<std::string>() != "auto") throw InvalidInput("config: method string must be 'auto'");
        return m;
    }
    single_entry(j, "method");
    const std::string key = j.begin().key();
    const json &v = j.begin().value();
    if (key == "auto") return m;
    if (key == "taylor" || key == "chebyshev") {
        m.kind = key == "taylor" ? MethodConfig::Kind::Taylor : MethodConfig::Kind::Chebyshev;
        m.m = v.at("m").get<int>();
        m.substeps = v.value("substeps", 0);
        if (m.m < 1) throw InvalidInput("config: method degree must be positive");
        return m;
    }
    if (key == "splitting") {
        m.kind = MethodConfig::Kind::Splitting;
        m.name = v.at("name").get<std::string>();
        return m;
    }
    throw InvalidInput("config: unknown method " + key);
}

}  // namespace

RunConfig parse_run_config(const std::string &json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception &e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
    try {
        RunConfig c;
        if (!j.contains("problem")) throw InvalidInput("config: missing 'problem'");
        c.problem = parse_problem(j.at("problem"));
        if (j.contains("method")) c.method = parse_method(j.at("method"));
        c.t = j.value("t", c.t);
        c.tol = j.value("tol", c.tol);
        c.seed = j.value("seed", c.seed);
        if (j.contains("initial")) {
            const json &i = j.at("initial");
            c.initial = i.is_object() ? i.at("file").get<std::string>() : i.get<std::string>();
        }
        c.catalog_path = j.value("catalog", std::string());
        c.heads_all = j.value("heads_all", false);
        if (j.contains("output")) {
            c.output_state = j.at("output").value("state", std::string());
            c.output_report = j.at("output").value("report", std::string());
        }
        if (!std::isfinite(c.t) || c.t < 0) throw InvalidInput("config: t must be finite and non-negative");
        if (!(c.tol > 0)) throw InvalidInput("config: tol must be positive");
        return c;
    } catch (const json::exception &e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
}

RunConfig load_run_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string to_json(const RunConfig &c) {
    json j;
    if (c.problem.kind == ProblemConfig::Kind::Tridiagonal) {
        j["problem"]["tridiagonal"] = {{"n", c.problem.n}};
    } else {
        json f = {{"N", c.problem.n}, {"L", c.problem.length}, {"mass", c.problem.pot.mass}};
        if (c.problem.potential_csv.empty()) {
            f["potential"]["poschl_teller"] = {{"a", c.problem.pot.a}, {"lambda", c.problem.pot.lambda}};
        } else {
            f["potential"]["csv"] = c.problem.potential_csv;
        }
        j["problem"]["fourier1d"] = f;
    }
    switch (c.method.kind) {
        case MethodConfig::Kind::Auto:
            j["method"] = "auto";
            break;
        case MethodConfig::Kind::Taylor:
            j["method"]["taylor"] = {{"m", c.method.m}, {"substeps", c.method.substeps}};
            break;
        case MethodConfig::Kind::Chebyshev:
            j["method"]["chebyshev"] = {{"m", c.method.m}};
            break;
        case MethodConfig::Kind::Splitting:
            j["method"]["splitting"] = {{"name", c.method.name}};
            break;
    }
    j["t"] = c.t;
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    j["initial"] = c.initial;
    if (!c.catalog_path.empty()) j["catalog"] = c.catalog_path;
    j["heads_all"] = c.heads_all;
    if (!c.output_state.empty()) j["output"]["state"] = c.output_state;
    if (!c.output_report.empty()) j["output"]["report"] = c.output_report;
    return j.dump(2);
}

std::unique_ptr<LinearHamiltonian> build_hamiltonian(const ProblemConfig &p) {
    if (p.kind == ProblemConfig::Kind::Tridiagonal) {
        return std::make_unique<TridiagonalLaplacian>(p.n);
    }
    if (p.potential_csv.empty()) {
        return std::make_unique<FourierCollocation1D>(FourierCollocation1D::poschl_teller(p.n, p.length, p.pot));
    }
    return std::make_unique<FourierCollocation1D>(p.n, p.length, p.pot.mass,
                                                  load_potential_csv(p.potential_csv, p.n, p.length));
}

WaveState initial_state(const RunConfig &c, const LinearHamiltonian &h) {
    if (c.initial == "random") return random_unit_state(h.dim(), c.seed);
    if (c.initial == "gaussian") {
        const auto *f = dynamic_cast<const FourierCollocation1D *>(&h);
        if (f == nullptr) throw InvalidInput("gaussian initial state needs a fourier1d problem");
        return gaussian_state(*f);
    }
    WaveState u = load_state(c.initial);
    if (u.size() != h.dim()) throw InvalidInput("initial state size does not match the problem");
    return u;
}

Catalog resolve_catalog(const std::string &path) {
    Catalog c = bundled_catalog().catalog;
    if (!path.empty()) c = merge_catalogs(c, load_catalog(path).catalog);
    return c;
}

namespace {

bool has_payloads(const SelectionPlan &plan, const Catalog &catalog) {
    for (const auto *p : {plan.head ? &*plan.head : nullptr, plan.tail ? &*plan.tail : nullptr}) {
        if (p == nullptr) continue;
        const MethodRecord *r = catalog.find(p->name);
        if (r == nullptr || !r->coefficients) return false;
    }
    return true;
}

}  // namespace

PropagateOutcome run_propagate(const RunConfig &c, const Catalog &catalog) {
    auto h = build_hamiltonian(c.problem);
    WaveState u0 = initial_state(c, *h);
    const SpectralShift shift = spectral_shift(*h);
    const double theta = shift.beta * c.t;
    PropagateOutcome out;

    switch (c.method.kind) {
        case MethodConfig::Kind::Taylor:
            out.result = taylor_propagate(*h, c.t, c.method.m, u0, c.method.substeps);
            break;
        case MethodConfig::Kind::Chebyshev:
            out.result = chebyshev_propagate(*h, c.t, c.method.m, u0);
            break;
        case MethodConfig::Kind::Splitting: {
            const MethodRecord *r = catalog.find(c.method.name);
            if (r == nullptr) throw InvalidInput("unknown method " + c.method.name);
            if (!r->coefficients) throw InvalidInput("method " + c.method.name + " has no coefficients");
            int n = 1;
            if (r->theta_max > 0 && theta > r->theta_max) n = static_cast<int>(std::ceil(theta / r->theta_max));
            PropagationPlan plan;
            plan.shift = shift;
            plan.total_time = c.t;
            plan.method = "splitting:" + std::to_string(n) + "x" + r->name;
            plan.stages.push_back({r->name, *r->coefficients, c.t / n, n, r->theta_max});
            if (r->certified) plan.bound = n == 1 ? r->profile.eps : nstep_bound(r->profile, n);
            out.result = execute_plan(plan, *h, u0);
            break;
        }
        case MethodConfig::Kind::Auto: {
            SelectOptions so;
            so.heads_all = c.heads_all;
            SelectionPlan sel = select_method(theta, c.tol, catalog, so);
            out.plan_json = to_json(sel);
            if (has_payloads(sel, catalog)) {
                out.result = execute_plan(to_propagation_plan(sel, catalog, shift, c.t), *h, u0);
                out.tolerance_met = sel.tolerance_met;
            } else {
                int m = min_degree(BoundKind::Chebyshev, theta, c.tol);
                out.result = chebyshev_propagate(*h, c.t, m, u0);
                out.result.report.warnings.push_back(
                    "selected splitting plan has no coefficients in the catalog; ran Chebyshev of degree " +
                    std::to_string(m));
            }
            break;
        }
    }
    const double bound = out.result.report.bound;
    if (c.method.kind != MethodConfig::Kind::Auto || out.tolerance_met) {
        out.tolerance_met = bound >= 0 && bound <= c.tol;
    }
    if (!c.output_state.empty()) save_state(c.output_state, out.result.state);
    if (!c.output_report.empty()) {
        std::ofstream f(c.output_report);
        if (!f) throw InvalidInput("cannot write " + c.output_report);
        f << to_json(out.result.report) << "\n";
    }
    return out;
}

}  // namespace splitprop::cli
