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


#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli/bench.hpp"
#include "cli/config.hpp"
#include "json.hpp"
#include "splitprop/analysis.hpp"
#include "splitprop/catalog.hpp"
#include "splitprop/designer.hpp"

namespace sp = splitprop;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kToleranceNotMet = 2;
constexpr int kInvalidInput = 3;

void emit(const std::string &text, const std::string &path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) throw sp::InvalidInput("cannot write " + path);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string profile_json(const sp::MethodErrorProfile &p) {
    nlohmann::json j = {{"theta", p.theta_max}, {"y_star", p.y_star}, {"eps", p.eps}, {"delta", p.delta},
                        {"has_mu_nu", p.has_mu_nu}};
    j["mu"] = p.has_mu_nu ? nlohmann::json(p.mu) : nlohmann::json(nullptr);
    j["nu"] = p.has_mu_nu ? nlohmann::json(p.nu) : nlohmann::json(nullptr);
    return j.dump(2);
}

std::vector<int> int_range(int lo, int hi, int step) {
    std::vector<int> v;
    for (int m = lo; m <= hi; m += step) v.push_back(m);
    return v;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Propagation of exp(-i t H) u0 with splitting, Chebyshev and Taylor methods"};
    app.require_subcommand(1);

    std::string config_path, out_state, out_report;
    auto *propagate = app.add_subcommand("propagate", "Run a propagation described by a JSON config");
    propagate->add_option("--config,-c", config_path, "Run configuration")->required();
    propagate->add_option("--out-state", out_state, "Final state file (.csv or binary)");
    propagate->add_option("--report", out_report, "Run report JSON file");

    std::vector<double> coef_a, coef_b;
    std::string method_name, catalog_path, trace_path, out_path;
    double theta = 0;
    int points = 2001;
    auto *analyze = app.add_subcommand("analyze", "Error functionals of a splitting sequence");
    analyze->add_option("--a", coef_a, "a coefficients")->delimiter(',');
    analyze->add_option("--b", coef_b, "b coefficients")->delimiter(',');
    analyze->add_option("--method", method_name, "Catalog method with coefficients");
    analyze->add_option("--catalog", catalog_path, "Extra catalog file");
    analyze->add_option("--theta", theta, "Step size tau*beta")->required();
    analyze->add_option("--trace", trace_path, "CSV trace of (y, C, S, |K-O|, |K|)");
    analyze->add_option("--points", points, "Trace points")->check(CLI::PositiveNumber);
    analyze->add_option("-o,--output", out_path, "Profile JSON file");

    double t_beta = 0, tol = 0;
    bool heads_all = false;
    auto *select = app.add_subcommand("select", "Cheapest certified splitting plan");
    select->add_option("--tbeta", t_beta, "beta * t")->required();
    select->add_option("--tol", tol, "Error tolerance")->required();
    select->add_option("--catalog", catalog_path, "Extra catalog file");
    select->add_flag("--heads-all", heads_all, "Allow any record as composition head");

    int design_m = 0, l_window = 7, starts = 3;
    std::uint64_t seed = 12345;
    auto *design = app.add_subcommand("design", "Synthesize a splitting method");
    design->add_option("--m", design_m, "Stages")->required();
    design->add_option("--theta", theta, "Target step size")->required();
    design->add_option("--l-window", l_window, "Number of node counts tried");
    design->add_option("--starts", starts, "Optimizer starts per node count");
    design->add_option("--seed", seed, "Seed for the optimizer perturbations");
    design->add_option("-o,--output", out_path, "Catalog JSON file");

    auto *bench = app.add_subcommand("bench", "Benchmark tables");
    bench->require_subcommand(1);
    std::size_t n = 100;
    double t = 20;
    std::uint64_t bench_seed = 1;
    int m_lo = 20, m_hi = 60, m_step = 2;
    auto *ex1 = bench->add_subcommand("example1", "Tridiagonal matrix with a random start");
    ex1->add_option("--n", n, "Dimension");
    ex1->add_option("--t", t, "Final time");
    ex1->add_option("--seed", bench_seed, "Seed for the random start");
    ex1->add_option("--m-min", m_lo, "Smallest degree");
    ex1->add_option("--m-max", m_hi, "Largest degree");
    ex1->add_option("--m-step", m_step, "Degree increment")->check(CLI::PositiveNumber);
    ex1->add_option("--catalog", catalog_path, "Catalog whose certified methods with coefficients are run");
    ex1->add_option("-o,--output", out_path, "CSV file");

    int substeps = 0;
    auto *ex2 = bench->add_subcommand("example2", "Poschl-Teller well on a Fourier grid");
    ex2->add_option("--N", n, "Grid size")->required();
    ex2->add_option("--t", t, "Final time")->required();
    ex2->add_option("--tol", tol, "Error tolerance")->required();
    ex2->add_option("--taylor-substeps", substeps, "Taylor substeps, 0 for default");
    ex2->add_option("--catalog", catalog_path, "Extra catalog file");
    ex2->add_option("-o,--output", out_path, "JSON file");

    std::vector<double> tols{1e-4, 1e-8, 1e-12}, thetas{10, 30, 100, 300, 1000, 3000};
    auto *deg = bench->add_subcommand("degrees", "Minimum degree against theta");
    deg->add_option("--tols", tols, "Tolerances")->delimiter(',');
    deg->add_option("--thetas", thetas, "Step sizes beta*t")->delimiter(',');
    deg->add_option("--catalog", catalog_path, "Extra catalog file");
    deg->add_option("-o,--output", out_path, "CSV file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        if (*propagate) {
            sp::cli::RunConfig cfg = sp::cli::load_run_config(config_path);
            if (!out_state.empty()) cfg.output_state = out_state;
            if (!out_report.empty()) cfg.output_report = out_report;
            auto res = sp::cli::run_propagate(cfg, sp::cli::resolve_catalog(cfg.catalog_path));
            emit(sp::to_json(res.result.report), "");
            if (!res.plan_json.empty()) std::cerr << res.plan_json << '\n';
            return res.tolerance_met ? kOk : kToleranceNotMet;
        }
        if (*analyze) {
            sp::SplitCoefficients c;
            if (!method_name.empty()) {
                sp::Catalog cat = sp::cli::resolve_catalog(catalog_path);
                const sp::MethodRecord *r = cat.find(method_name);
                if (r == nullptr || !r->coefficients) throw sp::InvalidInput("no coefficients for " + method_name);
                c = *r->coefficients;
            } else {
                c = sp::SplitCoefficients(coef_a, coef_b);
            }
            if (c.a.empty() || c.a.size() != c.b.size() + 1) {
                throw sp::InvalidInput("analyze: need a with one more entry than b");
            }
            if (!(theta > 0)) throw sp::InvalidInput("analyze: theta must be positive");
            emit(profile_json(sp::error_profile(c, theta)), out_path);
            if (!trace_path.empty()) {
                std::ostringstream csv;
                csv << std::setprecision(12) << "y,C,S,err,knorm\n";
                for (const auto &row : sp::trace(sp::cs_source(c), theta, points)) {
                    csv << row.y << ',' << row.c << ',' << row.s << ',' << row.err << ',' << row.knorm << '\n';
                }
                emit(csv.str(), trace_path);
            }
            return kOk;
        }
        if (*select) {
            sp::SelectOptions so;
            so.heads_all = heads_all;
            auto plan = sp::select_method(t_beta, tol, sp::cli::resolve_catalog(catalog_path), so);
            emit(sp::to_json(plan), "");
            return plan.tolerance_met ? kOk : kToleranceNotMet;
        }
        if (*design) {
            sp::DesignOptions opts;
            opts.l_window = l_window;
            opts.phase.starts = starts;
            opts.phase.seed = seed;
            auto res = sp::design_method(design_m, theta, opts);
            for (const auto &a : res.attempts) {
                std::cerr << "l=" << a.l << (a.ok ? " ok eps=" + std::to_string(a.eps) : " rejected: " + a.message)
                          << '\n';
            }
            sp::Catalog one;
            one.records.push_back(res.record);
            emit(sp::catalog_to_json(one), out_path);
            return kOk;
        }
        if (*ex1) {
            sp::cli::Example1Options o;
            o.n = n;
            o.t = t;
            o.seed = bench_seed;
            o.taylor_m = o.chebyshev_m = int_range(m_lo, m_hi, m_step);
            if (!catalog_path.empty()) {
                for (const auto &r : sp::load_catalog(catalog_path).catalog.records) {
                    if (r.certified && r.coefficients && r.theta_max > 0) o.splitting.push_back(r);
                }
            }
            emit(sp::cli::example1_csv(sp::cli::run_example1(o), bench_seed), out_path);
            return kOk;
        }
        if (*ex2) {
            auto rep = sp::cli::run_example2(n, t, tol, sp::cli::resolve_catalog(catalog_path), substeps);
            emit(sp::cli::to_json(rep), out_path);
            return kOk;
        }
        if (*deg) {
            auto rows = sp::cli::degree_curves(tols, thetas, sp::cli::resolve_catalog(catalog_path));
            emit(sp::cli::degree_csv(rows), out_path);
            return kOk;
        }
    } catch (const sp::InvalidInput &e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const sp::OutOfStability &e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
