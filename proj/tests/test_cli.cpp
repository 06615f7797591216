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


#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cli/bench.hpp"
#include "cli/config.hpp"
#include "json.hpp"
#include "splitprop/analysis.hpp"
#include "splitprop/hamiltonians.hpp"

namespace sp = splitprop;
namespace cli = splitprop::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    fs::path p = fs::temp_directory_path() / ("splitprop_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
}

std::string write_file(const std::string &name, const std::string &text) {
    fs::path p = scratch_dir() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

#ifdef SPLITPROP_TOOL
int run_tool(const std::string &args) {
    std::string cmd = std::string(SPLITPROP_TOOL) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST(Config, ParsesTridiagonalTaylor) {
    auto c = cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 50}}, "t": 2.5, "tol": 1e-6,
                                      "method": {"taylor": {"m": 30, "substeps": 3}}, "seed": 9})");
    EXPECT_EQ(c.problem.kind, cli::ProblemConfig::Kind::Tridiagonal);
    EXPECT_EQ(c.problem.n, 50u);
    EXPECT_DOUBLE_EQ(c.t, 2.5);
    EXPECT_DOUBLE_EQ(c.tol, 1e-6);
    EXPECT_EQ(c.method.kind, cli::MethodConfig::Kind::Taylor);
    EXPECT_EQ(c.method.m, 30);
    EXPECT_EQ(c.method.substeps, 3);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.initial, "random");
}

TEST(Config, ParsesFourierProblem) {
    auto c = cli::parse_run_config(R"({"problem": {"fourier1d": {"N": 64, "L": 10, "mass": 1745,
                                      "potential": {"poschl_teller": {"a": 2, "lambda": 24.5}}}},
                                      "method": "auto", "initial": "gaussian"})");
    EXPECT_EQ(c.problem.kind, cli::ProblemConfig::Kind::Fourier1D);
    EXPECT_EQ(c.problem.n, 64u);
    EXPECT_EQ(c.method.kind, cli::MethodConfig::Kind::Auto);
    auto h = cli::build_hamiltonian(c.problem);
    EXPECT_EQ(h->dim(), 64u);
    auto u = cli::initial_state(c, *h);
    EXPECT_NEAR(u.norm(), 1.0, 1e-12);
}

TEST(Config, JsonRoundTrip) {
    auto c = cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 20}}, "t": 3,
                                      "method": {"splitting": {"name": "Strang_1"}},
                                      "output": {"state": "u.csv", "report": "r.json"}})");
    auto again = cli::parse_run_config(cli::to_json(c));
    EXPECT_EQ(cli::to_json(again), cli::to_json(c));
    EXPECT_EQ(again.method.name, "Strang_1");
    EXPECT_EQ(again.output_state, "u.csv");
    EXPECT_EQ(again.output_report, "r.json");
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW(cli::parse_run_config("{"), sp::InvalidInput);
    EXPECT_THROW(cli::parse_run_config(R"({"t": 1})"), sp::InvalidInput);
    EXPECT_THROW(cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 4}, "fourier1d": {"N": 8}}})"),
                 sp::InvalidInput);
    EXPECT_THROW(cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 4}},
                                         "method": {"taylor": {"m": 3}, "chebyshev": {"m": 3}}})"),
                 sp::InvalidInput);
    EXPECT_THROW(cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 4}}, "method": {"krylov": {"m": 3}}})"),
                 sp::InvalidInput);
    EXPECT_THROW(cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 4}}, "t": -1})"), sp::InvalidInput);
    EXPECT_THROW(cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 4}}, "tol": 0})"), sp::InvalidInput);
    EXPECT_THROW(cli::parse_run_config(R"({"problem": {"fourier1d": {"N": 7}}})"), sp::InvalidInput);
}

TEST(Propagate, ChebyshevWithinBound) {
    auto c = cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 40}}, "t": 5, "tol": 1e-8,
                                      "method": {"chebyshev": {"m": 30}}})");
    auto out = cli::run_propagate(c, cli::resolve_catalog(""));
    auto h = cli::build_hamiltonian(c.problem);
    auto ref = cli::reference_solution(*h, c.t, cli::initial_state(c, *h));
    const double err = sp::distance(out.result.state, ref);
    ASSERT_GE(out.result.report.bound, 0);
    EXPECT_LE(err, out.result.report.bound + 1e-13);
    EXPECT_EQ(out.tolerance_met, out.result.report.bound <= c.tol);
}

TEST(Propagate, SplittingByNameUsesSteps) {
    auto c = cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 30}}, "t": 2, "tol": 1,
                                      "method": {"splitting": {"name": "Strang_1"}}})");
    auto h = cli::build_hamiltonian(c.problem);
    const double theta = sp::spectral_shift(*h).beta * c.t;
    auto out = cli::run_propagate(c, cli::resolve_catalog(""));
    auto ref = cli::reference_solution(*h, c.t, cli::initial_state(c, *h));
    EXPECT_NE(out.result.report.method.find(std::to_string(static_cast<int>(std::ceil(theta))) + "x"),
              std::string::npos);
    EXPECT_LE(sp::distance(out.result.state, ref), out.result.report.bound);
}

TEST(Propagate, AutoFallsBackWithoutCoefficients) {
    auto c = cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 40}}, "t": 10, "tol": 1e-9,
                                      "method": "auto"})");
    auto out = cli::run_propagate(c, cli::resolve_catalog(""));
    EXPECT_FALSE(out.plan_json.empty());
    EXPECT_FALSE(out.result.report.warnings.empty());
    EXPECT_TRUE(out.tolerance_met);
    auto h = cli::build_hamiltonian(c.problem);
    auto ref = cli::reference_solution(*h, c.t, cli::initial_state(c, *h));
    EXPECT_LE(sp::distance(out.result.state, ref), c.tol);
}

TEST(Propagate, UnknownMethodIsInvalid) {
    auto c = cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 10}},
                                      "method": {"splitting": {"name": "nope"}}})");
    EXPECT_THROW(cli::run_propagate(c, cli::resolve_catalog("")), sp::InvalidInput);
}

TEST(Propagate, WritesOutputs) {
    const auto state = (scratch_dir() / "state.csv").string();
    const auto report = (scratch_dir() / "report.json").string();
    cli::RunConfig c = cli::parse_run_config(R"({"problem": {"tridiagonal": {"n": 12}}, "t": 1,
                                               "method": {"taylor": {"m": 20}}})");
    c.output_state = state;
    c.output_report = report;
    auto out = cli::run_propagate(c, cli::resolve_catalog(""));
    auto loaded = sp::load_state(state);
    EXPECT_LE(sp::distance(loaded, out.result.state), 1e-15);
    auto j = nlohmann::json::parse(read_file(report));
    EXPECT_TRUE(j.contains("bound"));
}

TEST(Example1, ZeroTimeHasNoError) {
    cli::Example1Options o;
    o.n = 20;
    o.t = 0;
    o.taylor_m = {5};
    o.chebyshev_m = {5};
    for (const auto &row : cli::run_example1(o)) {
        EXPECT_EQ(row.error, 0.0) << row.method;
        EXPECT_EQ(row.energy_error, 0.0) << row.method;
        EXPECT_LE(row.unitarity_error, 1e-15) << row.method;
    }
}

TEST(Example1, BoundsDominateAndOutputIsDeterministic) {
    cli::Example1Options o;
    o.n = 100;
    o.t = 20;
    o.chebyshev_m = {20, 30, 40, 50, 60};
    o.taylor_m = {60, 80};
    auto cat = cli::resolve_catalog("");
    o.splitting.push_back(*cat.find("Strang_1"));
    auto rows = cli::run_example1(o);
    ASSERT_EQ(rows.size(), 9u);
    double prev = 1e300;
    for (const auto &row : rows) {
        EXPECT_GT(row.rounding, 0) << row.method;
        if (row.bound >= 0) EXPECT_LE(row.error, row.bound + row.rounding) << row.method << " m=" << row.m;
        if (row.method == "chebyshev" && row.m >= 30 && row.bound > 1e-12) {
            EXPECT_LT(row.error, prev);
            prev = row.error;
        }
    }
    EXPECT_EQ(cli::example1_csv(rows, o.seed), cli::example1_csv(cli::run_example1(o), o.seed));
}

TEST(Example2, PoschlTellerBoundsAndCosts) {
    auto cat = cli::resolve_catalog("");
    auto rep = cli::run_example2(64, 1.0, 1e-6, cat);
    EXPECT_NEAR(rep.e_min, -0.65988, 0.65988 * 5e-5);
    EXPECT_NEAR(rep.e_max, 0.11583, 0.11583 * 5e-5);

    rep = cli::run_example2(128, 15 * std::numbers::pi, 1e-9, cat);
    EXPECT_NEAR(rep.t_beta, 26.4648, 1e-3);
    bool saw_cheb = false, saw_split = false;
    for (const auto &row : rep.rows) {
        if (row.method == "chebyshev") {
            saw_cheb = true;
            EXPECT_EQ(row.degree_equivalent, 51u);
            EXPECT_TRUE(row.ran);
            EXPECT_LE(row.error, 1e-9);
        }
        if (row.method == "splitting") {
            saw_split = true;
            EXPECT_EQ(row.degree_equivalent, 30u);
        }
        if (row.method == "taylor" && row.ran) EXPECT_LE(row.error, 1e-9);
    }
    EXPECT_TRUE(saw_cheb);
    EXPECT_TRUE(saw_split);
    auto j = nlohmann::json::parse(cli::to_json(rep));
    EXPECT_EQ(j.at("rows").size(), rep.rows.size());
}

TEST(Degrees, OrderingAndKnownDegree) {
    auto cat = cli::resolve_catalog("");
    auto rows = cli::degree_curves({3.62e-7}, {1000}, cat);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].m_chebyshev, 1135);
    EXPECT_GT(rows[0].splitting, 0u);
    EXPECT_LT(rows[0].splitting, 1135u);

    rows = cli::degree_curves({1e-4}, {10, 50, 100, 500, 1000}, cat);
    for (const auto &r : rows) {
        EXPECT_LE(r.m_chebyshev, r.m_taylor) << r.theta;
        if (r.splitting > 0) EXPECT_LE(r.splitting, static_cast<std::uint64_t>(r.m_chebyshev)) << r.theta;
    }
    auto csv = cli::degree_csv(rows);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

#ifdef SPLITPROP_TOOL
TEST(Tool, ExitCodes) {
    EXPECT_EQ(run_tool("select --tbeta 26.4648 --tol 1e-9"), 0);
    EXPECT_EQ(run_tool("analyze --a 0.5,0.5 --b 1 --theta 1"), 0);
    EXPECT_EQ(run_tool("analyze --a 0.5 --b 1 --theta 1"), 3);
    EXPECT_EQ(run_tool("select --tbeta 10"), 3);

    auto ok = write_file("ok.json", R"({"problem": {"tridiagonal": {"n": 20}}, "t": 1, "tol": 1e-6,
                                        "method": {"chebyshev": {"m": 30}}})");
    EXPECT_EQ(run_tool("propagate --config " + ok), 0);
    auto loose = write_file("loose.json", R"({"problem": {"tridiagonal": {"n": 20}}, "t": 20, "tol": 1e-6,
                                           "method": {"chebyshev": {"m": 10}}})");
    EXPECT_EQ(run_tool("propagate --config " + loose), 2);
    auto bad = write_file("bad.json", R"({"problem": {"tridiagonal": {"n": 20}}, "method": {"krylov": {}}})");
    EXPECT_EQ(run_tool("propagate --config " + bad), 3);
    EXPECT_EQ(run_tool("propagate --config " + (scratch_dir() / "missing.json").string()), 3);
}

TEST(Tool, BenchDegreesWritesCsv) {
    const auto out = (scratch_dir() / "deg.csv").string();
    ASSERT_EQ(run_tool("bench degrees --tols 1e-6 --thetas 10,100 -o " + out), 0);
    auto text = read_file(out);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}
#endif
