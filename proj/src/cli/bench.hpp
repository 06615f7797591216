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


#ifndef SPLITPROP_CLI_BENCH_HPP
#define SPLITPROP_CLI_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "splitprop/catalog.hpp"
#include "splitprop/core.hpp"
#include "splitprop/propagators.hpp"

namespace splitprop::cli {

/// exp(-i t H) u0 from a dense eigendecomposition up to dimension 512 and
/// from Chebyshev at tolerance 1e-14 beyond.
WaveState reference_solution(const LinearHamiltonian &h, double t, const WaveState &u0);

/// Re <u, H u>.
double energy(const LinearHamiltonian &h, const WaveState &u);

/// A priori floating-point allowances for a unit-norm start: (2m + 1) u times
/// the l1 norm of the expansion coefficients, per step.
double chebyshev_rounding(double theta, int m);
double taylor_rounding(double theta, int m, int steps);
double splitting_rounding(const SplitCoefficients &c, double theta_step, int steps);

struct Example1Options {
    std::size_t n = 100;
    double t = 20.0;
    std::uint64_t seed = 1;
    std::vector<int> taylor_m;
    std::vector<int> chebyshev_m;
    /// Certified records with coefficients; each runs over [0, t] and as a single step of theta_max.
    std::vector<MethodRecord> splitting;
};

struct Example1Row {
    std::string method;
    int m = 0;
    int steps = 1;
    double t = 0;
    std::uint64_t products = 0;
    double error = 0;
    double energy_error = 0;
    double unitarity_error = 0;
    /// Negative when no bound applies.
    double bound = -1;
    /// A priori floating-point error allowance of the polynomial evaluation.
    double rounding = 0;
};

/// Empty degree lists default to m = 20, 22, ..., 60.
std::vector<Example1Row> run_example1(const Example1Options &opts);
std::string example1_csv(const std::vector<Example1Row> &rows, std::uint64_t seed);

struct Example2Row {
    std::string method;
    std::uint64_t degree_equivalent = 0;
    std::uint64_t products = 0;
    bool ran = false;
    double error = 0;
    double bound = -1;
    std::string note;
};

struct Example2Report {
    std::size_t n = 0;
    double length = 10.0;
    double e_min = 0, e_max = 0, alpha = 0, beta = 0;
    double t = 0, t_beta = 0, tol = 0;
    std::vector<Example2Row> rows;
};

/// Poschl-Teller well on [-5, 5] with a Gaussian start; n must be 64, 128, ..., 1024.
Example2Report run_example2(std::size_t n, double t, double tol, const Catalog &catalog, int taylor_substeps = 0);
std::string to_json(const Example2Report &report);

struct DegreeRow {
    double theta = 0, tol = 0;
    int m_taylor = 0, m_chebyshev = 0;
    /// Selector plan cost; zero when the catalog cannot meet the tolerance.
    std::uint64_t splitting = 0;
};

std::vector<DegreeRow> degree_curves(const std::vector<double> &tolerances, const std::vector<double> &thetas,
                                     const Catalog &catalog);
std::string degree_csv(const std::vector<DegreeRow> &rows);

}  // namespace splitprop::cli

#endif
