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

#ifndef SPLITPROP_DESIGNER_HPP
#define SPLITPROP_DESIGNER_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "splitprop/catalog.hpp"

namespace splitprop {

/// Design and factorization failures; what() carries the diagnostics.
class DesignFailure : public NumericalFailure {
   public:
    using NumericalFailure::NumericalFailure;
};

/// theta cos((2k - 1) pi / (2l)), k = 1..l, ascending.
std::vector<double> chebyshev_nodes(int l, double theta);

struct DesignProblem {
    int m = 0;
    double theta = 0;
    int l = 0;
    /// Symmetric about zero, in y units.
    std::vector<double> nodes;
};

/// Chebyshev nodes for the given sizes; checks l odd and m + 1 <= l <= 2m + 1.
DesignProblem make_design_problem(int m, double theta, int l);

/// Odd phase perturbation e(y) = sum_j e_j T_{2j+1}(y / theta).
struct PhasePoly {
    double theta = 1;
    std::vector<long double> coeffs;

    long double operator()(long double y) const;
    /// Root-sum-square of the Chebyshev coefficients.
    double norm() const;
};

/// Full-precision coefficients carried alongside the long double copies.
struct CandidateWide;

/// P = C + S in the Chebyshev basis of x = y / theta; C even, S odd.
struct CandidateP {
    double theta = 1;
    std::vector<long double> c;
    std::vector<long double> s;
    /// Interpolation nodes in y units; empty when unknown.
    std::vector<double> nodes;
    /// Set by the designer; c and s are rounded copies. Editing c or s by hand
    /// requires resetting this.
    std::shared_ptr<const CandidateWide> wide;

    int degree() const;
    long double p(long double y) const;
    CsSample sample(double y) const;
    CsSource source() const;
};

/// Exact (C, S) of a coefficient sequence, expanded in x = y / theta.
CandidateP candidate_from_sequence(const SplitCoefficients &c, double theta);

/// Hermite interpolant of cos(y + e(y)) + sin(y + e(y)) at the nodes.
CandidateP hermite_interpolant(const PhasePoly &e, const std::vector<double> &nodes);

struct PhaseOptions {
    int max_iterations = 500;
    int starts = 3;
    std::uint64_t seed = 12345;
    double tolerance = 1e-12;
};

struct PhaseResult {
    PhasePoly e;
    /// Interpolant truncated to degree 2m + 1.
    CandidateP candidate;
    /// Largest constraint coefficient relative to the largest retained one.
    double residual = 0;
    bool converged = false;
    int iterations = 0;
};

/// Minimum-norm e with the Hermite interpolant of exact degree 2m + 1. Uses
/// Chebyshev nodes unless a node set is supplied.
PhaseResult optimize_phase(int m, double theta, int l, const PhaseOptions &opts = {});
PhaseResult optimize_phase(const DesignProblem &problem, const PhaseOptions &opts = {});

struct ValidationReport {
    bool v_nonnegative = false;
    bool stable = false;
    double max_abs_c = 0;
    double eps = 0, mu = 0, nu = 0, delta = 0;
    bool has_mu_nu = false;
    double deflation_residual = 0;
    /// Even quotient V of (P(y)^2 + P(-y)^2)/2 - 1 by W(y)^2, Chebyshev basis in x.
    std::vector<long double> v;
    std::string message;
};

/// Throws DesignFailure when the deflation residual exceeds 1e-8.
ValidationReport validate_candidate(const CandidateP &p, int m, double theta);

struct StabilizeResult {
    DesignProblem problem;
    PhaseResult phase;
    int iterations = 0;
    bool converged = false;
    double movement = 0;
};

/// Anchored-node iteration; identity on Chebyshev nodes when theta < pi.
StabilizeResult stabilize_nodes(const DesignProblem &problem, const PhaseOptions &opts = {});

struct FactorizationReport {
    int branches = 0;
    int accepted = 0;
    double roundtrip_error = 0;
    double l1_norm = 0;
};

/// Completes (C, S) to a stability matrix and peels it into shears; returns the
/// branch with the smallest sum |a_j| + |b_j|.
SplitCoefficients split_factorization(const CandidateP &p, int m, FactorizationReport *report = nullptr);

struct DesignOptions {
    int l_window = 7;
    PhaseOptions phase;
    /// Explicit l values; overrides the window when non-empty.
    std::vector<int> l_values;
};

struct DesignAttempt {
    int l = 0;
    bool ok = false;
    double eps = 0;
    std::string message;
};

struct DesignResult {
    MethodRecord record;
    int l = 0;
    std::vector<DesignAttempt> attempts;
};

DesignResult design_method(int m, double theta, const DesignOptions &opts = {});

/// Odd l values nearest (3m + 3)/2 inside [m + 1, 2m + 1], closest first.
std::vector<int> l_candidates(int m, int window);

}  // namespace splitprop

#endif
