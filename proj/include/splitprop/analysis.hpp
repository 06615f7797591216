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

#ifndef SPLITPROP_ANALYSIS_HPP
#define SPLITPROP_ANALYSIS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "splitprop/propagators.hpp"

namespace splitprop {

/// 2x2 matrix applied by one splitting step to an eigencomponent with tau*E = y.
struct StabilityMatrix {
    double k11 = 1, k12 = 0, k21 = 0, k22 = 1;
    double det() const { return k11 * k22 - k12 * k21; }
    /// Largest singular value, in closed form using det = 1.
    double norm() const;
};

StabilityMatrix k_matrix(const SplitCoefficients &c, double y);

/// C = (K11 + K22)/2, S = (K12 - K21)/2, Q = C^2 + S^2 - 1 = ((K11-K22)^2 + (K12+K21)^2)/4.
struct CsSample {
    double c = 1;
    double s = 0;
    double q = 0;
};

CsSample cs_sample(const StabilityMatrix &k);
CsSample cs_sample(const SplitCoefficients &c, double y);
std::pair<double, double> cs_values(const SplitCoefficients &c, double y);

/// Any even/odd pair (C, S) with C^2 + S^2 - 1 >= 0, for instance a designer candidate.
using CsFunction = std::function<CsSample(double)>;

struct CsSource {
    CsFunction eval;
    /// Polynomial degree in y of the stability matrix entries; sets the sampling density.
    int degree = 1;
};

CsSource cs_source(const SplitCoefficients &c);

/// Pointwise error terms.
double epsilon_at(const CsSample &v, double y);
double delta_at(const CsSample &v);
double mu_at(const CsSample &v, double y);
/// NaN where 1 - C^2 is below the guard threshold.
double nu_at(const CsSample &v);

double epsilon_sup(const CsSource &f, double theta);
double delta_sup(const CsSource &f, double theta);
struct MuNu {
    double mu = 0;
    double nu = 0;
};
/// No stability check; callers make sure theta <= y*.
MuNu mu_nu_unchecked(const CsSource &f, double theta);
/// Largest y* such that |C| < 1 on (0, y*) apart from tangencies where K = +-I.
double stability_threshold(const CsSource &f, double y_max);

double epsilon_sup(const SplitCoefficients &c, double theta);
double delta_sup(const SplitCoefficients &c, double theta);
/// Throws OutOfStability when theta exceeds the stability threshold.
MuNu mu_nu(const SplitCoefficients &c, double theta);
double stability_threshold(const SplitCoefficients &c);

struct MethodErrorProfile {
    double theta_max = 0;
    double y_star = 0;
    double eps = 0;
    double mu = 0;
    double nu = 0;
    double delta = 0;
    bool has_mu_nu = true;
};

MethodErrorProfile error_profile(const SplitCoefficients &c, double theta);
MethodErrorProfile error_profile(const CsSource &f, double theta, double y_star);

double nstep_bound(const MethodErrorProfile &profile, int n);
/// eps_tail + (1 + delta_tail) (n mu_head + nu_head); the simplified form drops delta_tail.
double combined_bound(const MethodErrorProfile &tail, const MethodErrorProfile &head, int n,
                      bool simplified = true);
double combined_bound(const std::optional<MethodErrorProfile> &tail, const MethodErrorProfile &head, int n,
                      bool simplified = true);

double taylor_bound(int m, double theta);
/// Valid for m > theta only; throws ValidityError otherwise.
double chebyshev_bound(int m, double theta);

enum class BoundKind { Taylor, Chebyshev };
int min_degree(BoundKind kind, double theta, double tol);

struct TraceRow {
    double y, c, s, err, knorm;
};
std::vector<TraceRow> trace(const CsSource &f, double theta, int points);

}  // namespace splitprop

#endif
