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

#ifndef SPLITPROP_PROPAGATORS_HPP
#define SPLITPROP_PROPAGATORS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "splitprop/core.hpp"

namespace splitprop {

/// Splitting sequence (a_1, b_1, ..., a_m, b_m, a_{m+1}).
/// Only the shape is enforced here; first-order consistency is checked by
/// callers that require it (catalog loading, plan execution).
struct SplitCoefficients {
    std::vector<double> a;
    std::vector<double> b;

    SplitCoefficients() = default;
    SplitCoefficients(std::vector<double> a, std::vector<double> b);

    std::size_t stages() const { return b.size(); }
    /// Sum a = Sum b = 1 within tol.
    bool is_consistent(double tol = 1e-12) const;
    bool operator==(const SplitCoefficients &) const = default;
};

/// P_m^T(t H) u0 by Horner's rule. Uses 2m real products.
WaveState taylor_apply(const ShiftedOperator &op, double t, int m, const WaveState &u0);

/// J_k(theta) for k = 0..kmax.
std::vector<double> bessel_j_sequence(int kmax, double theta);
double bessel_j(int k, double theta);

/// Truncated Chebyshev expansion of exp(-i t H) evaluated by Clenshaw
/// recursion on H / beta. Uses 2m real products.
WaveState chebyshev_apply(const ShiftedOperator &op, double beta, double t, int m, const WaveState &u0);

/// One step of the splitting kernel, 2m+1 real products.
WaveState splitting_step(const ShiftedOperator &op, double tau, const SplitCoefficients &c, const WaveState &state);
/// In-place variant working on (q, p) plus a single scratch array.
void splitting_step_inplace(const ShiftedOperator &op, double tau, const SplitCoefficients &c, WaveState &state,
                            std::vector<double> &scratch);

struct PlanStage {
    std::string name;
    SplitCoefficients coefficients;
    double tau = 0.0;
    int count = 1;
    /// Largest certified step tau*beta; zero when unknown.
    double theta_max = 0.0;
};

struct PropagationPlan {
    std::vector<PlanStage> stages;
    SpectralShift shift;
    double total_time = 0.0;
    std::string method = "splitting";
    /// Certified error bound relative to the initial norm, if known; negative otherwise.
    double bound = -1.0;
};

struct RunReport {
    std::string method;
    std::uint64_t products_real = 0;
    std::uint64_t degree_equivalent = 0;
    double bound = -1.0;
    double wall_time_s = 0.0;
    std::vector<std::string> warnings;
};

struct PropagationResult {
    WaveState state;
    RunReport report;
};

std::string to_json(const RunReport &report);

/// Runs every stage in order and restores the global phase exp(-i alpha t).
PropagationResult execute_plan(const PropagationPlan &plan, const LinearHamiltonian &h, const WaveState &u0);

/// Substeps used by the Taylor driver: ceil(e beta t / m), at least one.
int default_taylor_substeps(double theta, int m);

/// Full Taylor propagation over [0, t] with equal substeps; substeps <= 0 picks the default.
PropagationResult taylor_propagate(const LinearHamiltonian &h, double t, int m, const WaveState &u0,
                                   int substeps = 0);

PropagationResult chebyshev_propagate(const LinearHamiltonian &h, double t, int m, const WaveState &u0);

}  // namespace splitprop

#endif
