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


#ifndef SPLITPROP_CLI_CONFIG_HPP
#define SPLITPROP_CLI_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <string>

#include "splitprop/catalog.hpp"
#include "splitprop/core.hpp"
#include "splitprop/hamiltonians.hpp"
#include "splitprop/propagators.hpp"

namespace splitprop::cli {

struct ProblemConfig {
    enum class Kind { Tridiagonal, Fourier1D };
    Kind kind = Kind::Tridiagonal;
    std::size_t n = 100;
    double length = 10.0;
    PoschlTellerPotential pot;
    /// "x,V" file replacing the Poschl-Teller well when set.
    std::string potential_csv;
};

struct MethodConfig {
    enum class Kind { Auto, Taylor, Chebyshev, Splitting };
    Kind kind = Kind::Auto;
    int m = 0;
    /// Taylor substeps; zero picks the default.
    int substeps = 0;
    std::string name;
};

struct RunConfig {
    ProblemConfig problem;
    double t = 1.0;
    double tol = 1e-8;
    MethodConfig method;
    std::uint64_t seed = 1;
    /// "random", "gaussian" or a state file.
    std::string initial = "random";
    std::string catalog_path;
    bool heads_all = false;
    std::string output_state;
    std::string output_report;
};

/// Throws InvalidInput unless exactly one problem and one method are given.
RunConfig parse_run_config(const std::string &json_text);
RunConfig load_run_config(const std::string &path);
std::string to_json(const RunConfig &config);

std::unique_ptr<LinearHamiltonian> build_hamiltonian(const ProblemConfig &problem);
WaveState initial_state(const RunConfig &config, const LinearHamiltonian &h);

/// Bundled table merged with the configured file, if any.
Catalog resolve_catalog(const std::string &path);

struct PropagateOutcome {
    PropagationResult result;
    bool tolerance_met = true;
    /// Selector plan as JSON for the automatic mode; empty otherwise.
    std::string plan_json;
};

PropagateOutcome run_propagate(const RunConfig &config, const Catalog &catalog);

}  // namespace splitprop::cli

#endif
