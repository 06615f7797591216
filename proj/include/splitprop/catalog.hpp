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

#ifndef SPLITPROP_CATALOG_HPP
#define SPLITPROP_CATALOG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "splitprop/analysis.hpp"

namespace splitprop {

struct MethodRecord {
    std::string name;
    int m = 0;
    double gamma = 0;
    double theta_max = 0;
    MethodErrorProfile profile;
    std::optional<SplitCoefficients> coefficients;
    /// Coefficients present and the stored profile confirmed by recomputation.
    bool certified = false;
    /// Reference rows (plain Strang) are listed but never selected.
    bool reference = false;
    /// Free-form JSON text carried through from the file (designer provenance).
    std::string provenance;
};

struct Catalog {
    std::vector<MethodRecord> records;

    const MethodRecord *find(const std::string &name) const;
    bool empty() const { return records.empty(); }
};

struct CatalogLoad {
    Catalog catalog;
    /// One message per rejected record.
    std::vector<std::string> rejected;
};

/// (1/(2m), 1/m, ..., 1/m, 1/(2m)): m Strang steps of length 1/m.
SplitCoefficients strang_sequence(int m);

CatalogLoad parse_catalog(const std::string &json_text);
CatalogLoad load_catalog(const std::string &path);
/// The built-in table of published method parameters (metadata only) plus Strang reference rows.
CatalogLoad bundled_catalog();
/// Merges b into a and re-sorts; records in b replace same-named records in a.
Catalog merge_catalogs(const Catalog &a, const Catalog &b);

std::string record_to_json(const MethodRecord &r);
std::string catalog_to_json(const Catalog &c);
void sort_catalog(Catalog &c);

struct PlanPart {
    std::string name;
    int m = 0;
    int n = 1;
    double tau_beta = 0;
    double theta_max = 0;
};

struct SelectionPlan {
    double t_beta = 0;
    double tol = 0;
    std::optional<PlanPart> head;
    std::optional<PlanPart> tail;
    double certified_bound = 0;
    std::uint64_t cost_degree_equivalent = 0;
    bool tolerance_met = true;
};

struct SelectOptions {
    /// Allow any record as a composition head instead of 60-stage records only.
    bool heads_all = false;
};

SelectionPlan select_method(double t_beta, double tol, const Catalog &catalog, const SelectOptions &opts = {});

struct PlanCost {
    std::uint64_t real_products = 0;
    std::uint64_t degree_equivalent = 0;
};
PlanCost plan_cost(const SelectionPlan &plan);

std::string to_json(const SelectionPlan &plan);

/// Step sizes in time units for a given spectral shift; needs coefficient payloads.
PropagationPlan to_propagation_plan(const SelectionPlan &plan, const Catalog &catalog, const SpectralShift &shift,
                                    double t);

/// beta*t at which n-step repetitions of a and b (same theta_max) have equal bounds.
double repetition_crossover(const MethodErrorProfile &a, const MethodErrorProfile &b);

}  // namespace splitprop

#endif
