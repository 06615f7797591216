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

#include "splitprop/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace splitprop {

extern const char *const kBundledCatalogJson;

using nlohmann::json;

const MethodRecord *Catalog::find(const std::string &name) const {
    for (const auto &r : records) {
        if (r.name == name) {
            return &r;
        }
    }
    return nullptr;
}

SplitCoefficients strang_sequence(int m) {
    if (m < 1) {
        throw InvalidInput("strang_sequence: m must be at least 1");
    }
    std::vector<double> a(m + 1, 1.0 / m), b(m, 1.0 / m);
    a.front() = a.back() = 0.5 / m;
    return SplitCoefficients(std::move(a), std::move(b));
}

void sort_catalog(Catalog &c) {
    std::stable_sort(c.records.begin(), c.records.end(), [](const MethodRecord &x, const MethodRecord &y) {
        return std::make_tuple(x.reference, x.m, x.theta_max, x.name) <
               std::make_tuple(y.reference, y.m, y.theta_max, y.name);
    });
}

namespace {

// Recomputed values may exceed the stored ones by this factor plus a roundoff floor.
constexpr double kCertFactor = 2.0;
constexpr double kCertFloor = 1e-13;

double number_field(const json &j, const char *key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw InvalidInput(std::string("missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

std::vector<double> array_field(const json &j, const char *key) {
    const auto &arr = j.at(key);
    if (!arr.is_array()) {
        throw InvalidInput(std::string("field '") + key + "' must be an array");
    }
    std::vector<double> out;
    for (const auto &x : arr) {
        if (!x.is_number()) {
            throw InvalidInput(std::string("field '") + key + "' must hold numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

MethodRecord parse_record(const json &j) {
    if (!j.is_object()) {
        throw InvalidInput("record is not an object");
    }
    MethodRecord r;
    if (!j.contains("name") || !j.at("name").is_string()) {
        throw InvalidInput("missing string field 'name'");
    }
    r.name = j.at("name").get<std::string>();
    double mf = number_field(j, "m");
    if (mf < 1 || mf != std::floor(mf)) {
        throw InvalidInput("'m' must be a positive integer");
    }
    r.m = static_cast<int>(mf);
    r.gamma = number_field(j, "gamma");
    r.theta_max = number_field(j, "theta_max");
    if (!(r.theta_max > 0)) {
        throw InvalidInput("'theta_max' must be positive");
    }
    if (std::abs(r.theta_max - r.gamma * r.m) > 1e-12 * std::max(1.0, r.theta_max)) {
        std::ostringstream msg;
        msg << "theta_max = " << r.theta_max << " differs from gamma*m = " << r.gamma * r.m;
        throw InvalidInput(msg.str());
    }
    r.profile.theta_max = r.theta_max;
    r.profile.y_star = number_field(j, "y_star");
    r.profile.eps = number_field(j, "eps");
    r.profile.mu = number_field(j, "mu");
    r.profile.nu = number_field(j, "nu");
    r.profile.delta = number_field(j, "delta");
    r.profile.has_mu_nu = r.theta_max <= r.profile.y_star * (1 + 1e-12);
    for (double v : {r.profile.eps, r.profile.mu, r.profile.nu, r.profile.delta}) {
        if (!(v >= 0) || !std::isfinite(v)) {
            throw InvalidInput("error parameters must be finite and non-negative");
        }
    }
    r.reference = j.value("reference", false);
    bool has_a = j.contains("a") && !j.at("a").is_null();
    bool has_b = j.contains("b") && !j.at("b").is_null();
    if (has_a != has_b) {
        throw InvalidInput("coefficients need both 'a' and 'b'");
    }
    if (has_a) {
        auto a = array_field(j, "a");
        auto b = array_field(j, "b");
        if (a.size() != b.size() + 1 || static_cast<int>(b.size()) != r.m) {
            throw InvalidInput("coefficient arrays do not match m");
        }
        r.coefficients = SplitCoefficients(std::move(a), std::move(b));
        if (!r.coefficients->is_consistent(1e-10)) {
            throw InvalidInput("coefficients violate sum(a) = sum(b) = 1");
        }
    }
    if (j.contains("provenance")) {
        r.provenance = j.at("provenance").dump();
    }
    return r;
}

// Recomputes the error parameters from the coefficients; returns an empty string on success.
std::string certify(MethodRecord &r) {
    const auto &c = *r.coefficients;
    MethodErrorProfile got = error_profile(c, r.theta_max);
    std::ostringstream msg;
    msg.precision(3);
    auto check = [&](const char *what, double stored, double recomputed) {
        if (recomputed > kCertFactor * stored + kCertFloor) {
            msg << what << " recomputed " << recomputed << " vs stored " << stored << "; ";
        }
    };
    if (!got.has_mu_nu) {
        msg << "theta_max " << r.theta_max << " beyond recomputed stability threshold " << got.y_star << "; ";
    } else {
        check("mu", r.profile.mu, got.mu);
        check("nu", r.profile.nu, got.nu);
    }
    check("eps", r.profile.eps, got.eps);
    check("delta", r.profile.delta, got.delta);
    return msg.str();
}

}  // namespace

CatalogLoad parse_catalog(const std::string &json_text) {
    CatalogLoad out;
    if (std::all_of(json_text.begin(), json_text.end(), [](unsigned char ch) { return std::isspace(ch); })) {
        return out;
    }
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw InvalidInput(std::string("catalog parse error: ") + e.what());
    }
    if (!doc.is_array()) {
        throw InvalidInput("catalog must be a JSON array of records");
    }
    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        std::string label = "record " + std::to_string(i);
        if (doc[i].is_object() && doc[i].contains("name") && doc[i]["name"].is_string()) {
            label += " (" + doc[i]["name"].get<std::string>() + ")";
        }
        try {
            MethodRecord r = parse_record(doc[i]);
            if (seen.count(r.name) != 0) {
                throw InvalidInput("duplicate name");
            }
            if (r.coefficients) {
                std::string why = certify(r);
                if (!why.empty()) {
                    throw InvalidInput("certification failed: " + why);
                }
                r.certified = true;
            }
            seen[r.name] = 1;
            out.catalog.records.push_back(std::move(r));
        } catch (const InvalidInput &e) {
            out.rejected.push_back(label + ": " + e.what());
        } catch (const nlohmann::json::exception &e) {
            out.rejected.push_back(label + ": " + e.what());
        }
    }
    sort_catalog(out.catalog);
    return out;
}

CatalogLoad load_catalog(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        throw InvalidInput("cannot open catalog " + path);
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_catalog(ss.str());
}

CatalogLoad bundled_catalog() { return parse_catalog(kBundledCatalogJson); }

Catalog merge_catalogs(const Catalog &a, const Catalog &b) {
    Catalog out;
    for (const auto &r : a.records) {
        if (b.find(r.name) == nullptr) {
            out.records.push_back(r);
        }
    }
    for (const auto &r : b.records) {
        out.records.push_back(r);
    }
    sort_catalog(out);
    return out;
}

namespace {

json record_json(const MethodRecord &r) {
    json j;
    j["name"] = r.name;
    j["m"] = r.m;
    j["gamma"] = r.gamma;
    j["theta_max"] = r.theta_max;
    j["y_star"] = r.profile.y_star;
    j["eps"] = r.profile.eps;
    j["mu"] = r.profile.mu;
    j["nu"] = r.profile.nu;
    j["delta"] = r.profile.delta;
    if (r.coefficients) {
        j["a"] = r.coefficients->a;
        j["b"] = r.coefficients->b;
    }
    if (r.reference) {
        j["reference"] = true;
    }
    if (!r.provenance.empty()) {
        j["provenance"] = json::parse(r.provenance);
    }
    return j;
}

}  // namespace

std::string record_to_json(const MethodRecord &r) { return record_json(r).dump(2); }

std::string catalog_to_json(const Catalog &c) {
    json arr = json::array();
    for (const auto &r : c.records) {
        arr.push_back(record_json(r));
    }
    return arr.dump(2);
}

namespace {

struct Candidate {
    SelectionPlan plan;
    int tail_stages = 0;
    std::string key;
};

bool better(const Candidate &x, const Candidate &y) {
    return std::make_tuple(x.plan.cost_degree_equivalent, x.plan.certified_bound, x.tail_stages, x.key) <
           std::make_tuple(y.plan.cost_degree_equivalent, y.plan.certified_bound, y.tail_stages, y.key);
}

bool lower_bound_first(const Candidate &x, const Candidate &y) {
    return std::make_tuple(x.plan.certified_bound, x.plan.cost_degree_equivalent, x.tail_stages, x.key) <
           std::make_tuple(y.plan.certified_bound, y.plan.cost_degree_equivalent, y.tail_stages, y.key);
}

PlanPart part_of(const MethodRecord &r, int n, double tau_beta) {
    return {r.name, r.m, n, tau_beta, r.theta_max};
}

bool fits(double step, double theta_max) { return step <= theta_max * (1 + 1e-12); }

}  // namespace

SelectionPlan select_method(double t_beta, double tol, const Catalog &catalog, const SelectOptions &opts) {
    if (!(t_beta >= 0) || !std::isfinite(t_beta)) {
        throw InvalidInput("select_method: t_beta must be finite and non-negative");
    }
    if (!(tol > 0)) {
        throw InvalidInput("select_method: tolerance must be positive");
    }
    if (catalog.empty()) {
        throw InvalidInput("select_method: catalog is empty");
    }
    SelectionPlan base;
    base.t_beta = t_beta;
    base.tol = tol;
    if (t_beta == 0.0) {
        return base;
    }

    std::vector<Candidate> all;
    // Single steps; the catalog order makes the first qualifier the cheapest.
    for (const auto &r : catalog.records) {
        if (r.reference || !fits(t_beta, r.theta_max)) {
            continue;
        }
        Candidate c{base, 0, r.name};
        c.plan.tail = part_of(r, 1, t_beta);
        c.plan.certified_bound = r.profile.eps;
        c.plan.cost_degree_equivalent = r.m;
        all.push_back(c);
    }

    for (const auto &h : catalog.records) {
        if (h.reference || !h.profile.has_mu_nu || (!opts.heads_all && h.m != 60)) {
            continue;
        }
        int n = static_cast<int>(std::floor(t_beta / h.theta_max));
        double rem = t_beta - n * h.theta_max;
        if (n >= 1) {
            if (rem <= 1e-12 * t_beta) {
                Candidate c{base, 0, h.name};
                c.plan.head = part_of(h, n, h.theta_max);
                c.plan.certified_bound = nstep_bound(h.profile, n);
                c.plan.cost_degree_equivalent = static_cast<std::uint64_t>(n) * h.m;
                all.push_back(c);
            } else {
                for (const auto &t : catalog.records) {
                    if (t.reference || !fits(rem, t.theta_max)) {
                        continue;
                    }
                    Candidate c{base, t.m, h.name + "+" + t.name};
                    c.plan.head = part_of(h, n, h.theta_max);
                    c.plan.tail = part_of(t, 1, rem);
                    c.plan.certified_bound = combined_bound(t.profile, h.profile, n, true);
                    c.plan.cost_degree_equivalent = static_cast<std::uint64_t>(n) * h.m + t.m;
                    all.push_back(c);
                }
            }
        }
        int nc = static_cast<int>(std::ceil(t_beta / h.theta_max));
        if (nc >= 1 && nc != n) {
            Candidate c{base, 0, h.name};
            c.plan.head = part_of(h, nc, t_beta / nc);
            c.plan.certified_bound = nstep_bound(h.profile, nc);
            c.plan.cost_degree_equivalent = static_cast<std::uint64_t>(nc) * h.m;
            all.push_back(c);
        }
    }

    if (all.empty()) {
        std::ostringstream msg;
        msg << "select_method: no catalog method can cover t*beta = " << t_beta;
        throw InvalidInput(msg.str());
    }
    const Candidate *best = nullptr;
    for (const auto &c : all) {
        if (c.plan.certified_bound <= tol && (best == nullptr || better(c, *best))) {
            best = &c;
        }
    }
    if (best != nullptr) {
        return best->plan;
    }
    best = &all.front();
    for (const auto &c : all) {
        if (lower_bound_first(c, *best)) {
            best = &c;
        }
    }
    SelectionPlan p = best->plan;
    p.tolerance_met = false;
    return p;
}

PlanCost plan_cost(const SelectionPlan &plan) {
    PlanCost c;
    std::uint64_t launches = 0;
    for (const auto *part : {&plan.head, &plan.tail}) {
        if (*part) {
            c.degree_equivalent += static_cast<std::uint64_t>((*part)->n) * (*part)->m;
            launches += (*part)->n;
        }
    }
    c.real_products = 2 * c.degree_equivalent + launches;
    return c;
}

std::string to_json(const SelectionPlan &plan) {
    json j;
    j["t_beta"] = plan.t_beta;
    j["tol"] = plan.tol;
    auto part = [](const std::optional<PlanPart> &p) -> json {
        if (!p) {
            return nullptr;
        }
        return json{{"method", p->name}, {"m", p->m}, {"n", p->n}, {"tau_beta", p->tau_beta},
                    {"theta_max", p->theta_max}};
    };
    j["head"] = part(plan.head);
    j["tail"] = part(plan.tail);
    j["certified_bound"] = plan.certified_bound;
    j["cost_degree_equivalent"] = plan.cost_degree_equivalent;
    PlanCost c = plan_cost(plan);
    j["real_products"] = c.real_products;
    j["status"] = plan.tolerance_met ? "ok" : "tolerance-not-met";
    return j.dump(2);
}

PropagationPlan to_propagation_plan(const SelectionPlan &plan, const Catalog &catalog, const SpectralShift &shift,
                                    double t) {
    PropagationPlan out;
    out.shift = shift;
    out.total_time = t;
    out.bound = plan.certified_bound;
    if (!plan.head && !plan.tail) {
        return out;
    }
    if (!(shift.beta > 0)) {
        throw InvalidInput("to_propagation_plan: zero spectral half-width with a non-empty plan");
    }
    auto coefficients_of = [&](const PlanPart &p) {
        const MethodRecord *r = catalog.find(p.name);
        if (r == nullptr) {
            throw InvalidInput("plan refers to unknown method " + p.name);
        }
        if (!r->coefficients) {
            throw InvalidInput("method " + p.name +
                               " has no coefficients in this catalog; import them or generate one with 'design'");
        }
        return *r->coefficients;
    };
    std::vector<std::string> names;
    double used = 0;
    if (plan.head) {
        double tau = plan.head->tau_beta / shift.beta;
        if (!plan.tail) {
            tau = t / plan.head->n;
        }
        out.stages.push_back({plan.head->name, coefficients_of(*plan.head), tau, plan.head->n, plan.head->theta_max});
        used = tau * plan.head->n;
        names.push_back(std::to_string(plan.head->n) + "x" + plan.head->name);
    }
    if (plan.tail) {
        out.stages.push_back({plan.tail->name, coefficients_of(*plan.tail), t - used, 1, plan.tail->theta_max});
        names.push_back(plan.tail->name);
    }
    out.method = "splitting";
    for (std::size_t i = 0; i < names.size(); ++i) {
        out.method += (i == 0 ? ":" : "+") + names[i];
    }
    return out;
}

double repetition_crossover(const MethodErrorProfile &a, const MethodErrorProfile &b) {
    double dmu = a.mu - b.mu;
    if (dmu == 0) {
        throw ValidityError("repetition_crossover: equal mu, bounds never cross");
    }
    double n = (b.nu - a.nu) / dmu;
    return n * a.theta_max;
}

}  // namespace splitprop
