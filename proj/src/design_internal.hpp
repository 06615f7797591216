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

#ifndef SPLITPROP_SRC_DESIGN_INTERNAL_HPP
#define SPLITPROP_SRC_DESIGN_INTERNAL_HPP

#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "chebyshev.hpp"
#include "splitprop/designer.hpp"

namespace splitprop {
namespace detail {

/// About 50 significant digits. C^2 + S^2 - 1 is of the size of eps^2 while
/// C and S are of order one, so the defect needs far more digits than C.
using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                           boost::multiprecision::et_off>;
using Series = cheb::Series<Real>;

}  // namespace detail

struct CandidateWide {
    detail::Series c;
    detail::Series s;
};

namespace detail {

/// Wide coefficients of a candidate, widened from long double when absent.
Series wide_c(const CandidateP &p);
Series wide_s(const CandidateP &p);
CandidateP make_candidate(Series c, Series s, double theta, std::vector<double> nodes);

/// C^2 + S^2 - 1 with odd coefficients cleared.
Series defect(const CandidateP &p);

/// Q = V W^2 with W either the monic node polynomial or x^k.
struct Deflation {
    Series q;
    Series v;
    Series w;
    /// Roots of W in x units.
    std::vector<Real> w_roots;
    double residual = 0;
};

/// Splits off the node (or zero-root) double factors of the defect.
Deflation deflate(const CandidateP &p);

/// Monic real polynomial with the given real roots.
Series real_from_roots(const std::vector<Real> &roots);

}  // namespace detail
}  // namespace splitprop

#endif
