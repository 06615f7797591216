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

#ifndef SPLITPROP_ERROR_HPP
#define SPLITPROP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace splitprop {

/// Bad arguments: mismatched dimensions, malformed files, inverted bounds.
class InvalidInput : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A formula was evaluated outside the range where it holds.
class ValidityError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Step size beyond the stability threshold of a splitting sequence.
class OutOfStability : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Numerical procedure that did not reach its target.
class NumericalFailure : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace splitprop

#endif
