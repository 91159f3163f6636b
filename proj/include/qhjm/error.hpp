// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qhjm {

/// Input violates a documented precondition (bad shape, bad range, bad file).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure failed to converge or produced an unusable result.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Post-selection onto a register bitstring with (near) zero probability.
class DegenerateProjectionError : public NumericalError {
public:
    explicit DegenerateProjectionError(const std::string& what) : NumericalError(what) {}
};

/// Two random starts did not agree on the projected eigenvector (K > 1).
class AmbiguityError : public NumericalError {
public:
    explicit AmbiguityError(const std::string& what) : NumericalError(what) {}
};

}  // namespace qhjm
