// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ftr {

/// A series or continued fraction failed to converge within its iteration cap.
/// Carries the partial value and the last term magnitude as an error bound.
class convergence_error : public std::runtime_error {
  public:
    convergence_error(const std::string& kernel, double partial, double bound, long iterations)
        : std::runtime_error(kernel + ": no convergence after " + std::to_string(iterations) +
                             " iterations (partial=" + std::to_string(partial) +
                             ", bound=" + std::to_string(bound) + ")"),
          kernel_name(kernel), partial_value(partial), error_bound(bound), iterations_used(iterations) {}

    std::string kernel_name;
    double partial_value;
    double error_bound;
    long iterations_used;
};

/// An internal identity that must hold by construction was violated
/// (e.g. the imaginary residue of a d_j assembly). Signals an implementation
/// defect, not a caller error.
class consistency_error : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

}  // namespace ftr
