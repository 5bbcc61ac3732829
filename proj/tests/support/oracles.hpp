#pragma once

// Test-only oracles, independent of the verifier implementations they check.

#include <optional>
#include <vector>

#include "galaxy/spec.hpp"

namespace galaxy::testing {

/// Scalar reference evaluation of a network: plain nested loops, no shared
/// code with galaxy::forward beyond the activation definitions.
std::vector<double> forward_reference(const Network& net, const std::vector<double>& x);

/// Dense grid falsification over the precondition bounding box: returns a
/// violating input if any grid point (spacing `step` per dimension,
/// endpoints included) is a counterexample.
std::optional<std::vector<double>> grid_falsify(const TestCase& tc, double step);

/// Maximum of coeffs . f(x) over the grid (same spacing convention).
double grid_max_linear_out(const Network& net, const Specification& spec,
                           const std::vector<double>& coeffs, double step);

/// Upper bound on the L-infinity Lipschitz constant of x -> coeffs . f(x):
/// product of layer weight-matrix infinity norms.
double lipschitz_bound(const Network& net, const std::vector<double>& coeffs);

}  // namespace galaxy::testing
