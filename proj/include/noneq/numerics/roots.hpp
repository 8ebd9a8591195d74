#pragma once

#include <functional>

namespace noneq::numerics {

/// Bisection on [a, b]; requires g(a) and g(b) of opposite sign (an exact
/// zero at an endpoint is returned directly). Stops when the bracket is
/// narrower than tol or cannot be split further in double precision.
double find_root(const std::function<double(double)>& g, double a, double b, double tol);

}  // namespace noneq::numerics
