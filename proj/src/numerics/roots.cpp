#include "noneq/numerics/roots.hpp"

#include "noneq/errors.hpp"

#include <cmath>
#include <sstream>

namespace noneq::numerics {

double find_root(const std::function<double(double)>& g, double a, double b, double tol) {
  if (!(tol > 0.0)) throw ParameterError("find_root: tol must be positive");
  if (a > b) std::swap(a, b);
  double ga = g(a);
  double gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if (!(std::signbit(ga) != std::signbit(gb)) || std::isnan(ga) || std::isnan(gb)) {
    std::ostringstream msg;
    msg << "find_root: no sign change on [" << a << ", " << b << "] (g(a)=" << ga
        << ", g(b)=" << gb << ")";
    throw BracketError(msg.str());
  }
  while (b - a > tol) {
    const double mid = a + 0.5 * (b - a);
    if (mid <= a || mid >= b) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if (std::signbit(gm) == std::signbit(ga)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
      gb = gm;
    }
  }
  return std::abs(ga) <= std::abs(gb) ? a : b;
}

}  // namespace noneq::numerics
