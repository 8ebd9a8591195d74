#include "noneq/gaussian/resampling.hpp"

#include "noneq/errors.hpp"
#include "noneq/gaussian/langevin.hpp"

#include <cmath>

namespace noneq::gaussian {

double resampling_error(const Eigen::VectorXd& J, const Eigen::VectorXd& c_hat,
                        const Eigen::VectorXd& m0_gen, double k_prime) {
  if (J.size() != c_hat.size() || J.size() != m0_gen.size())
    throw ParameterError("resampling_error: per-mode vectors differ in length");
  double e2 = 0.0;
  for (Eigen::Index a = 0; a < J.size(); ++a) {
    const double d = mode_variance(J[a], k_prime, m0_gen[a]) - c_hat[a];
    e2 += d * d;
  }
  return e2;
}

std::vector<double> resampling_error_curve(const Eigen::VectorXd& J, const Eigen::VectorXd& c_hat,
                                           const Eigen::VectorXd& m0_gen,
                                           const std::vector<double>& k_primes) {
  std::vector<double> out;
  out.reserve(k_primes.size());
  for (double kp : k_primes) out.push_back(resampling_error(J, c_hat, m0_gen, kp));
  return out;
}

CurveMinimum best_sampling_time(const Eigen::VectorXd& J, const Eigen::VectorXd& c_hat,
                                const Eigen::VectorXd& m0_gen, double k_lo, double k_hi,
                                int n_scan) {
  if (!(k_hi > k_lo) || k_lo < 0.0 || n_scan < 3)
    throw ParameterError("best_sampling_time: invalid scan range");
  auto e = [&](double kp) { return resampling_error(J, c_hat, m0_gen, kp); };
  const double step = (k_hi - k_lo) / (n_scan - 1);
  int best = 0;
  double best_v = e(k_lo);
  for (int i = 1; i < n_scan; ++i) {
    const double v = e(k_lo + step * i);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = k_lo + step * std::max(best - 1, 0);
  double b = k_lo + step * std::min(best + 1, n_scan - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = e(c), fd = e(d);
  for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, b); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = e(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = e(d);
    }
  }
  CurveMinimum m{0.5 * (a + b), e(0.5 * (a + b))};
  if (best_v < m.value) m = {k_lo + step * best, best_v};
  return m;
}

}  // namespace noneq::gaussian
