#include "noneq/gaussian/flow.hpp"

#include "noneq/errors.hpp"
#include "noneq/numerics/roots.hpp"

#include <cmath>
#include <sstream>

namespace noneq::gaussian {

namespace {

void check_mode(double c_hat, double m0) {
  if (!(c_hat > 0.0)) throw ParameterError("data spectral moment c_hat must be positive");
  if (!(m0 >= 0.0)) throw ParameterError("initial second moment m0 must be non-negative");
}

}  // namespace

double eigen_flow_rhs(const ModeState& s, double k) {
  if (s.J == 0.0) throw NumericalError("eigen_flow_rhs: singular at J = 0");
  if (k < 0.0) throw ParameterError("eigen_flow_rhs: negative sampling time");
  const double e = std::exp(-2.0 * s.J * k);
  // (1 - e)/J written with expm1 so small J k stays accurate.
  return -s.c_hat - std::expm1(-2.0 * s.J * k) / s.J + s.m0 * e;
}

double fixed_point_function(double J, double c_hat, double m0, double k) {
  return J * c_hat + std::expm1(-2.0 * J * k) - J * m0 * std::exp(-2.0 * J * k);
}

double divergence_threshold(double c_hat, double m0) { return 0.5 * (c_hat - m0); }

std::optional<double> inflection_point(double m0, double k) {
  if (!(m0 > 0.0) || !(k > 0.0)) return std::nullopt;
  return (k * m0 + 1.0) / (k * m0);
}

double fixed_point(double c_hat, double m0, double k) {
  check_mode(c_hat, m0);
  const double k_star = divergence_threshold(c_hat, m0);
  if (!(k > 0.0) || k <= k_star) {
    std::ostringstream msg;
    msg << "fixed_point: k = " << k << " is not above the divergence threshold k* = "
        << std::max(k_star, 0.0);
    throw ThresholdError(msg.str(), k_star);
  }
  auto g = [&](double J) { return fixed_point_function(J, c_hat, m0, k); };
  const double lo = 1e-8;
  double hi = std::max(10.0 / c_hat, 10.0 * m0 + 10.0);
  for (int i = 0; i < 60 && g(hi) <= 0.0; ++i) hi *= 2.0;
  return numerics::find_root(g, lo, hi, 1e-15 * hi);
}

double relaxation_time(double c_hat, double m0, double k) {
  const double J = fixed_point(c_hat, m0, k);
  const double e = std::exp(-2.0 * k * J);
  const double rate = -std::expm1(-2.0 * k * J) / (J * J) + 2.0 * k * e * (m0 - 1.0 / J);
  if (!(rate > 0.0)) throw NumericalError("relaxation_time: fixed point is not attracting");
  return 1.0 / rate;
}

numerics::OdeTrajectory integrate_mode_flow(const ModeState& init, double k, double t_end,
                                            double dt, std::size_t record_every) {
  check_mode(init.c_hat, init.m0);
  if (!init.valid()) throw ParameterError("integrate_mode_flow: initial J must be positive");
  ModeState s = init;
  auto rhs = [&](double, const Eigen::VectorXd& y) {
    s.J = y[0];
    return Eigen::VectorXd::Constant(1, y[0] > 0.0 ? eigen_flow_rhs(s, k) : 0.0);
  };
  numerics::OdeOptions opts;
  opts.record_every = record_every;
  opts.in_domain = [](const Eigen::VectorXd& y) { return y[0] > 0.0; };
  return numerics::integrate_ode(rhs, Eigen::VectorXd::Constant(1, init.J), t_end, dt, opts);
}

ExponentialFit fit_exponential_tail(const numerics::OdeTrajectory& traj, double target, double lo,
                                    double hi, int component) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double dev = std::abs(traj.values[i][component] - target);
    if (dev < lo || dev > hi) continue;
    const double t = traj.times[i], y = std::log(dev);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++n;
  }
  if (n < 3) throw NumericalError("fit_exponential_tail: fewer than three points in the window");
  const double nn = static_cast<double>(n);
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  if (!(slope < 0.0)) throw NumericalError("fit_exponential_tail: tail is not decaying");
  ExponentialFit fit;
  fit.tau = -1.0 / slope;
  fit.amplitude = std::exp((sy - slope * sx) / nn);
  fit.n_points = n;
  return fit;
}

}  // namespace noneq::gaussian
