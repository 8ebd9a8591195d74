#include "noneq/numerics/ode.hpp"

#include "noneq/errors.hpp"

#include <cmath>

namespace noneq::numerics {

namespace {

bool blown_up(const Eigen::VectorXd& y, double bound) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (!std::isfinite(y[i]) || std::abs(y[i]) > bound) return true;
  return false;
}

}  // namespace

OdeTrajectory integrate_ode(const VectorField& rhs, const Eigen::VectorXd& y0, double t_end,
                            double dt, const OdeOptions& options) {
  if (!(dt > 0.0)) throw ParameterError("integrate_ode: dt must be positive");
  if (!(t_end >= 0.0)) throw ParameterError("integrate_ode: t_end must be non-negative");
  const std::size_t every = options.record_every == 0 ? 1 : options.record_every;

  OdeTrajectory traj;
  traj.times.push_back(0.0);
  traj.values.push_back(y0);

  const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  Eigen::VectorXd y = y0;
  double t = 0.0;
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const double t_next = step == n_steps ? t_end : static_cast<double>(step) * dt;
    const double h = t_next - t;
    const Eigen::VectorXd k1 = rhs(t, y);
    const Eigen::VectorXd k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
    const Eigen::VectorXd k4 = rhs(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t_next;

    HaltReason halt = HaltReason::completed;
    if (blown_up(y, options.divergence_bound))
      halt = HaltReason::diverged;
    else if (options.in_domain && !options.in_domain(y))
      halt = HaltReason::left_domain;

    if (halt != HaltReason::completed || step % every == 0 || step == n_steps) {
      traj.times.push_back(t);
      traj.values.push_back(y);
    }
    if (halt != HaltReason::completed) {
      traj.diverged = true;
      traj.reason = halt;
      break;
    }
  }
  return traj;
}

}  // namespace noneq::numerics
