#pragma once

#include "noneq/numerics/ode.hpp"

#include <optional>

namespace noneq::gaussian {

struct ModeState {
  double J = 1.0;
  double c_hat = 1.0;
  double m0 = 0.0;
  double cross0 = 0.0;

  bool valid() const { return J > 0.0; }
};

/// dJ/dt for one eigenvalue under gradient ascent with k-time Langevin samples.
double eigen_flow_rhs(const ModeState& state, double k);

/// g(J) = J c_hat - 1 + exp(-2Jk)(1 - J m0); its positive root is the fixed point.
double fixed_point_function(double J, double c_hat, double m0, double k);

/// Sampling time below which the flow drives J through zero.
double divergence_threshold(double c_hat, double m0);

/// (k m0 + 1)/(k m0), where the slope of g changes sign; empty for m0 = 0.
std::optional<double> inflection_point(double m0, double k);

/// Positive root of g. Throws ThresholdError when k <= divergence_threshold.
double fixed_point(double c_hat, double m0, double k);

/// Linearized relaxation time 1 / |dF/dJ| at the fixed point.
double relaxation_time(double c_hat, double m0, double k);

/// Default training step 1e-3 / c_hat.
inline double default_flow_dt(double c_hat) { return 1e-3 / c_hat; }

/// Integrates the eigenvalue flow from `init.J`; halts with left_domain when J <= 0.
numerics::OdeTrajectory integrate_mode_flow(const ModeState& init, double k, double t_end,
                                            double dt, std::size_t record_every = 1);

struct ExponentialFit {
  double amplitude = 0.0;
  double tau = 0.0;
  std::size_t n_points = 0;
};

/// Least-squares fit of |y(t) - target| = A exp(-t/tau) over the samples
/// whose distance to target lies in [lo, hi].
ExponentialFit fit_exponential_tail(const numerics::OdeTrajectory& trajectory, double target,
                                    double lo = 1e-10, double hi = 1e-4, int component = 0);

}  // namespace noneq::gaussian
