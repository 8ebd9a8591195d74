#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace noneq::numerics {

enum class HaltReason { completed, diverged, left_domain };

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;
  /// Set when integration stopped early (blow-up or domain exit). The
  /// offending state is kept as the last sample.
  bool diverged = false;
  HaltReason reason = HaltReason::completed;

  const Eigen::VectorXd& back() const { return values.back(); }
  std::size_t size() const { return times.size(); }
};

using VectorField = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

struct OdeOptions {
  double divergence_bound = 1e12;
  /// Optional validity region; leaving it halts with HaltReason::left_domain.
  std::function<bool(const Eigen::VectorXd&)> in_domain;
  /// Keep every n-th step (the initial and final states are always kept).
  std::size_t record_every = 1;
};

/// Classical fixed-step RK4 from t=0 to t_end. The final step is shortened
/// if t_end is not a multiple of dt.
OdeTrajectory integrate_ode(const VectorField& rhs, const Eigen::VectorXd& y0, double t_end,
                            double dt, const OdeOptions& options = {});

}  // namespace noneq::numerics
