#pragma once

#include "noneq/numerics/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace noneq::gaussian {

struct LangevinMoment {
  double value = 0.0;
  /// False when a mode with J <= 0 was evolved for positive time.
  bool in_domain = true;
};

/// Second moment <x_a x_b> after time k of dx = -J x dt + sqrt(2) dW, in the
/// eigenbasis of J. `same_mode` adds the noise-driven diagonal term.
LangevinMoment langevin_moment(double j_a, double j_b, double k, double init_ab, bool same_mode);

/// Diagonal shorthand: <x^2>_k for a single mode started at <x^2>_0 = m0.
inline double mode_variance(double j, double k, double m0) {
  return langevin_moment(j, j, k, m0, true).value;
}

using InitialSampler = std::function<Eigen::VectorXd(numerics::RngStream&)>;

/// Sampler that starts every chain at the origin.
InitialSampler zero_start(int dim);
/// Independent centered Gaussian start with the given per-coordinate variances.
InitialSampler gaussian_start(const Eigen::VectorXd& variances);

struct LangevinMcOptions {
  std::size_t n_chains = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
};

struct LangevinSnapshot {
  double k = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd mean_se;
  Eigen::MatrixXd second;
  Eigen::MatrixXd second_se;
};

/// Euler-Maruyama estimate of first and second moments at each time in
/// `record_k` (must be non-decreasing multiples of dt). Chain c draws from
/// stream (seed, stream_base + c). Rejects dt * max|eig(J)| > 0.1.
std::vector<LangevinSnapshot> simulate_langevin_mc(const Eigen::MatrixXd& coupling,
                                                   const InitialSampler& init,
                                                   const std::vector<double>& record_k,
                                                   const LangevinMcOptions& options = {});

}  // namespace noneq::gaussian
