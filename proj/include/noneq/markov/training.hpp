#pragma once

#include "noneq/markov/spectral.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace noneq::markov {

/// The sampling process used to estimate model moments: dynamics, chain
/// length k (in the operator's own time unit) and initial law p0.
struct SamplingProcess {
  Dynamics dynamics = Dynamics::continuous_glauber;
  double k = 1.0;
  Eigen::VectorXd p0;
};

/// Exact <x_i x_j>, <x_i> after the process, flat layout.
Eigen::VectorXd finite_k_moments(const IsingParams& params, const SamplingProcess& process);

/// Ascent direction of the finite-k likelihood surrogate:
/// data moment minus finite-k model moment, per parameter.
Eigen::VectorXd exact_finite_k_gradient(const EnergyTable& table,
                                        const Eigen::VectorXd& data_moments,
                                        const SamplingProcess& process);

struct TrainExactOptions {
  double learning_rate = 1e-2;
  double tol = 1e-10;
  std::size_t max_iters = 2'000'000;
  double divergence_bound = 1e3;
};

struct TrainingReport {
  IsingParams params;
  /// Gradient evaluated at `params`.
  Eigen::VectorXd gradient;
  /// max |gradient|, the moment mismatch at the returned parameters.
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool diverged = false;
  /// max |gradient| before each update (index 0 is the initial model).
  std::vector<double> mismatch_history;
};

/// Gradient ascent theta <- theta + lr * (data - model_k) until the max-norm
/// of the gradient drops to tol, the iteration cap, or |J_ij| exceeds the
/// divergence bound.
TrainingReport train_exact(const IsingParams& init, const Eigen::VectorXd& data_moments,
                           const SamplingProcess& process, const TrainExactOptions& options = {});

struct HessianCheck {
  /// Covariance of the sufficient statistics under the Gibbs law.
  Eigen::MatrixXd covariance;
  /// Log-likelihood Hessian, equal to -covariance for this energy family.
  Eigen::MatrixXd hessian;
  double min_covariance_eigenvalue = 0.0;
  bool concave = false;
};

HessianCheck hessian_check(const EnergyTable& table, double psd_tol = 1e-10);

/// Sampling time k' in [k_lo, k_hi] at which the generated moment of
/// component `component` equals its data value, located by scanning the
/// sign of D(k') + (model_k - data) on n_scan points and refining by
/// bisection. The crossing closest to the training k is returned; nullopt
/// when no sign change exists.
std::optional<double> zero_error_time(const IsingParams& params,
                                      const Eigen::VectorXd& data_moments,
                                      const SamplingProcess& process, const Eigen::VectorXd& q0,
                                      int component, double k_lo, double k_hi,
                                      int n_scan = 400);

}  // namespace noneq::markov
