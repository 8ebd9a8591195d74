#pragma once

#include <Eigen/Dense>

#include <vector>

namespace noneq::gaussian {

/// Sum over modes of (<x^2>_{k'} - c_hat)^2 for a model with eigenvalues J,
/// sampled for time k' from initial variances m0_gen.
double resampling_error(const Eigen::VectorXd& J, const Eigen::VectorXd& c_hat,
                        const Eigen::VectorXd& m0_gen, double k_prime);

std::vector<double> resampling_error_curve(const Eigen::VectorXd& J, const Eigen::VectorXd& c_hat,
                                           const Eigen::VectorXd& m0_gen,
                                           const std::vector<double>& k_primes);

struct CurveMinimum {
  double k_prime = 0.0;
  double value = 0.0;
};

/// Global minimum of the error curve on [k_lo, k_hi]: grid scan followed by
/// golden-section refinement around the best grid point.
CurveMinimum best_sampling_time(const Eigen::VectorXd& J, const Eigen::VectorXd& c_hat,
                                const Eigen::VectorXd& m0_gen, double k_lo, double k_hi,
                                int n_scan = 2000);

}  // namespace noneq::gaussian
