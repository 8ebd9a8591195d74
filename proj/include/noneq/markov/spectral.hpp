#pragma once

#include "noneq/markov/operators.hpp"

#include <Eigen/Dense>

namespace noneq::markov {

/// Eigen-expansion of a reversible operator, p(k) = sum_a c_a d_a(k) u_a with
/// d_a(k) = exp(lambda_a k) (continuous) or lambda_a^k (discrete).
///
/// Built from the symmetric similarity transform S = D^{-1/2} U D^{1/2},
/// D = diag(stationary). Right eigenvectors u = D^{1/2} v, left
/// eigenvectors l = D^{-1/2} v, so l_a . u_b = delta_ab. Index 0 is the
/// stationary mode (lambda = 0 or 1), u_0 = Gibbs law, c_0 = 1; the rest
/// follow in order of decreasing eigenvalue.
struct SpectralExpansion {
  Dynamics kind = Dynamics::continuous_glauber;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd right;
  Eigen::MatrixXd left;
  Eigen::VectorXd coefficients;

  const Eigen::VectorXd stationary() const { return right.col(0); }
  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  Eigen::VectorXd coefficients_of(const Eigen::VectorXd& q0) const;
};

/// Throws StructureError if detailed balance fails beyond 1e-9 and
/// ParameterError if p0 is not a normalized distribution.
SpectralExpansion spectral_expansion(const TransitionOperator& op, const Eigen::VectorXd& p0);

/// Decay factor of one mode after time k. Non-integer k on a discrete kernel
/// is accepted only when the eigenvalue is non-negative.
double mode_factor(Dynamics kind, double eigenvalue, double k);

/// p(k) from the expansion's own initial distribution.
Eigen::VectorXd evolve(const SpectralExpansion& ex, double k);
/// p(k) from arbitrary expansion coefficients.
Eigen::VectorXd evolve_coefficients(const SpectralExpansion& ex, const Eigen::VectorXd& coeffs,
                                    double k);

/// Lambda(k, p0) = p(k) - Gibbs, i.e. the alpha > 0 part of the expansion.
Eigen::VectorXd lambda_correction(const SpectralExpansion& ex, double k);

/// 1/|lambda_1| (continuous) or 1/|log|lambda_1|| (discrete). Throws
/// StructureError when the stationary eigenvalue is degenerate.
double mixing_time(const SpectralExpansion& ex);

/// <f>_{k,p0} = sum_a f_a p_a(k) for every column of f_table (2^N rows).
Eigen::VectorXd finite_k_moment(const SpectralExpansion& ex, const Eigen::MatrixXd& f_table,
                                double k);

/// D = <f>_{k', q0} - <f>_{k, p0}, evaluated mode by mode; p0 is the
/// expansion's own initial law.
Eigen::VectorXd mismatch_D(const SpectralExpansion& ex, double k, const Eigen::VectorXd& q0,
                           double k_prime, const Eigen::MatrixXd& f_table);

}  // namespace noneq::markov
