#pragma once

#include <Eigen/Dense>

namespace noneq::boltzmann {

/// Linearized heat-bath correlations in the eigenbasis of J, time in sweeps:
/// C_ab(k) = d_ab/(1-J_a) + (C_ab(0) - d_ab/(1-J_a)) exp(-(2 - J_a - J_b) k).
/// Throws ParameterError when max J_a >= 1.
Eigen::MatrixXd mf_correlation_k(const Eigen::VectorXd& spectrum, const Eigen::MatrixXd& init,
                                 double k);

/// Same in the spin basis: projects `init` on the eigenvectors of J and back.
Eigen::MatrixXd mf_correlation_matrix(const Eigen::MatrixXd& coupling, const Eigen::MatrixXd& init,
                                      double k);

}  // namespace noneq::boltzmann
