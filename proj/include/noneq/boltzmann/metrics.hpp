#pragma once

#include "noneq/boltzmann/sampler.hpp"

namespace noneq::boltzmann {

/// Mean squared difference of pair correlations over the N(N-1)/2 pairs.
double correlation_error(const MomentEstimate& gen, const MomentEstimate& data);
double correlation_error(const Eigen::VectorXd& gen_pairs, const Eigen::VectorXd& data_pairs);

/// Root mean square over upper-triangle entries.
double coupling_error(const Eigen::MatrixXd& inferred, const Eigen::MatrixXd& truth);

}  // namespace noneq::boltzmann
