#include "noneq/boltzmann/metrics.hpp"

#include "noneq/errors.hpp"

namespace noneq::boltzmann {

double correlation_error(const Eigen::VectorXd& gen_pairs, const Eigen::VectorXd& data_pairs) {
  if (gen_pairs.size() != data_pairs.size())
    throw ParameterError("correlation_error: moment vectors differ in size");
  if (gen_pairs.size() == 0) return 0.0;
  return (gen_pairs - data_pairs).squaredNorm() / static_cast<double>(gen_pairs.size());
}

double correlation_error(const MomentEstimate& gen, const MomentEstimate& data) {
  if (gen.n_spins() != data.n_spins())
    throw ParameterError("correlation_error: estimates differ in the number of spins");
  return correlation_error(gen.correlations, data.correlations);
}

double coupling_error(const Eigen::MatrixXd& inferred, const Eigen::MatrixXd& truth) {
  if (inferred.rows() != truth.rows() || inferred.cols() != truth.cols() ||
      inferred.rows() != inferred.cols())
    throw ParameterError("coupling_error: matrices must be square and of equal shape");
  const Eigen::Index n = inferred.rows();
  if (n < 2) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = inferred(i, j) - truth(i, j);
      s += d * d;
    }
  return std::sqrt(s / static_cast<double>(n * (n - 1) / 2));
}

}  // namespace noneq::boltzmann
