#include "noneq/boltzmann/mean_field.hpp"

#include "noneq/errors.hpp"
#include "noneq/numerics/eigen.hpp"

#include <cmath>

namespace noneq::boltzmann {

Eigen::MatrixXd mf_correlation_k(const Eigen::VectorXd& spectrum, const Eigen::MatrixXd& init,
                                 double k) {
  const Eigen::Index n = spectrum.size();
  if (init.rows() != n || init.cols() != n)
    throw ParameterError("mf_correlation_k: initial moments must be N x N");
  if (k < 0.0) throw ParameterError("mf_correlation_k: negative sampling time");
  if (n > 0 && spectrum.maxCoeff() >= 1.0)
    throw ParameterError("mf_correlation_k: largest coupling eigenvalue must be below 1");
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const double eq = a == b ? 1.0 / (1.0 - spectrum[a]) : 0.0;
      const double rate = 2.0 - (spectrum[a] + spectrum[b]);
      c(a, b) = init(a, b) * std::exp(-rate * k) - eq * std::expm1(-rate * k);
    }
  return c;
}

Eigen::MatrixXd mf_correlation_matrix(const Eigen::MatrixXd& coupling, const Eigen::MatrixXd& init,
                                      double k) {
  const auto es = numerics::sym_eig(coupling);
  const Eigen::MatrixXd& v = es.eigenvectors;
  const Eigen::MatrixXd projected = v.transpose() * init * v;
  return v * mf_correlation_k(es.eigenvalues, projected, k) * v.transpose();
}

}  // namespace noneq::boltzmann
