#include "noneq/ising.hpp"

#include "noneq/errors.hpp"

#include <sstream>

namespace noneq {

IsingParams IsingParams::zeros(int n) {
  return {Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
}

void IsingParams::validate() const {
  const auto n = h.size();
  if (J.rows() != n || J.cols() != n) {
    std::ostringstream msg;
    msg << "IsingParams: J is " << J.rows() << "x" << J.cols() << " but h has " << n
        << " entries";
    throw StructureError(msg.str());
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (J(i, i) != 0.0) throw StructureError("IsingParams: J diagonal must be zero");
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (J(i, j) != J(j, i)) throw StructureError("IsingParams: J must be symmetric");
  }
}

int pair_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  // Pairs before row i: sum_{r<i} (n-1-r).
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_at(int p, int n) {
  int i = 0;
  while (p >= n - 1 - i) {
    p -= n - 1 - i;
    ++i;
  }
  return {i, i + 1 + p};
}

Eigen::VectorXd flatten(const IsingParams& params) {
  const int n = params.n_spins();
  Eigen::VectorXd theta(num_parameters(n));
  int p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) theta[p++] = params.J(i, j);
  theta.tail(n) = params.h;
  return theta;
}

IsingParams unflatten(const Eigen::VectorXd& theta, int n) {
  if (theta.size() != num_parameters(n))
    throw StructureError("unflatten: parameter vector has the wrong length");
  IsingParams params = IsingParams::zeros(n);
  int p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) params.J(i, j) = params.J(j, i) = theta[p++];
  params.h = theta.tail(n);
  return params;
}

double energy(const IsingParams& params, const Eigen::Ref<const Eigen::VectorXd>& x) {
  // J has zero diagonal, so x^T J x counts every i<j pair twice.
  return -0.5 * x.dot(params.J * x) - params.h.dot(x);
}

}  // namespace noneq
