#include "noneq/markov/operators.hpp"

#include "noneq/errors.hpp"

#include <cmath>
#include <sstream>

namespace noneq::markov {

namespace {

void check_dense_capacity(int n) {
  if (n > kMaxDenseSpins) {
    std::ostringstream msg;
    msg << "dense operator for N=" << n << " exceeds the bound " << kMaxDenseSpins;
    throw CapacityError(msg.str());
  }
}

// Single-flip rates sigma(E_a - E_b)/N; the diagonal is left at zero.
Eigen::MatrixXd flip_rates(const EnergyTable& table) {
  const int n = table.n_spins();
  check_dense_capacity(n);
  const auto s = static_cast<Eigen::Index>(table.size());
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(s, s);
  const double inv_n = 1.0 / n;
  for (Eigen::Index a = 0; a < s; ++a) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Index b = a ^ (Eigen::Index{1} << i);
      u(b, a) = inv_n / (1.0 + std::exp(table.energies[b] - table.energies[a]));
    }
  }
  return u;
}

}  // namespace

TransitionOperator build_discrete_heatbath(const EnergyTable& table) {
  TransitionOperator op{Dynamics::discrete_heatbath, flip_rates(table),
                        gibbs_distribution(table).probabilities};
  for (Eigen::Index a = 0; a < op.matrix.cols(); ++a)
    op.matrix(a, a) = 1.0 - op.matrix.col(a).sum();
  return op;
}

TransitionOperator build_continuous_glauber(const EnergyTable& table) {
  TransitionOperator op{Dynamics::continuous_glauber, flip_rates(table),
                        gibbs_distribution(table).probabilities};
  for (Eigen::Index a = 0; a < op.matrix.cols(); ++a) op.matrix(a, a) = -op.matrix.col(a).sum();
  return op;
}

TransitionOperator build_operator(const EnergyTable& table, Dynamics kind) {
  return kind == Dynamics::discrete_heatbath ? build_discrete_heatbath(table)
                                             : build_continuous_glauber(table);
}

double detailed_balance_residual(const TransitionOperator& op) {
  const auto& u = op.matrix;
  const auto& p = op.stationary;
  double worst = 0.0;
  for (Eigen::Index a = 0; a < u.rows(); ++a)
    for (Eigen::Index b = a + 1; b < u.cols(); ++b)
      worst = std::max(worst, std::abs(u(a, b) * p[b] - u(b, a) * p[a]));
  return worst;
}

double column_sum_residual(const TransitionOperator& op) {
  const double target = op.kind == Dynamics::discrete_heatbath ? 1.0 : 0.0;
  return (op.matrix.colwise().sum().array() - target).abs().maxCoeff();
}

}  // namespace noneq::markov
