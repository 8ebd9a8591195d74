#pragma once

#include "noneq/markov/state_space.hpp"

#include <Eigen/Dense>

namespace noneq::markov {

enum class Dynamics {
  /// Generator dp/dk = U p with single-flip Glauber rates sigma(-dE)/N.
  continuous_glauber,
  /// Random-site heat bath U = (1/N) sum_i P_i, one site update per step.
  discrete_heatbath,
};

/// Column convention: U(b, a) is the rate or probability of a -> b.
struct TransitionOperator {
  Dynamics kind = Dynamics::continuous_glauber;
  Eigen::MatrixXd matrix;
  /// Gibbs law of the energy the operator was built from.
  Eigen::VectorXd stationary;
};

TransitionOperator build_discrete_heatbath(const EnergyTable& table);
TransitionOperator build_continuous_glauber(const EnergyTable& table);
TransitionOperator build_operator(const EnergyTable& table, Dynamics kind);

/// max_{a,b} |U_ab p_b - U_ba p_a|.
double detailed_balance_residual(const TransitionOperator& op);
/// Max deviation of column sums from 1 (discrete) or 0 (continuous).
double column_sum_residual(const TransitionOperator& op);

}  // namespace noneq::markov
