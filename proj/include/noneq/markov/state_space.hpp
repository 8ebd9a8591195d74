#pragma once

#include "noneq/ising.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace noneq::markov {

/// Largest N for which energies and Gibbs weights are enumerated.
inline constexpr int kMaxEnumerationSpins = 20;
/// Largest N for which dense 2^N x 2^N operators are built.
inline constexpr int kMaxDenseSpins = 12;

/// Configurations of N spins indexed little-endian: bit i of state a is 1
/// iff spin i is +1.
class SpinStateSpace {
 public:
  explicit SpinStateSpace(int n_spins);

  int n_spins() const { return n_; }
  std::size_t size() const { return std::size_t{1} << n_; }

  static int spin(std::size_t state, int i) { return ((state >> i) & 1u) ? 1 : -1; }
  Eigen::VectorXd configuration(std::size_t state) const;
  std::size_t index(const Eigen::Ref<const Eigen::VectorXd>& config) const;

 private:
  int n_;
};

struct EnergyTable {
  IsingParams params;
  Eigen::VectorXd energies;

  int n_spins() const { return params.n_spins(); }
  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
};

EnergyTable energy_table(const IsingParams& params);

struct GibbsDistribution {
  Eigen::VectorXd probabilities;
  double log_partition = 0.0;
};

GibbsDistribution gibbs_distribution(const EnergyTable& table);

/// Per-state sufficient statistics, 2^N rows by num_parameters(N) columns:
/// x_i x_j for i<j, then x_i (see noneq::flatten for the layout).
Eigen::MatrixXd observable_table(int n_spins);

/// Exact Gibbs averages of the sufficient statistics.
Eigen::VectorXd gibbs_moments(const IsingParams& params);

Eigen::VectorXd uniform_distribution(int n_spins);

}  // namespace noneq::markov
