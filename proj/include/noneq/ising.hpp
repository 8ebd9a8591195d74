#pragma once

#include <Eigen/Dense>

#include <utility>

namespace noneq {

/// Pairwise binary model E(x) = -sum_{i<j} J_ij x_i x_j - sum_i h_i x_i
/// over x in {-1,+1}^N. J is symmetric with an exactly zero diagonal.
struct IsingParams {
  Eigen::MatrixXd J;
  Eigen::VectorXd h;

  static IsingParams zeros(int n);
  int n_spins() const { return static_cast<int>(h.size()); }
  /// Throws StructureError unless J is N x N, symmetric, zero-diagonal.
  void validate() const;
  bool is_finite() const { return J.allFinite() && h.allFinite(); }
};

// Flat parameter / sufficient-statistic layout shared by every trainer:
// the N(N-1)/2 pairs (i<j) in row-major order, followed by the N fields.
inline int num_pairs(int n) { return n * (n - 1) / 2; }
inline int num_parameters(int n) { return num_pairs(n) + n; }
int pair_index(int i, int j, int n);
std::pair<int, int> pair_at(int p, int n);

Eigen::VectorXd flatten(const IsingParams& params);
IsingParams unflatten(const Eigen::VectorXd& theta, int n);

/// Energy of one configuration (entries +-1).
double energy(const IsingParams& params, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace noneq
