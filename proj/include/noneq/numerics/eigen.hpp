#pragma once

#include <Eigen/Dense>

namespace noneq::numerics {

/// Spectrum of a real symmetric matrix. Eigenvalues ascend; column `a` of
/// `eigenvectors` pairs with `eigenvalues[a]`. Each eigenvector has its
/// largest-magnitude component positive (first such index on ties).
struct Eigensystem {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

struct SymEigOptions {
  double symmetry_tol = 1e-12;
  int max_sweeps = 100;
};

/// Largest |A_ij - A_ji|.
double max_asymmetry(const Eigen::MatrixXd& a);

/// Cyclic Jacobi diagonalization. Throws StructureError for non-square or
/// non-symmetric input and ConvergenceError past the sweep cap.
Eigensystem sym_eig(const Eigen::MatrixXd& a, const SymEigOptions& options = {});

/// V diag(lambda) V^T.
Eigen::MatrixXd reassemble(const Eigensystem& es);

}  // namespace noneq::numerics
