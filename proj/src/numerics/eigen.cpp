#include "noneq/numerics/eigen.hpp"

#include "noneq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace noneq::numerics {

double max_asymmetry(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

namespace {

// Off-diagonal sum of squares.
double off_norm2(const Eigen::MatrixXd& a) {
  double s = 0.0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return s;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= vmax - 1e-12 * std::max(1.0, vmax)) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

}  // namespace

Eigensystem sym_eig(const Eigen::MatrixXd& input, const SymEigOptions& options) {
  if (input.rows() != input.cols() || input.rows() == 0)
    throw StructureError("sym_eig: matrix must be square and non-empty");
  const double asym = max_asymmetry(input);
  if (!(asym <= options.symmetry_tol)) {
    std::ostringstream msg;
    msg << "sym_eig: matrix not symmetric, max |A - A^T| = " << asym;
    throw StructureError(msg.str());
  }

  const Eigen::Index n = input.rows();
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale2 = std::max(a.squaredNorm(), std::numeric_limits<double>::min());

  bool converged = n == 1;
  for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
    if (off_norm2(a) <= 1e-32 * scale2) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Negligible against both diagonal entries: zero it without rotating.
        if (sweep > 3 && std::abs(apq) * 1e18 < std::abs(app) &&
            std::abs(apq) * 1e18 < std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && off_norm2(a) > 1e-32 * scale2)
    throw ConvergenceError("sym_eig: Jacobi sweeps did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  Eigensystem es;
  es.eigenvalues.resize(n);
  es.eigenvectors.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    es.eigenvalues[c] = a(order[c], order[c]);
    es.eigenvectors.col(c) = v.col(order[c]);
    fix_sign(es.eigenvectors.col(c));
  }
  return es;
}

Eigen::MatrixXd reassemble(const Eigensystem& es) {
  return es.eigenvectors * es.eigenvalues.asDiagonal() * es.eigenvectors.transpose();
}

}  // namespace noneq::numerics
