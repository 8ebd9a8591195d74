#include "noneq/markov/spectral.hpp"

#include "noneq/errors.hpp"
#include "noneq/numerics/eigen.hpp"

#include <cmath>
#include <sstream>

namespace noneq::markov {

namespace {

void check_distribution(const Eigen::VectorXd& p, Eigen::Index size, const char* what) {
  if (p.size() != size) {
    std::ostringstream msg;
    msg << what << ": distribution has " << p.size() << " entries, expected " << size;
    throw ParameterError(msg.str());
  }
  if (std::abs(p.sum() - 1.0) > 1e-10 || p.minCoeff() < -1e-15)
    throw ParameterError(std::string(what) + ": initial law is not a normalized distribution");
}

void check_time(double k) {
  if (!(k >= 0.0)) throw ParameterError("sampling time k must be non-negative");
}

}  // namespace

SpectralExpansion spectral_expansion(const TransitionOperator& op, const Eigen::VectorXd& p0) {
  const Eigen::Index s = op.matrix.rows();
  check_distribution(p0, s, "spectral_expansion");
  const double db = detailed_balance_residual(op);
  if (db > 1e-9) {
    std::ostringstream msg;
    msg << "spectral_expansion: detailed balance violated (residual " << db << ")";
    throw StructureError(msg.str());
  }

  const Eigen::VectorXd sqrt_p = op.stationary.cwiseSqrt();
  Eigen::MatrixXd sym = sqrt_p.cwiseInverse().asDiagonal() * op.matrix * sqrt_p.asDiagonal();
  sym = 0.5 * (sym + sym.transpose());
  const auto es = numerics::sym_eig(sym);

  SpectralExpansion ex;
  ex.kind = op.kind;
  ex.eigenvalues = es.eigenvalues.reverse();
  Eigen::MatrixXd v = es.eigenvectors.rowwise().reverse();

  // The top mode of S is sqrt(Gibbs); pin it exactly so that u_0 = Gibbs.
  if (v.col(0).dot(sqrt_p) < 0) v.col(0) = -v.col(0);
  if ((v.col(0) - sqrt_p).cwiseAbs().maxCoeff() > 1e-6)
    throw StructureError("spectral_expansion: stationary mode is not the Gibbs law");
  v.col(0) = sqrt_p;
  ex.eigenvalues[0] = op.kind == Dynamics::discrete_heatbath ? 1.0 : 0.0;

  ex.right = sqrt_p.asDiagonal() * v;
  ex.left = sqrt_p.cwiseInverse().asDiagonal() * v;
  ex.right.col(0) = op.stationary;
  ex.left.col(0).setOnes();
  ex.coefficients = ex.coefficients_of(p0);
  return ex;
}

Eigen::VectorXd SpectralExpansion::coefficients_of(const Eigen::VectorXd& q0) const {
  check_distribution(q0, right.rows(), "coefficients_of");
  Eigen::VectorXd c = left.transpose() * q0;
  c[0] = 1.0;
  return c;
}

double mode_factor(Dynamics kind, double eigenvalue, double k) {
  check_time(k);
  if (kind == Dynamics::continuous_glauber) return std::exp(-k * std::abs(eigenvalue));
  if (eigenvalue >= 0.0) return std::pow(eigenvalue, k);
  if (k != std::floor(k))
    throw ParameterError("non-integer k with a negative kernel eigenvalue");
  return std::pow(eigenvalue, k);
}

Eigen::VectorXd evolve_coefficients(const SpectralExpansion& ex, const Eigen::VectorXd& coeffs,
                                    double k) {
  check_time(k);
  Eigen::VectorXd w(coeffs.size());
  w[0] = coeffs[0];
  for (Eigen::Index a = 1; a < coeffs.size(); ++a)
    w[a] = coeffs[a] * mode_factor(ex.kind, ex.eigenvalues[a], k);
  return ex.right * w;
}

Eigen::VectorXd evolve(const SpectralExpansion& ex, double k) {
  return evolve_coefficients(ex, ex.coefficients, k);
}

Eigen::VectorXd lambda_correction(const SpectralExpansion& ex, double k) {
  check_time(k);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(ex.coefficients.size());
  for (Eigen::Index a = 1; a < w.size(); ++a)
    w[a] = ex.coefficients[a] * mode_factor(ex.kind, ex.eigenvalues[a], k);
  return ex.right * w;
}

double mixing_time(const SpectralExpansion& ex) {
  if (ex.eigenvalues.size() < 2) throw StructureError("mixing_time: single-state chain");
  if (ex.kind == Dynamics::continuous_glauber) {
    const double gap = std::abs(ex.eigenvalues[1]);
    if (gap <= 1e-12) throw StructureError("mixing_time: degenerate zero eigenvalue");
    return 1.0 / gap;
  }
  const double second = ex.eigenvalues.tail(ex.eigenvalues.size() - 1).cwiseAbs().maxCoeff();
  if (second >= 1.0 - 1e-12) throw StructureError("mixing_time: degenerate unit eigenvalue");
  if (second == 0.0) return 0.0;
  return 1.0 / std::abs(std::log(second));
}

Eigen::VectorXd finite_k_moment(const SpectralExpansion& ex, const Eigen::MatrixXd& f_table,
                                double k) {
  if (f_table.rows() != ex.right.rows())
    throw ParameterError("finite_k_moment: observable table has the wrong number of states");
  return f_table.transpose() * evolve(ex, k);
}

Eigen::VectorXd mismatch_D(const SpectralExpansion& ex, double k, const Eigen::VectorXd& q0,
                           double k_prime, const Eigen::MatrixXd& f_table) {
  check_time(k);
  check_time(k_prime);
  if (f_table.rows() != ex.right.rows())
    throw ParameterError("mismatch_D: observable table has the wrong number of states");
  const Eigen::VectorXd cq = ex.coefficients_of(q0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(cq.size());
  for (Eigen::Index a = 1; a < w.size(); ++a) {
    w[a] = cq[a] * mode_factor(ex.kind, ex.eigenvalues[a], k_prime) -
           ex.coefficients[a] * mode_factor(ex.kind, ex.eigenvalues[a], k);
  }
  return f_table.transpose() * (ex.right * w);
}

}  // namespace noneq::markov
