#include "noneq/markov/training.hpp"

#include "noneq/errors.hpp"
#include "noneq/numerics/eigen.hpp"
#include "noneq/numerics/roots.hpp"

#include <cmath>

namespace noneq::markov {

namespace {

Eigen::VectorXd model_moments(const EnergyTable& table, const Eigen::MatrixXd& f_table,
                              const SamplingProcess& process) {
  const auto op = build_operator(table, process.dynamics);
  const auto ex = spectral_expansion(op, process.p0);
  return finite_k_moment(ex, f_table, process.k);
}

void check_data(const Eigen::VectorXd& data, int n) {
  if (data.size() != num_parameters(n))
    throw ParameterError("data moments must hold N(N-1)/2 pair and N field entries");
}

}  // namespace

Eigen::VectorXd finite_k_moments(const IsingParams& params, const SamplingProcess& process) {
  return model_moments(energy_table(params), observable_table(params.n_spins()), process);
}

Eigen::VectorXd exact_finite_k_gradient(const EnergyTable& table,
                                        const Eigen::VectorXd& data_moments,
                                        const SamplingProcess& process) {
  check_data(data_moments, table.n_spins());
  return data_moments - model_moments(table, observable_table(table.n_spins()), process);
}

TrainingReport train_exact(const IsingParams& init, const Eigen::VectorXd& data_moments,
                           const SamplingProcess& process, const TrainExactOptions& options) {
  if (!(options.learning_rate > 0.0)) throw ParameterError("train_exact: learning rate must be positive");
  const int n = init.n_spins();
  check_data(data_moments, n);
  const Eigen::MatrixXd f_table = observable_table(n);

  Eigen::VectorXd theta = flatten(init);
  TrainingReport report;
  for (std::size_t it = 0;; ++it) {
    const IsingParams params = unflatten(theta, n);
    Eigen::VectorXd grad;
    try {
      grad = data_moments - model_moments(energy_table(params), f_table, process);
    } catch (const StructureError&) {
      // The spectrum can no longer be resolved at these couplings.
      if (it == 0) throw;
      report.diverged = true;
      break;
    }
    const double residual = grad.cwiseAbs().maxCoeff();
    report.mismatch_history.push_back(residual);
    report.params = params;
    report.gradient = grad;
    report.residual = residual;
    report.iterations = it;
    if (residual <= options.tol) {
      report.converged = true;
      break;
    }
    if (it >= options.max_iters) break;
    theta += options.learning_rate * grad;
    if (!theta.allFinite() ||
        theta.head(num_pairs(n)).cwiseAbs().maxCoeff() > options.divergence_bound) {
      // Keep the last finite iterate, whose gradient is the one stored.
      report.diverged = true;
      break;
    }
  }
  return report;
}

HessianCheck hessian_check(const EnergyTable& table, double psd_tol) {
  const auto gibbs = gibbs_distribution(table);
  const Eigen::MatrixXd f = observable_table(table.n_spins());
  const Eigen::VectorXd mean = f.transpose() * gibbs.probabilities;
  const Eigen::MatrixXd centered = f.rowwise() - mean.transpose();
  HessianCheck check;
  check.covariance = centered.transpose() * gibbs.probabilities.asDiagonal() * centered;
  check.covariance = 0.5 * (check.covariance + check.covariance.transpose());
  check.hessian = -check.covariance;
  check.min_covariance_eigenvalue = numerics::sym_eig(check.covariance).eigenvalues.minCoeff();
  check.concave = check.min_covariance_eigenvalue >= -psd_tol;
  return check;
}

std::optional<double> zero_error_time(const IsingParams& params,
                                      const Eigen::VectorXd& data_moments,
                                      const SamplingProcess& process, const Eigen::VectorXd& q0,
                                      int component, double k_lo, double k_hi, int n_scan) {
  const int n = params.n_spins();
  check_data(data_moments, n);
  if (component < 0 || component >= num_parameters(n))
    throw ParameterError("zero_error_time: component out of range");
  if (!(k_hi > k_lo) || k_lo < 0.0 || n_scan < 2)
    throw ParameterError("zero_error_time: invalid scan range");

  const auto op = build_operator(energy_table(params), process.dynamics);
  const auto ex = spectral_expansion(op, process.p0);
  const Eigen::MatrixXd f = observable_table(n).col(component);
  const double offset = finite_k_moment(ex, f, process.k)[0] - data_moments[component];
  auto error_at = [&](double k_prime) {
    return mismatch_D(ex, process.k, q0, k_prime, f)[0] + offset;
  };

  std::optional<double> best;
  double prev_k = k_lo;
  double prev_e = error_at(k_lo);
  for (int s = 1; s < n_scan; ++s) {
    const double kk = k_lo + (k_hi - k_lo) * s / (n_scan - 1);
    const double e = error_at(kk);
    if (prev_e == 0.0 || std::signbit(prev_e) != std::signbit(e)) {
      const double root =
          prev_e == 0.0 ? prev_k : numerics::find_root(error_at, prev_k, kk, 1e-13);
      if (!best || std::abs(root - process.k) < std::abs(*best - process.k)) best = root;
    }
    prev_k = kk;
    prev_e = e;
  }
  return best;
}

}  // namespace noneq::markov
