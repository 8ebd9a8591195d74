#include "noneq/gaussian/langevin.hpp"

#include "noneq/errors.hpp"
#include "noneq/numerics/eigen.hpp"

#include <cmath>

namespace noneq::gaussian {

LangevinMoment langevin_moment(double j_a, double j_b, double k, double init_ab, bool same_mode) {
  if (k < 0.0) throw ParameterError("langevin_moment: negative sampling time");
  LangevinMoment m;
  m.in_domain = k == 0.0 || (j_a > 0.0 && j_b > 0.0);
  m.value = init_ab * std::exp(-(j_a + j_b) * k);
  if (same_mode) m.value += j_a == 0.0 ? 2.0 * k : -std::expm1(-2.0 * j_a * k) / j_a;
  return m;
}

InitialSampler zero_start(int dim) {
  return [dim](numerics::RngStream&) { return Eigen::VectorXd::Zero(dim).eval(); };
}

InitialSampler gaussian_start(const Eigen::VectorXd& variances) {
  if ((variances.array() < 0.0).any()) throw ParameterError("gaussian_start: negative variance");
  const Eigen::VectorXd sd = variances.cwiseSqrt();
  return [sd](numerics::RngStream& rng) {
    Eigen::VectorXd x(sd.size());
    for (Eigen::Index i = 0; i < x.size(); i += 2) {
      const auto [g0, g1] = rng.gaussian_pair();
      x[i] = sd[i] * g0;
      if (i + 1 < x.size()) x[i + 1] = sd[i + 1] * g1;
    }
    return x;
  };
}

std::vector<LangevinSnapshot> simulate_langevin_mc(const Eigen::MatrixXd& coupling,
                                                   const InitialSampler& init,
                                                   const std::vector<double>& record_k,
                                                   const LangevinMcOptions& options) {
  const Eigen::Index d = coupling.rows();
  if (d == 0 || coupling.cols() != d) throw ParameterError("simulate_langevin_mc: J must be square");
  if (!(options.dt > 0.0)) throw ParameterError("simulate_langevin_mc: dt must be positive");
  if (options.n_chains < 2) throw ParameterError("simulate_langevin_mc: need at least two chains");
  const double rate = numerics::sym_eig(coupling).eigenvalues.cwiseAbs().maxCoeff();
  if (options.dt * rate > 0.1)
    throw ParameterError("simulate_langevin_mc: unstable step, dt * max|J| exceeds 0.1");

  std::vector<std::uint64_t> steps;
  for (double k : record_k) {
    if (k < 0.0) throw ParameterError("simulate_langevin_mc: negative sampling time");
    const double n = std::round(k / options.dt);
    if (std::abs(n * options.dt - k) > 1e-9 * std::max(1.0, k))
      throw ParameterError("simulate_langevin_mc: sampling times must be multiples of dt");
    if (!steps.empty() && static_cast<std::uint64_t>(n) < steps.back())
      throw ParameterError("simulate_langevin_mc: sampling times must be non-decreasing");
    steps.push_back(static_cast<std::uint64_t>(n));
  }

  const std::size_t r = steps.size();
  std::vector<Eigen::VectorXd> s1(r, Eigen::VectorXd::Zero(d)), s1sq(r, Eigen::VectorXd::Zero(d));
  std::vector<Eigen::MatrixXd> s2(r, Eigen::MatrixXd::Zero(d, d)), s2sq(r, Eigen::MatrixXd::Zero(d, d));

  const bool diagonal = coupling.isDiagonal(0.0);
  const Eigen::VectorXd jdiag = coupling.diagonal();
  const double noise = std::sqrt(2.0 * options.dt);
  const double dt = options.dt;
  Eigen::VectorXd drift(d), xi(d);
  for (std::size_t c = 0; c < options.n_chains; ++c) {
    numerics::RngStream rng(options.seed, options.stream_base + c);
    Eigen::VectorXd x = init(rng);
    if (x.size() != d) throw ParameterError("simulate_langevin_mc: sampler dimension mismatch");
    std::uint64_t done = 0;
    for (std::size_t t = 0; t < r; ++t) {
      for (; done < steps[t]; ++done) {
        for (Eigen::Index i = 0; i < d; i += 2) {
          const auto [g0, g1] = rng.gaussian_pair();
          xi[i] = g0;
          if (i + 1 < d) xi[i + 1] = g1;
        }
        if (diagonal) {
          for (Eigen::Index i = 0; i < d; ++i) x[i] += -jdiag[i] * x[i] * dt + noise * xi[i];
        } else {
          drift.noalias() = coupling * x;
          x += -dt * drift + noise * xi;
        }
      }
      for (Eigen::Index a = 0; a < d; ++a) {
        s1[t][a] += x[a];
        s1sq[t][a] += x[a] * x[a];
        for (Eigen::Index b = 0; b < d; ++b) {
          const double p = x[a] * x[b];
          s2[t](a, b) += p;
          s2sq[t](a, b) += p * p;
        }
      }
    }
  }

  const double m = static_cast<double>(options.n_chains);
  std::vector<LangevinSnapshot> out(r);
  for (std::size_t t = 0; t < r; ++t) {
    auto& snap = out[t];
    snap.k = static_cast<double>(steps[t]) * dt;
    snap.mean = s1[t] / m;
    snap.second = s2[t] / m;
    const Eigen::ArrayXd var1 = (s1sq[t] / m).array() - snap.mean.array().square();
    snap.mean_se = (var1.max(0.0) / (m - 1.0)).sqrt().matrix();
    const Eigen::ArrayXXd var2 = (s2sq[t] / m).array() - snap.second.array().square();
    snap.second_se = (var2.max(0.0) / (m - 1.0)).sqrt().matrix();
  }
  return out;
}

}  // namespace noneq::gaussian
