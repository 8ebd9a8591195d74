#include "noneq/markov/state_space.hpp"

#include "noneq/errors.hpp"

#include <cmath>
#include <sstream>

namespace noneq::markov {

SpinStateSpace::SpinStateSpace(int n_spins) : n_(n_spins) {
  if (n_spins < 1) throw ParameterError("SpinStateSpace: need at least one spin");
  if (n_spins > kMaxEnumerationSpins) {
    std::ostringstream msg;
    msg << "SpinStateSpace: N=" << n_spins << " exceeds the enumeration bound "
        << kMaxEnumerationSpins;
    throw CapacityError(msg.str());
  }
}

Eigen::VectorXd SpinStateSpace::configuration(std::size_t state) const {
  Eigen::VectorXd x(n_);
  for (int i = 0; i < n_; ++i) x[i] = spin(state, i);
  return x;
}

std::size_t SpinStateSpace::index(const Eigen::Ref<const Eigen::VectorXd>& config) const {
  std::size_t a = 0;
  for (int i = 0; i < n_; ++i)
    if (config[i] > 0) a |= std::size_t{1} << i;
  return a;
}

EnergyTable energy_table(const IsingParams& params) {
  params.validate();
  const SpinStateSpace space(params.n_spins());
  const int n = space.n_spins();
  EnergyTable table{params, Eigen::VectorXd(static_cast<Eigen::Index>(space.size()))};
  for (std::size_t a = 0; a < space.size(); ++a) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const int si = SpinStateSpace::spin(a, i);
      e -= params.h[i] * si;
      for (int j = i + 1; j < n; ++j) e -= params.J(i, j) * si * SpinStateSpace::spin(a, j);
    }
    table.energies[static_cast<Eigen::Index>(a)] = e;
  }
  return table;
}

GibbsDistribution gibbs_distribution(const EnergyTable& table) {
  SpinStateSpace{table.n_spins()};
  const double emin = table.energies.minCoeff();
  Eigen::VectorXd w = (-(table.energies.array() - emin)).exp();
  const double z = w.sum();
  return {w / z, std::log(z) - emin};
}

Eigen::MatrixXd observable_table(int n_spins) {
  const SpinStateSpace space(n_spins);
  const int n = n_spins;
  Eigen::MatrixXd f(static_cast<Eigen::Index>(space.size()), num_parameters(n));
  for (std::size_t a = 0; a < space.size(); ++a) {
    const auto row = static_cast<Eigen::Index>(a);
    int p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        f(row, p++) = SpinStateSpace::spin(a, i) * SpinStateSpace::spin(a, j);
    for (int i = 0; i < n; ++i) f(row, p++) = SpinStateSpace::spin(a, i);
  }
  return f;
}

Eigen::VectorXd gibbs_moments(const IsingParams& params) {
  const auto gibbs = gibbs_distribution(energy_table(params));
  return observable_table(params.n_spins()).transpose() * gibbs.probabilities;
}

Eigen::VectorXd uniform_distribution(int n_spins) {
  const SpinStateSpace space(n_spins);
  const auto s = static_cast<Eigen::Index>(space.size());
  return Eigen::VectorXd::Constant(s, 1.0 / static_cast<double>(s));
}

}  // namespace noneq::markov
