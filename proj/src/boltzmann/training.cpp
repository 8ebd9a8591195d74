#include "noneq/boltzmann/training.hpp"

#include "noneq/boltzmann/metrics.hpp"
#include "noneq/errors.hpp"

#include <cmath>
#include <limits>

namespace noneq::boltzmann {

TrainState initial_train_state(int n_spins, const TrainOptions& options) {
  TrainState s;
  s.model = BoltzmannModel::zeros(n_spins);
  s.chains = make_ensemble(options.n_chains, n_spins, options.scheme, options.seed);
  s.chains.order = options.order;
  // Persistent chains start from the random-init law.
  if (options.scheme == Scheme::persistent) init_random(s.chains);
  return s;
}

TrainResult train(const MomentEstimate& data, const SpinMatrix* data_samples, TrainState state,
                  const TrainOptions& options) {
  if (!(options.learning_rate > 0.0)) throw ParameterError("train: learning rate must be positive");
  const int n = state.model.n_spins();
  if (data.n_spins() != n) throw ParameterError("train: data and model differ in the number of spins");
  if (options.scheme == Scheme::data_init && data_samples == nullptr)
    throw ParameterError("train: data-init scheme requires the data samples");
  if (options.true_couplings && options.true_couplings->rows() != n)
    throw ParameterError("train: reference couplings have the wrong size");

  reconcile_average(state, options);
  const Eigen::VectorXd target = data.flat();
  const std::uint64_t every = std::max<std::uint64_t>(options.metrics_every, 1);
  TrainResult result;
  for (std::uint64_t t = state.update_t; t < options.n_updates; ++t) {
    const MomentEstimate gen = sample_k(state.model, options.scheme, options.k, state.chains,
                                        data_samples);
    const Eigen::VectorXd grad = target - gen.flat();
    if (t % every == 0 || t + 1 == options.n_updates) {
      TrainMetrics m;
      m.update_t = t;
      m.coupling_error = options.true_couplings
                             ? coupling_error(state.model.J, *options.true_couplings)
                             : std::numeric_limits<double>::quiet_NaN();
      m.e2_at_k = correlation_error(gen, data);
      m.grad_norm = grad.norm();
      result.metrics.push_back(m);
      if (options.on_metrics) options.on_metrics(m);
    }
    const Eigen::VectorXd theta = flatten(state.model) + options.learning_rate * grad;
    if (!theta.allFinite()) {
      result.diverged = true;
      break;
    }
    state.model = unflatten(theta, n);
    state.update_t = t + 1;
    if (state.update_t > options.average_from) {
      if (state.average_count == 0) state.average_sum = Eigen::VectorXd::Zero(theta.size());
      state.average_sum += theta;
      ++state.average_count;
    }
    if (options.checkpoint_every > 0 && state.update_t % options.checkpoint_every == 0 &&
        options.on_checkpoint)
      options.on_checkpoint(state);
  }
  result.state = std::move(state);
  return result;
}

void reconcile_average(TrainState& state, const TrainOptions& options) {
  const std::uint64_t expected =
      state.update_t > options.average_from ? state.update_t - options.average_from : 0;
  if (state.average_count == expected) return;
  if (expected != 0)
    throw ParameterError("train: state holds " + std::to_string(state.average_count) +
                         " averaged updates, the options imply " + std::to_string(expected));
  state.average_count = 0;
  state.average_sum.resize(0);
}

BoltzmannModel averaged_model(const TrainState& state) {
  if (state.average_count == 0) return state.model;
  return unflatten(state.average_sum / static_cast<double>(state.average_count), state.model.n_spins());
}

TrainResult train(const SpinMatrix& data, const TrainOptions& options) {
  const auto state = initial_train_state(static_cast<int>(data.cols()), options);
  return train(estimate_moments(data), &data, state, options);
}

}  // namespace noneq::boltzmann
