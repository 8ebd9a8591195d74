#pragma once

#include "noneq/boltzmann/sampler.hpp"

#include <functional>
#include <limits>
#include <optional>

namespace noneq::boltzmann {

struct TrainMetrics {
  std::uint64_t update_t = 0;
  /// NaN when no reference couplings were given.
  double coupling_error = 0.0;
  /// Correlation error of the negative-phase samples used for this update.
  double e2_at_k = 0.0;
  double grad_norm = 0.0;
};

/// Everything needed to continue a run bit-for-bit.
struct TrainState {
  BoltzmannModel model;
  ChainEnsemble chains;
  std::uint64_t update_t = 0;
  /// Sum of the flattened parameters over the averaged updates so far.
  Eigen::VectorXd average_sum;
  std::uint64_t average_count = 0;
};

struct TrainOptions {
  Scheme scheme = Scheme::random_init;
  SiteOrder order = SiteOrder::random_site;
  std::uint64_t k = 5;
  double learning_rate = 1e-2;
  std::uint64_t n_updates = 1000;
  std::size_t n_chains = 2000;
  std::uint64_t seed = 0;
  std::uint64_t metrics_every = 1;
  std::uint64_t checkpoint_every = 0;  // 0 disables
  /// Iterates after updates average_from+1 .. n_updates are averaged into
  /// the state (Polyak-Ruppert); the default never averages.
  std::uint64_t average_from = std::numeric_limits<std::uint64_t>::max();
  std::optional<Eigen::MatrixXd> true_couplings;
  std::function<void(const TrainMetrics&)> on_metrics;
  std::function<void(const TrainState&)> on_checkpoint;
};

struct TrainResult {
  TrainState state;
  std::vector<TrainMetrics> metrics;
  bool diverged = false;
};

/// Starting state for a run: zero model and an ensemble seeded from options.
TrainState initial_train_state(int n_spins, const TrainOptions& options);

/// Stochastic moment-matching ascent J += lr (<x x>_D - <x x>_k), h likewise.
/// Continues from `state` until options.n_updates total updates; the
/// parameters of the last finite iterate are returned when an update turns
/// non-finite.
TrainResult train(const MomentEstimate& data, const SpinMatrix* data_samples, TrainState state,
                  const TrainOptions& options);

TrainResult train(const SpinMatrix& data, const TrainOptions& options);

/// Makes a state's running average agree with options.average_from: a sum
/// taken before the averaging window opens is dropped, and a state that is
/// inside the window with the wrong count throws ParameterError.
void reconcile_average(TrainState& state, const TrainOptions& options);

/// Mean of the averaged iterates, or the current model when none were averaged.
BoltzmannModel averaged_model(const TrainState& state);

}  // namespace noneq::boltzmann
