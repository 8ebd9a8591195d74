#pragma once

#include "noneq/boltzmann/training.hpp"
#include "noneq/datasets/datasets.hpp"
#include "noneq/experiments/config.hpp"
#include "noneq/gaussian/flow.hpp"
#include "noneq/gaussian/resampling.hpp"
#include "noneq/markov/training.hpp"

#include <filesystem>
#include <functional>
#include <optional>

namespace noneq::experiments {

// Eigenvalue flows for a grid of (c_hat, m0, k, J(0)).
struct FlowSeries {
  double c_hat = 0.0, m0 = 0.0, k = 0.0, j_init = 0.0;
  numerics::OdeTrajectory trajectory;
  bool above_threshold = false;
  /// NaN below threshold.
  double j_fixed = 0.0;
  double tau = 0.0;
  gaussian::ExponentialFit fit;
};
std::vector<FlowSeries> flow_family(const ExperimentConfig& config);

struct RotationSeries {
  double k = 0.0;
  numerics::OdeTrajectory trajectory;  // (phi, J1, J2)
};
std::vector<RotationSeries> rotation_family(const ExperimentConfig& config);

struct ResamplingSnapshot {
  /// Training time; infinity for the fixed point.
  double t = 0.0;
  Eigen::VectorXd J;
  std::vector<double> curve;
  gaussian::CurveMinimum best;
};
struct ResamplingStudy {
  double k = 0.0;
  std::vector<double> k_primes;
  std::vector<ResamplingSnapshot> snapshots;
  ResamplingSnapshot converged;
  /// J(t) of every mode on a coarse grid up to t_end.
  std::vector<numerics::OdeTrajectory> trajectories;
};
ResamplingStudy resampling_study(const ExperimentConfig& config);

struct KDagger {
  double epsilon = 0.0;
  std::size_t iterations = 0;
  int component = 0;
  double residual = 0.0;
  /// In sweeps; empty when the error does not change sign in the scan range.
  std::optional<double> k_dagger;
};
struct ExactStudy {
  double k = 0.0;
  markov::TrainingReport report;
  Eigen::VectorXd data, generated, equilibrium;
  double generated_mismatch = 0.0;
  double equilibrium_mismatch = 0.0;
  std::vector<KDagger> k_dagger;
};
ExactStudy exact_study(const ExperimentConfig& config);

/// Loads `dataset` or generates the lattice dataset described by the config.
datasets::SpinDataset training_dataset(const ExperimentConfig& config);
/// Reference couplings when the dataset came from the lattice generator.
std::optional<Eigen::MatrixXd> reference_couplings(const datasets::SpinDataset& data);
/// Whole number of sweeps; throws ParameterError otherwise.
std::uint64_t sweeps(double k);

/// E2(k') for k' = 1..k_max from fresh uniformly initialized chains.
std::vector<double> error_curve(const boltzmann::BoltzmannModel& model,
                                const boltzmann::MomentEstimate& data, std::uint64_t k_max,
                                std::size_t n_chains, std::uint64_t seed,
                                boltzmann::SiteOrder order = boltzmann::SiteOrder::random_site);

struct ErrorCurve {
  std::uint64_t update_t = 0;
  std::vector<double> values;  // k' = 1..k_max
};

struct TrainingJob {
  boltzmann::TrainOptions options;
  std::uint64_t eval_every = 0;
  std::uint64_t eval_k_max = 0;  // 0: no curves
  std::size_t eval_chains = 20000;
  std::filesystem::path checkpoint_dir;  // empty: no checkpoints
  /// Identifies the run; a checkpoint with another fingerprint is refused.
  std::string fingerprint;
  std::function<void(const boltzmann::TrainMetrics&)> on_metrics;
  std::function<void(const ErrorCurve&)> on_curve;
  /// Called after each checkpoint is written.
  std::function<void(std::uint64_t)> on_checkpoint;
};

struct TrainingRun {
  boltzmann::TrainState state;
  std::vector<boltzmann::TrainMetrics> metrics;
  std::vector<ErrorCurve> curves;
  bool diverged = false;
};

std::optional<boltzmann::TrainState> load_checkpoint(const std::filesystem::path& dir,
                                                     const std::string& fingerprint);
void save_checkpoint(const std::filesystem::path& dir, const boltzmann::TrainState& state,
                     const std::string& fingerprint);

/// Trains from `start` to options.n_updates. Metrics rows fall on multiples
/// of metrics_every plus the last update; curves on multiples of eval_every
/// plus the end.
TrainingRun run_training(const TrainingJob& job, const datasets::SpinDataset& data,
                         boltzmann::TrainState start);

}  // namespace noneq::experiments
