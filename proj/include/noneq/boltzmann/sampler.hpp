#pragma once

#include "noneq/ising.hpp"
#include "noneq/numerics/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace noneq::boltzmann {

/// The binary EBM is the pairwise Ising model.
using BoltzmannModel = IsingParams;

/// M x N array of spins in {-1, +1}, one configuration per row.
using SpinMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Scheme { random_init, data_init, persistent };

std::string to_string(Scheme scheme);
/// Accepts "random-init"/"rdm", "data-init"/"cd", "persistent"/"pcd".
Scheme parse_scheme(const std::string& name);

/// Site choice inside one step: N uniformly drawn sites, or every site once
/// in index order.
enum class SiteOrder { random_site, sequential };
std::string to_string(SiteOrder order);
/// Accepts "random-site" and "sequential".
SiteOrder parse_site_order(const std::string& name);

struct ChainEnsemble {
  SpinMatrix states;
  std::uint64_t k_elapsed = 0;
  Scheme scheme = Scheme::random_init;
  SiteOrder order = SiteOrder::random_site;
  /// Chain c draws from streams[c] only.
  std::vector<numerics::RngStream> streams;

  std::size_t n_chains() const { return static_cast<std::size_t>(states.rows()); }
  int n_spins() const { return static_cast<int>(states.cols()); }
};

/// Ensemble of M chains on N spins; chain c uses stream (seed, stream_base + c).
/// States start all +1 until initialized.
ChainEnsemble make_ensemble(std::size_t n_chains, int n_spins, Scheme scheme, std::uint64_t seed,
                            std::uint64_t stream_base = 0);

struct MomentEstimate {
  Eigen::VectorXd means;
  Eigen::VectorXd correlations;  // pairs i<j, row-major
  Eigen::VectorXd means_se;
  Eigen::VectorXd correlations_se;
  std::size_t n_samples = 0;

  int n_spins() const { return static_cast<int>(means.size()); }
  /// Pairs then fields, the layout of flatten(IsingParams).
  Eigen::VectorXd flat() const;
  /// Symmetric N x N matrix with unit diagonal.
  Eigen::MatrixXd correlation_matrix() const;
};

MomentEstimate estimate_moments(const SpinMatrix& samples);

/// i.i.d. uniform spins for every chain.
void init_random(ChainEnsemble& chains);
/// Each chain copies a row of `data` picked uniformly with its own stream.
void init_from_data(ChainEnsemble& chains, const SpinMatrix& data);

/// One step per chain: N heat-bath updates (sites per chains.order), spin i
/// set to +1 with probability sigmoid(2 (sum_j J_ij s_j + h_i)).
void heatbath_step(ChainEnsemble& chains, const BoltzmannModel& model);
/// k steps; local fields are computed once per chain and updated on flips.
void run_steps(ChainEnsemble& chains, const BoltzmannModel& model, std::uint64_t k);

/// Initializes `chains` according to `scheme` (persistent keeps the current
/// states), runs k steps and returns the sample moments. `data` is required
/// for the data-init scheme.
MomentEstimate sample_k(const BoltzmannModel& model, Scheme scheme, std::uint64_t k,
                        ChainEnsemble& chains, const SpinMatrix* data = nullptr);

/// Fresh ensemble of M chains; convenience wrapper over the above.
MomentEstimate sample_k(const BoltzmannModel& model, Scheme scheme, std::uint64_t k,
                        std::size_t n_chains, std::uint64_t seed, const SpinMatrix* data = nullptr);

/// Worker threads for chain updates: NONEQ_THREADS if set, else 1.
unsigned sampler_threads();

}  // namespace noneq::boltzmann
