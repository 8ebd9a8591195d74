#pragma once

#include "noneq/boltzmann/sampler.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace noneq::datasets {

using Provenance = std::vector<std::pair<std::string, std::string>>;

struct SpinDataset {
  boltzmann::SpinMatrix samples;
  /// Ordered generator parameters, enough to regenerate the samples.
  Provenance provenance;

  std::size_t size() const { return static_cast<std::size_t>(samples.rows()); }
  int n_spins() const { return static_cast<int>(samples.cols()); }
  /// Value of a provenance key; throws FormatError when absent.
  const std::string& get(const std::string& key) const;
};

struct Ising2dSpec {
  int L = 7;
  double beta = 0.44;
  std::size_t n_samples = 10000;
  std::uint64_t equil_sweeps = 1000;
  std::uint64_t gap_sweeps = 10;
  std::uint64_t seed = 0;
};

/// Nearest-neighbour ferromagnet on an L x L periodic lattice, site r*L + c.
/// Each site gets a bond to its right and lower neighbour, so on L = 2 the
/// doubly wrapped bonds carry 2 beta.
IsingParams ising2d_couplings(int L, double beta);

/// One heat-bath chain with sequential sweeps: equil_sweeps sweeps of burn-in,
/// then one sample every gap_sweeps sweeps.
SpinDataset generate_ising2d(const Ising2dSpec& spec);
/// Reads the spec back from a dataset's provenance.
Ising2dSpec ising2d_spec_from(const SpinDataset& dataset);

/// n x D samples with covariance J^{-1} and zero mean. Throws ParameterError
/// unless J is symmetric positive definite.
Eigen::MatrixXd generate_gaussian(const Eigen::MatrixXd& coupling, std::size_t n, std::uint64_t seed);

/// Second-moment matrix X^T X / n (the data are centered by construction).
Eigen::MatrixXd gaussian_second_moments(const Eigen::MatrixXd& samples);

boltzmann::MomentEstimate data_moments(const SpinDataset& dataset);

void write_dataset(std::ostream& out, const SpinDataset& dataset);
SpinDataset read_dataset(std::istream& in);
/// Also writes `<path>.provenance.json`.
void save_dataset(const std::filesystem::path& path, const SpinDataset& dataset);
SpinDataset load_dataset(const std::filesystem::path& path);

void write_gaussian_csv(std::ostream& out, const Eigen::MatrixXd& samples);
Eigen::MatrixXd read_gaussian_csv(std::istream& in);

}  // namespace noneq::datasets
