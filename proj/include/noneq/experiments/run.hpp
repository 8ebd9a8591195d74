#pragma once

#include "noneq/experiments/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace noneq::experiments {

/// A module error raised inside an experiment, prefixed with its id.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(const std::string& experiment, const std::string& what)
      : std::runtime_error(experiment + ": " + what), experiment(experiment) {}
  std::string experiment;
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RunSummary {
  std::string experiment;
  std::filesystem::path out_dir;
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;
  bool all_pass() const;
};

/// `out` if set, else $NONEQ_OUT_ROOT/<experiment>, else results/<experiment>.
std::filesystem::path output_directory(const ExperimentConfig& config);

/// Exclusive `.lock` file in a directory for the lifetime of the object.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path path_;
};

/// Runs the experiment and writes config.resolved, its CSV files,
/// checkpoints and summary.json into output_directory(config).
RunSummary run_experiment(const ExperimentConfig& config, std::ostream& log);

void write_summary_json(const std::filesystem::path& path, const RunSummary& summary);

}  // namespace noneq::experiments
