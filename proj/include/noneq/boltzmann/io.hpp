#pragma once

#include "noneq/boltzmann/training.hpp"

#include <filesystem>
#include <iosfwd>

namespace noneq::boltzmann {

/// Text model file: header line, N, the upper triangle of J row by row, then
/// h; 17 significant digits.
void write_model(std::ostream& out, const BoltzmannModel& model);
BoltzmannModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const BoltzmannModel& model);
BoltzmannModel load_model(const std::filesystem::path& path);

/// JSON train state (update counter, chain states, RNG positions) next to a
/// model file holding the parameters.
void save_train_state(const std::filesystem::path& json_path,
                      const std::filesystem::path& model_path, const TrainState& state);
TrainState load_train_state(const std::filesystem::path& json_path);

}  // namespace noneq::boltzmann
