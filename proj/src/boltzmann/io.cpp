#include "noneq/boltzmann/io.hpp"

#include "noneq/errors.hpp"

#include "json.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace noneq::boltzmann {

namespace {

constexpr const char* kModelHeader = "noneq-model v1";
constexpr const char* kStateFormat = "noneq-train-state";

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_model(std::ostream& out, const BoltzmannModel& model) {
  model.validate();
  const int n = model.n_spins();
  out << kModelHeader << '\n' << n << '\n' << std::setprecision(17);
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = i + 1; j < n; ++j) out << (j > i + 1 ? " " : "") << model.J(i, j);
    out << '\n';
  }
  for (int i = 0; i < n; ++i) out << (i ? " " : "") << model.h[i];
  out << '\n';
}

BoltzmannModel read_model(std::istream& in) {
  std::string header;
  std::getline(in, header);
  if (header != kModelHeader)
    throw FormatError("model file: expected header '" + std::string(kModelHeader) + "', got '" +
                      header + "'");
  long n = 0;
  if (!(in >> n) || n < 1 || n > 100000) throw FormatError("model file: bad spin count");
  const int ni = static_cast<int>(n);
  Eigen::VectorXd theta(num_parameters(ni));
  for (Eigen::Index p = 0; p < theta.size(); ++p) {
    std::string tok;
    if (!(in >> tok)) throw FormatError("model file: truncated parameter list");
    try {
      std::size_t used = 0;
      theta[p] = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw FormatError("model file: bad number '" + tok + "'");
    }
  }
  std::string extra;
  if (in >> extra) throw FormatError("model file: trailing content '" + extra + "'");
  return unflatten(theta, ni);
}

void save_model(const std::filesystem::path& path, const BoltzmannModel& model) {
  auto out = open_out(path);
  write_model(out, model);
}

BoltzmannModel load_model(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_model(in);
}

void save_train_state(const std::filesystem::path& json_path,
                      const std::filesystem::path& model_path, const TrainState& state) {
  save_model(model_path, state.model);
  nlohmann::json j;
  j["format"] = kStateFormat;
  j["version"] = 1;
  j["model_file"] = model_path.filename().string();
  j["update_t"] = state.update_t;
  j["k_elapsed"] = state.chains.k_elapsed;
  j["scheme"] = to_string(state.chains.scheme);
  j["order"] = to_string(state.chains.order);
  j["average_count"] = state.average_count;
  j["average_sum"] = std::vector<double>(state.average_sum.data(),
                                         state.average_sum.data() + state.average_sum.size());
  auto& chains = j["chains"] = nlohmann::json::array();
  for (std::size_t c = 0; c < state.chains.n_chains(); ++c) {
    std::string spins;
    for (Eigen::Index i = 0; i < state.chains.states.cols(); ++i)
      spins += state.chains.states(static_cast<Eigen::Index>(c), i) > 0 ? '+' : '-';
    const auto& s = state.chains.streams[c];
    chains.push_back({{"seed", s.seed()},
                      {"stream", s.stream_id()},
                      {"position", s.position()},
                      {"spins", spins}});
  }
  auto out = open_out(json_path);
  out << j.dump(1) << '\n';
}

TrainState load_train_state(const std::filesystem::path& json_path) {
  auto in = open_in(json_path);
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format") != kStateFormat || j.at("version") != 1)
      throw FormatError("train state: unsupported format in " + json_path.string());
    TrainState state;
    state.model = load_model(json_path.parent_path() / j.at("model_file").get<std::string>());
    state.update_t = j.at("update_t").get<std::uint64_t>();
    state.average_count = j.value("average_count", std::uint64_t{0});
    if (state.average_count > 0) {
      const auto sum = j.at("average_sum").get<std::vector<double>>();
      if (sum.size() != static_cast<std::size_t>(num_parameters(state.model.n_spins())))
        throw FormatError("train state: average has the wrong length");
      state.average_sum = Eigen::Map<const Eigen::VectorXd>(sum.data(), static_cast<Eigen::Index>(sum.size()));
    }
    const auto& chains = j.at("chains");
    const int n = state.model.n_spins();
    state.chains.scheme = parse_scheme(j.at("scheme").get<std::string>());
    state.chains.k_elapsed = j.at("k_elapsed").get<std::uint64_t>();
    state.chains.order = parse_site_order(j.value("order", std::string("random-site")));
    state.chains.states.resize(static_cast<Eigen::Index>(chains.size()), n);
    for (std::size_t c = 0; c < chains.size(); ++c) {
      const auto& ch = chains[c];
      const auto spins = ch.at("spins").get<std::string>();
      if (static_cast<int>(spins.size()) != n)
        throw FormatError("train state: chain length does not match the model");
      for (int i = 0; i < n; ++i) {
        if (spins[i] != '+' && spins[i] != '-') throw FormatError("train state: bad spin symbol");
        state.chains.states(static_cast<Eigen::Index>(c), i) = spins[i] == '+' ? 1 : -1;
      }
      state.chains.streams.emplace_back(ch.at("seed").get<std::uint64_t>(),
                                        ch.at("stream").get<std::uint64_t>(),
                                        ch.at("position").get<std::uint64_t>());
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("train state " + json_path.string() + ": " + e.what());
  }
}

}  // namespace noneq::boltzmann
