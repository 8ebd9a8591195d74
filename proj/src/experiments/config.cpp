#include "noneq/experiments/config.hpp"

#include "noneq/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace noneq::experiments {

namespace {

const std::vector<std::string> kGaussianFlow = {"fig1", "fig2-left", "fig2-right"};
const std::vector<std::string> kTraining = {"fig3-left", "fig3-right", "custom"};

std::vector<std::string> join(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<KeySpec> build_keys() {
  using V = ValueType;
  const std::vector<std::string> all;
  const std::vector<std::string> fig1 = {"fig1"};
  const std::vector<std::string> left = {"fig2-left"};
  const std::vector<std::string> right = {"fig2-right"};
  const std::vector<std::string> f3l = {"fig3-left"};
  const std::vector<std::string> f3r = {"fig3-right"};
  const std::vector<std::string> thm = {"thm1-exact"};
  const std::vector<std::string> evals = {"fig3-left", "custom"};
  return {
      {"seed", V::integer, "0", all, "master seed for every random stream"},
      {"out", V::text, "", all, "output directory (default <root>/<experiment>)"},
      {"resume", V::boolean, "true", all, "continue from the last checkpoint when one exists"},

      // Gaussian eigenvalue flow.
      {"c_hat", V::reals, "1", {"fig1", "fig2-right"}, "data variances, one per mode"},
      {"m0", V::reals, "0", {"fig1", "fig2-right"}, "initial-law variances (one value or one per mode)"},
      {"k_values", V::reals, "0.75, 1, 2, 4", fig1, "sampling times, one flow family each"},
      {"k_values", V::reals, "1, 50", left, "sampling times, one flow family each"},
      {"k_values", V::reals, "1, 5, 10", f3r, "sampling times, one training each"},
      {"j_init", V::reals, "0.1, 3", fig1, "initial eigenvalues, one trajectory each"},
      {"j_init", V::reals, "0.1", right, "initial eigenvalues, one per mode"},
      {"t_end", V::real, "60", {"fig1", "fig2-left"}, "training time horizon"},
      {"t_end", V::real, "64", right, "training time horizon"},
      {"dt", V::real, "0", kGaussianFlow, "integration step; 0 picks 1e-3/c_hat"},
      {"record_every", V::integer, "100", {"fig1", "fig2-left"}, "keep every n-th integration step"},
      {"inset_k_max", V::real, "10", fig1, "upper end of the fixed-point-vs-k grid"},
      {"inset_points", V::integer, "200", fig1, "points of the fixed-point-vs-k grid"},
      {"c1", V::real, "1", left, "data variance along the first data axis"},
      {"c2", V::real, "0.5", left, "data variance along the second data axis"},
      {"j1_init", V::real, "0.5", left, "initial first eigenvalue"},
      {"j2_init", V::real, "3", left, "initial second eigenvalue"},
      {"phi_init", V::real, "0.6", left, "initial angle between model and data eigenbases"},
      {"m0_1", V::real, "0", left, "initial-law variance along the first model axis"},
      {"m0_2", V::real, "0", left, "initial-law variance along the second model axis"},
      {"cross0", V::real, "0", left, "initial-law covariance between the model axes"},
      {"snapshot_t", V::reals, "0.5, 1, 2, 4, 8", right, "training times at which curves are taken"},
      {"k_prime_min", V::real, "0", right, "lower end of the generation-time grid"},
      {"k_prime_max", V::real, "4", right, "upper end of the generation-time grid"},
      {"k_prime_points", V::integer, "401", right, "points of the generation-time grid"},

      // Sampling time of a single run.
      {"k", V::real, "1", right, "sampling time used for training"},
      {"k", V::real, "5", join(f3l, {"custom"}), "Monte Carlo sweeps per negative phase"},
      {"k", V::real, "3", thm, "sampling time in sweeps"},

      // Boltzmann machine training.
      {"dataset", V::text, "", kTraining, "spin dataset file; empty generates a lattice dataset"},
      {"L", V::integer, "7", kTraining, "lattice side of the generated dataset"},
      {"beta", V::real, "0.44", kTraining, "inverse temperature of the generated dataset"},
      {"n_samples", V::integer, "10000", kTraining, "configurations in the generated dataset"},
      {"equil_sweeps", V::integer, "1000", kTraining, "burn-in sweeps of the dataset chain"},
      {"gap_sweeps", V::integer, "10", kTraining, "sweeps between stored configurations"},
      {"data_seed", V::integer, "1", kTraining, "seed of the dataset chain"},
      {"scheme", V::text, "random-init", join(f3l, {"custom"}), "random-init | data-init | persistent"},
      {"sweep", V::text, "sequential", kTraining, "site update order in a sampling step: sequential | random-site"},
      {"learning_rate", V::real, "0.01", kTraining, "gradient ascent step"},
      {"learning_rate", V::real, "0.5", thm, "gradient ascent step"},
      {"n_chains", V::integer, "2000", kTraining, "chains per negative phase"},
      {"n_updates", V::integer, "10000", kTraining, "parameter updates"},
      {"checkpoint_every", V::integer, "1000", kTraining, "updates between checkpoints; 0 disables"},
      {"metrics_every", V::integer, "10", kTraining, "updates between metrics rows"},
      {"average_last", V::integer, "0", kTraining,
       "updates whose parameters are averaged into the reported model; 0 reports the last iterate"},
      {"eval_chains", V::integer, "20000", evals, "chains used to measure error curves"},
      {"eval_k_max", V::integer, "100", evals, "largest generation time of the error curves"},
      {"eval_every", V::integer, "0", evals, "updates between error curves; 0 keeps only the final one"},
      {"inset_k", V::reals, "", f3l, "extra trainings compared at generation time = k"},
      {"pcd_k", V::real, "5", f3r, "sweeps of the persistent-chain comparison run; 0 skips it"},

      // Exact pipeline.
      {"n_spins", V::integer, "5", thm, "number of spins"},
      {"edges", V::text, "0-1, 0-2, 1-3, 2-3, 1-4", thm, "coupled pairs of the data-generating model"},
      {"coupling", V::real, "0.44", thm, "coupling on every edge of the data-generating model"},
      {"dynamics", V::text, "continuous", thm, "continuous | discrete"},
      {"tol", V::real, "1e-10", thm, "stop when the largest moment mismatch reaches this"},
      {"max_iters", V::integer, "1000000", thm, "iteration cap"},
      {"epsilons", V::reals, "1e-3, 1e-5, 1e-7", thm, "early-stopping residuals for the k-dagger scan"},
      {"k_scan_min", V::real, "1", thm, "lower end of the k-dagger scan"},
      {"k_scan_max", V::real, "6", thm, "upper end of the k-dagger scan"},
  };
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  std::ostringstream os;
  if (line > 0)
    os << source << ":" << line << ": " << msg;
  else
    os << source << ": " << msg;
  throw ConfigError(os.str(), line);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e && std::isfinite(out);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  if (trim(s).empty()) return items;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) items.push_back(trim(item));
  if (!s.empty() && s.back() == ',') items.emplace_back();
  return items;
}

bool valid_key_name(const std::string& key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

const KeySpec* find_spec(const std::string& name, const std::string& experiment) {
  for (const auto& k : config_keys())
    if (k.name == name && k.applies_to(experiment)) return &k;
  return nullptr;
}

}  // namespace

bool KeySpec::applies_to(const std::string& experiment) const {
  return experiments.empty() ||
         std::find(experiments.begin(), experiments.end(), experiment) != experiments.end();
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"fig1",      "fig2-left",  "fig2-right", "fig3-left",
                                               "fig3-right", "thm1-exact", "custom"};
  return ids;
}

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = build_keys();
  return keys;
}

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : config_keys())
    if (k.name == name) return &k;
  return nullptr;
}

std::string type_name(ValueType type) {
  switch (type) {
    case ValueType::integer: return "integer";
    case ValueType::real: return "real";
    case ValueType::reals: return "list of reals";
    case ValueType::text: return "text";
    case ValueType::boolean: return "boolean";
  }
  return "?";
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw NumericalError("format_real: conversion failed");
  return std::string(buf, ptr);
}

ExperimentConfig::ExperimentConfig(const std::string& experiment) : experiment_(experiment) {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), experiment) == ids.end())
    throw ConfigError("unknown experiment '" + experiment + "'", 0);
  for (const auto& k : config_keys())
    if (k.applies_to(experiment) && !values_.count(k.name)) set(k.name, k.default_value);
  explicit_.clear();
}

void ExperimentConfig::set(const std::string& key, const std::string& raw_value, int line) {
  const std::string where = "config";
  if (key == "experiment") {
    if (trim(raw_value) != experiment_)
      fail(where, line, "experiment cannot be changed once set");
    return;
  }
  if (!find_key(key)) fail(where, line, "unknown key '" + key + "'");
  const KeySpec* spec = find_spec(key, experiment_);
  if (!spec) fail(where, line, "key '" + key + "' does not apply to experiment " + experiment_);

  const std::string v = trim(raw_value);
  auto mismatch = [&]() {
    fail(where, line, "key '" + key + "' expects " + type_name(spec->type) + ", got '" + v + "'");
  };
  std::string canonical;
  switch (spec->type) {
    case ValueType::integer: {
      double d = 0.0;
      if (!parse_double(v, d) || d < 0.0 || d != std::floor(d) || d > 9007199254740992.0) mismatch();
      canonical = std::to_string(static_cast<std::uint64_t>(d));
      break;
    }
    case ValueType::real: {
      double d = 0.0;
      if (!parse_double(v, d)) mismatch();
      canonical = format_real(d);
      break;
    }
    case ValueType::reals: {
      for (const auto& item : split_list(v)) {
        double d = 0.0;
        if (!parse_double(item, d)) mismatch();
        if (!canonical.empty()) canonical += ", ";
        canonical += format_real(d);
      }
      break;
    }
    case ValueType::boolean: {
      if (v == "true" || v == "yes" || v == "1" || v == "on")
        canonical = "true";
      else if (v == "false" || v == "no" || v == "0" || v == "off")
        canonical = "false";
      else
        mismatch();
      break;
    }
    case ValueType::text:
      canonical = v;
      break;
  }
  values_[key] = canonical;
  explicit_.insert(key);
}

const std::string& ExperimentConfig::raw(const std::string& key, ValueType expected) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw ParameterError("config key '" + key + "' is not defined for experiment " + experiment_);
  const KeySpec* spec = find_spec(key, experiment_);
  if (spec->type != expected)
    throw ParameterError("config key '" + key + "' is " + type_name(spec->type) + ", read as " +
                         type_name(expected));
  return it->second;
}

const std::string& ExperimentConfig::text(const std::string& key) const {
  return raw(key, ValueType::text);
}

double ExperimentConfig::real(const std::string& key) const {
  double d = 0.0;
  parse_double(raw(key, ValueType::real), d);
  return d;
}

std::uint64_t ExperimentConfig::integer(const std::string& key) const {
  return std::stoull(raw(key, ValueType::integer));
}

std::vector<double> ExperimentConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key, ValueType::reals))) {
    double d = 0.0;
    parse_double(item, d);
    out.push_back(d);
  }
  return out;
}

bool ExperimentConfig::flag(const std::string& key) const {
  return raw(key, ValueType::boolean) == "true";
}

std::string ExperimentConfig::resolved_text() const {
  std::ostringstream os;
  os << "experiment = " << experiment_ << "\n";
  std::set<std::string> done;
  for (const auto& k : config_keys()) {
    if (!k.applies_to(experiment_) || !done.insert(k.name).second) continue;
    const auto& v = values_.at(k.name);
    os << k.name << " =" << (v.empty() ? "" : " ") << v << "\n";
  }
  return os.str();
}

ExperimentConfig parse_config_text(std::string_view text, const std::string& source) {
  struct Entry {
    std::string key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::map<std::string, int> seen;

  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(source, lineno, "expected 'key = value', got '" + body + "'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (!valid_key_name(key)) fail(source, lineno, "malformed key '" + key + "'");
    if (auto it = seen.find(key); it != seen.end())
      fail(source, lineno,
           "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    seen[key] = lineno;
    entries.push_back({key, trim(std::string_view(body).substr(eq + 1)), lineno});
  }

  const auto exp = std::find_if(entries.begin(), entries.end(),
                                [](const Entry& e) { return e.key == "experiment"; });
  if (exp == entries.end()) fail(source, 0, "missing required key 'experiment'");
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), exp->value) == ids.end())
    fail(source, exp->line, "unknown experiment '" + exp->value + "'");

  ExperimentConfig config(exp->value);
  for (const auto& e : entries) {
    if (e.key == "experiment") continue;
    try {
      config.set(e.key, e.value, e.line);
    } catch (const ConfigError& err) {
      // Re-label with the real source name.
      std::string msg = err.what();
      msg = msg.substr(msg.find(": ") + 2);
      fail(source, e.line, msg);
    }
  }
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string(), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace noneq::experiments
