#include "noneq/experiments/cli.hpp"

#include "noneq/boltzmann/io.hpp"
#include "noneq/datasets/datasets.hpp"
#include "noneq/errors.hpp"
#include "noneq/experiments/csv.hpp"
#include "noneq/experiments/pipelines.hpp"
#include "noneq/experiments/run.hpp"
#include "noneq/gaussian/flow.hpp"
#include "noneq/markov/io.hpp"
#include "noneq/markov/spectral.hpp"
#include "noneq/markov/operators.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

namespace noneq::experiments {

namespace fs = std::filesystem;

namespace {

using Overrides = std::map<std::string, std::string>;

/// Registers one string flag per config key. `only` restricts the keys to
/// one experiment.
void mirror_keys(CLI::App& app, Overrides& values, const std::string& only = "") {
  std::set<std::string> done;
  for (const auto& k : config_keys()) {
    if (!only.empty() && !k.applies_to(only)) continue;
    if (!done.insert(k.name).second) continue;
    app.add_option_function<std::string>(
           "--" + k.name, [&values, name = k.name](const std::string& v) { values[name] = v; },
           k.help + " (" + type_name(k.type) + ")")
        ->type_name("VALUE");
  }
}

void apply_overrides(ExperimentConfig& config, const Overrides& values) {
  for (const auto& [key, value] : values) config.set(key, value);
}

int finish(const RunSummary& summary, std::ostream& out) {
  for (const auto& c : summary.checks)
    out << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << format_real(c.value)
        << " (threshold " << format_real(c.threshold) << ")\n";
  out << "outputs in " << summary.out_dir.string() << "\n";
  return summary.all_pass() ? 0 : 3;
}

struct SampleArgs {
  std::string model, data, scheme = "random-init", out = "sample-out";
  double k = 5;
  std::size_t chains = 1000;
  std::uint64_t seed = 0;
};

int do_sample(const SampleArgs& a, std::ostream& out) {
  const auto model = boltzmann::load_model(a.model);
  const auto scheme = boltzmann::parse_scheme(a.scheme);
  std::optional<datasets::SpinDataset> data;
  if (!a.data.empty()) data = datasets::load_dataset(a.data);
  if (scheme == boltzmann::Scheme::data_init && !data)
    throw ParameterError("the data-init scheme needs --data");
  auto chains = boltzmann::make_ensemble(a.chains, model.n_spins(), scheme, a.seed);
  if (scheme == boltzmann::Scheme::persistent) boltzmann::init_random(chains);
  const auto est = boltzmann::sample_k(model, scheme, sweeps(a.k), chains,
                                       data ? &data->samples : nullptr);

  fs::create_directories(a.out);
  datasets::SpinDataset samples{chains.states,
                                {{"generator", "sample"},
                                 {"model", a.model},
                                 {"k", format_real(a.k)},
                                 {"scheme", boltzmann::to_string(scheme)},
                                 {"chains", std::to_string(a.chains)},
                                 {"seed", std::to_string(a.seed)}}};
  datasets::save_dataset(fs::path(a.out) / "samples.txt", samples);
  CsvWriter csv(fs::path(a.out) / "moments.csv", {"kind", "i", "j", "value", "se"});
  const int n = model.n_spins();
  for (int i = 0; i < n; ++i) csv.row("mean", i, i, est.means[i], est.means_se[i]);
  for (int p = 0; p < num_pairs(n); ++p) {
    const auto [i, j] = pair_at(p, n);
    csv.row("correlation", i, j, est.correlations[p], est.correlations_se[p]);
  }
  out << "sampled " << a.chains << " chains of " << n << " spins for k = " << format_real(a.k)
      << " sweeps (" << boltzmann::to_string(scheme) << ")\n"
      << "outputs in " << a.out << "\n";
  return 0;
}

struct SpectrumArgs {
  std::string model, dynamics = "continuous", out;
  std::uint64_t seed = 0;
};

int do_spectrum(const SpectrumArgs& a, std::ostream& out) {
  const auto model = boltzmann::load_model(a.model);
  markov::Dynamics kind;
  if (a.dynamics == "continuous")
    kind = markov::Dynamics::continuous_glauber;
  else if (a.dynamics == "discrete")
    kind = markov::Dynamics::discrete_heatbath;
  else
    throw ParameterError("--dynamics must be continuous or discrete");
  const auto op = markov::build_operator(markov::energy_table(model), kind);
  const auto ex = markov::spectral_expansion(op, markov::uniform_distribution(model.n_spins()));
  for (Eigen::Index i = 0; i < ex.eigenvalues.size(); ++i)
    out << "lambda_" << i << " = " << format_real(ex.eigenvalues[i]) << "\n";
  out << "kappa_mix = " << format_real(markov::mixing_time(ex)) << "\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    std::ofstream csv(fs::path(a.out) / "spectrum.csv", std::ios::binary);
    markov::write_spectrum_csv(csv, ex);
    out << "outputs in " << a.out << "\n";
  }
  return 0;
}

int do_dataset(const datasets::Ising2dSpec& spec, const std::string& path, std::ostream& out) {
  const auto data = datasets::generate_ising2d(spec);
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  datasets::save_dataset(path, data);
  out << "wrote " << data.size() << " samples of " << data.n_spins() << " spins to " << path << "\n";
  return 0;
}

struct FixedPointArgs {
  double c = 1, m0 = 0, k = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int do_fixed_point(const FixedPointArgs& a, std::ostream& out) {
  const double k_star = gaussian::divergence_threshold(a.c, a.m0);
  out << "k_star = " << format_real(k_star) << "\n";
  const double j = gaussian::fixed_point(a.c, a.m0, a.k);
  const double tau = gaussian::relaxation_time(a.c, a.m0, a.k);
  out << "J = " << format_real(j) << "\n" << "tau = " << format_real(tau) << "\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    CsvWriter csv(fs::path(a.out) / "fixed_point.csv", {"c_hat", "m0", "k", "j_fixed", "tau"});
    csv.row(a.c, a.m0, a.k, j, tau);
  }
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-time sampling experiments for energy-based models", "noneq"};
  app.set_help_all_flag("--help-all", "Print help for every subcommand");
  app.require_subcommand(1);
  app.fallthrough(false);

  // run
  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  std::string config_path;
  Overrides run_overrides;
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  mirror_keys(*run, run_overrides);

  // train
  auto* train = app.add_subcommand("train", "Train a Boltzmann machine on a spin dataset");
  Overrides train_overrides;
  mirror_keys(*train, train_overrides, "custom");

  // sample
  auto* sample = app.add_subcommand("sample", "Draw finite-k samples from a model file");
  SampleArgs sa;
  sample->add_option("--model", sa.model, "model file")->required()->check(CLI::ExistingFile);
  sample->add_option("--k", sa.k, "sweeps per chain")->capture_default_str();
  sample->add_option("--chains", sa.chains, "number of chains")->capture_default_str();
  sample->add_option("--scheme", sa.scheme, "random-init | data-init | persistent")->capture_default_str();
  sample->add_option("--data", sa.data, "dataset file for the data-init scheme");
  sample->add_option("--seed", sa.seed, "seed")->capture_default_str();
  sample->add_option("--out", sa.out, "output directory")->capture_default_str();

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues and mixing time of a small model");
  SpectrumArgs sp;
  spectrum->add_option("--model", sp.model, "model file")->required()->check(CLI::ExistingFile);
  spectrum->add_option("--dynamics", sp.dynamics, "continuous | discrete")->capture_default_str();
  spectrum->add_option("--seed", sp.seed, "unused; accepted for uniformity");
  spectrum->add_option("--out", sp.out, "directory for spectrum.csv");

  // dataset gen
  auto* dataset = app.add_subcommand("dataset", "Dataset tools");
  dataset->require_subcommand(1);
  auto* gen = dataset->add_subcommand("gen", "Generate a 2D Ising dataset");
  datasets::Ising2dSpec spec;
  std::string data_out = "dataset.txt";
  gen->add_option("--L", spec.L, "lattice side")->capture_default_str();
  gen->add_option("--beta", spec.beta, "inverse temperature")->capture_default_str();
  gen->add_option("--n_samples", spec.n_samples, "number of samples")->capture_default_str();
  gen->add_option("--equil_sweeps", spec.equil_sweeps, "burn-in sweeps")->capture_default_str();
  gen->add_option("--gap_sweeps", spec.gap_sweeps, "sweeps between samples")->capture_default_str();
  gen->add_option("--seed", spec.seed, "seed")->capture_default_str();
  gen->add_option("--out", data_out, "output file")->capture_default_str();

  // fixed-point
  auto* fixed = app.add_subcommand("fixed-point", "Fixed point and relaxation time of the eigenvalue flow");
  FixedPointArgs fp;
  fixed->add_option("--c", fp.c, "data variance")->capture_default_str();
  fixed->add_option("--m0", fp.m0, "initial-law variance")->capture_default_str();
  fixed->add_option("--k", fp.k, "sampling time")->capture_default_str();
  fixed->add_option("--seed", fp.seed, "unused; accepted for uniformity");
  fixed->add_option("--out", fp.out, "directory for fixed_point.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (run->parsed()) {
      auto config = parse_config(config_path);
      try {
        apply_overrides(config, run_overrides);
      } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n\n" << run->help();
        return 2;
      }
      return finish(run_experiment(config, err), out);
    }
    if (train->parsed()) {
      ExperimentConfig config("custom");
      apply_overrides(config, train_overrides);
      if (!config.is_explicit("out")) config.set("out", "train-out");
      return finish(run_experiment(config, err), out);
    }
    if (sample->parsed()) return do_sample(sa, out);
    if (spectrum->parsed()) return do_spectrum(sp, out);
    if (gen->parsed()) return do_dataset(spec, data_out, out);
    if (fixed->parsed()) return do_fixed_point(fp, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace noneq::experiments
