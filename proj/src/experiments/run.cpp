#include "noneq/experiments/run.hpp"

#include "noneq/boltzmann/io.hpp"
#include "noneq/errors.hpp"
#include "noneq/experiments/csv.hpp"
#include "noneq/experiments/pipelines.hpp"
#include "noneq/gaussian/flow.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fcntl.h>
#include <limits>
#include <ostream>
#include <unistd.h>

namespace noneq::experiments {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Context {
  const ExperimentConfig& config;
  fs::path dir;
  std::ostream& log;
  RunSummary& summary;

  fs::path output(const std::string& name) {
    summary.outputs.push_back(name);
    return dir / name;
  }
  void check(std::string name, double value, double threshold, bool pass) {
    log << "  check " << name << ": " << format_real(value) << " (threshold " << format_real(threshold)
        << ") " << (pass ? "PASS" : "FAIL") << "\n";
    summary.checks.push_back({std::move(name), value, threshold, pass});
  }
};

void run_fig1(Context& ctx) {
  const auto series = flow_family(ctx.config);
  CsvWriter flow(ctx.output("flow.csv"), {"c_hat", "m0", "k", "j_init", "t", "J"});
  CsvWriter fits(ctx.output("flow_fits.csv"),
                 {"c_hat", "m0", "k", "j_init", "status", "j_fixed", "j_final", "tau_formula",
                  "tau_fit", "fit_amplitude", "fit_points"});
  double g_max = 0.0, gap_max = 0.0, fit_err = 0.0, stuck = 0.0;
  bool any_above = false, any_fit = false, any_below = false;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.trajectory.size(); ++i)
      flow.row(s.c_hat, s.m0, s.k, s.j_init, s.trajectory.times[i], s.trajectory.values[i][0]);
    const double j_final = s.trajectory.back()[0];
    std::string status = s.trajectory.diverged ? "left_domain" : "completed";
    fits.row(s.c_hat, s.m0, s.k, s.j_init, status, s.j_fixed, j_final, s.tau, s.fit.tau,
             s.fit.amplitude, s.fit.n_points);
    if (s.above_threshold) {
      any_above = true;
      g_max = std::max(g_max, std::abs(gaussian::fixed_point_function(s.j_fixed, s.c_hat, s.m0, s.k)));
      gap_max = std::max(gap_max, s.trajectory.diverged ? INFINITY : std::abs(j_final - s.j_fixed));
      if (s.fit.n_points >= 3) {
        any_fit = true;
        fit_err = std::max(fit_err, std::abs(s.fit.tau / s.tau - 1.0));
      }
    } else {
      any_below = true;
      if (!s.trajectory.diverged) stuck += 1.0;
    }
  }

  CsvWriter fixed(ctx.output("fixed_points.csv"), {"c_hat", "m0", "k", "j_fixed", "tau"});
  const double k_max = ctx.config.real("inset_k_max");
  const auto points = ctx.config.integer("inset_points");
  for (double c : ctx.config.reals("c_hat"))
    for (double m0 : ctx.config.reals("m0")) {
      const double start = std::max(gaussian::divergence_threshold(c, m0), 0.0);
      if (!(k_max > start)) continue;
      for (std::uint64_t i = 1; i <= points; ++i) {
        const double k = start + (k_max - start) * static_cast<double>(i) / static_cast<double>(points);
        fixed.row(c, m0, k, gaussian::fixed_point(c, m0, k), gaussian::relaxation_time(c, m0, k));
      }
    }

  if (any_above) {
    ctx.check("fixed_point_residual", g_max, 1e-12, g_max <= 1e-12);
    ctx.check("flow_reaches_fixed_point", gap_max, 1e-8, gap_max <= 1e-8);
  }
  if (any_fit) ctx.check("relaxation_fit_rel_error", fit_err, 0.05, fit_err <= 0.05);
  if (any_below) ctx.check("below_threshold_flows_in_domain", stuck, 0.0, stuck == 0.0);
}

void run_fig2_left(Context& ctx) {
  const auto family = rotation_family(ctx.config);
  CsvWriter out(ctx.output("rotation.csv"), {"k", "t", "phi", "J1", "J2"});
  for (const auto& s : family)
    for (std::size_t i = 0; i < s.trajectory.size(); ++i) {
      const auto& v = s.trajectory.values[i];
      out.row(s.k, s.trajectory.times[i], v[0], v[1], v[2]);
    }
  if (!family.empty()) {
    const auto& last = *std::max_element(family.begin(), family.end(),
                                         [](const auto& a, const auto& b) { return a.k < b.k; });
    const double misalign = std::abs(std::sin(last.trajectory.back()[0]));
    ctx.check("aligned_at_largest_k", misalign, 1e-3, misalign <= 1e-3 && !last.trajectory.diverged);
  }
}

void run_fig2_right(Context& ctx) {
  const auto study = resampling_study(ctx.config);
  CsvWriter curves(ctx.output("resampling_error.csv"), {"snapshot_t", "k_prime", "E2"});
  CsvWriter snaps(ctx.output("snapshots.csv"), {"snapshot_t", "k_dagger", "E2_min"});
  CsvWriter modes(ctx.output("snapshot_modes.csv"), {"snapshot_t", "mode", "J"});
  auto all = study.snapshots;
  all.push_back(study.converged);
  for (const auto& s : all) {
    for (std::size_t i = 0; i < study.k_primes.size(); ++i) curves.row(s.t, study.k_primes[i], s.curve[i]);
    snaps.row(s.t, s.best.k_prime, s.best.value);
    for (Eigen::Index a = 0; a < s.J.size(); ++a) modes.row(s.t, static_cast<int>(a), s.J[a]);
  }
  CsvWriter flow(ctx.output("flow.csv"), {"mode", "t", "J"});
  for (std::size_t a = 0; a < study.trajectories.size(); ++a)
    for (std::size_t i = 0; i < study.trajectories[a].size(); ++i)
      flow.row(static_cast<int>(a), study.trajectories[a].times[i], study.trajectories[a].values[i][0]);

  ctx.check("converged_min_value", study.converged.best.value, 1e-14,
            study.converged.best.value <= 1e-14);
  const double offset = std::abs(study.converged.best.k_prime - study.k);
  ctx.check("converged_argmin_offset", offset, 1e-4, offset <= 1e-4);
  double reversals = 0.0;
  for (std::size_t i = 1; i < study.snapshots.size(); ++i)
    if (std::abs(study.snapshots[i].best.k_prime - study.k) >
        std::abs(study.snapshots[i - 1].best.k_prime - study.k))
      reversals += 1.0;
  ctx.check("argmin_moves_away_from_k", reversals, 0.0, reversals == 0.0);
}

void run_thm1(Context& ctx) {
  const auto study = exact_study(ctx.config);
  {
    CsvWriter hist(ctx.output("training_history.csv"), {"iteration", "residual"});
    for (std::size_t i = 0; i < study.report.mismatch_history.size(); ++i)
      hist.row(std::uint64_t{i}, study.report.mismatch_history[i]);
  }
  CsvWriter moments(ctx.output("moments.csv"), {"component", "data", "generated", "equilibrium"});
  for (Eigen::Index c = 0; c < study.data.size(); ++c)
    moments.row(static_cast<int>(c), study.data[c], study.generated[c], study.equilibrium[c]);
  CsvWriter kd(ctx.output("k_dagger.csv"), {"epsilon", "iterations", "component", "residual", "k_dagger"});
  for (const auto& p : study.k_dagger)
    kd.row(p.epsilon, std::uint64_t{p.iterations}, p.component, p.residual, p.k_dagger.value_or(kNaN));

  ctx.log << "  trained in " << study.report.iterations << " iterations"
          << (study.report.converged ? "" : " (not converged)") << "\n";
  ctx.check("generated_mismatch", study.generated_mismatch, 1e-8, study.generated_mismatch <= 1e-8);
  const double ratio = study.equilibrium_mismatch / study.generated_mismatch;
  ctx.check("equilibrium_to_generated_ratio", ratio, 100.0, ratio >= 100.0);
  if (!study.k_dagger.empty()) {
    double violations = 0.0;
    double prev = INFINITY;
    for (const auto& p : study.k_dagger) {
      const double gap = p.k_dagger ? std::abs(*p.k_dagger - study.k) : INFINITY;
      if (!(gap < prev)) violations += 1.0;
      prev = gap;
    }
    ctx.check("k_dagger_approaches_k", violations, 0.0, violations == 0.0);
  }
}

// --- Boltzmann machine training -------------------------------------------

struct LabelledRun {
  std::string label;
  double k = 0.0;
  boltzmann::Scheme scheme = boltzmann::Scheme::random_init;
  std::string metrics_file;
  std::string curve_file;  // empty: no curves
  std::uint64_t eval_k_max = 0;
  std::uint64_t eval_every = 0;
};

std::string fingerprint(const ExperimentConfig& c, const LabelledRun& r, const datasets::SpinDataset& data) {
  std::string fp = "label = " + r.label + "\nk = " + format_real(r.k) + "\nscheme = " +
                   boltzmann::to_string(r.scheme) + "\n";
  for (const char* key : {"seed", "learning_rate", "n_chains", "sweep", "average_last"})
    fp += std::string(key) + " = " + c.values().at(key) + "\n";
  fp += "samples = " + std::to_string(data.size()) + "\n";
  for (const auto& [k, v] : data.provenance) fp += "prov " + k + " = " + v + "\n";
  return fp;
}

TrainingRun train_labelled(Context& ctx, const datasets::SpinDataset& data, const LabelledRun& r) {
  const auto& c = ctx.config;
  TrainingJob job;
  auto& o = job.options;
  o.scheme = r.scheme;
  o.order = boltzmann::parse_site_order(c.text("sweep"));
  o.k = sweeps(r.k);
  o.learning_rate = c.real("learning_rate");
  o.n_updates = c.integer("n_updates");
  o.n_chains = c.integer("n_chains");
  o.seed = c.integer("seed");
  o.metrics_every = c.integer("metrics_every");
  o.checkpoint_every = c.integer("checkpoint_every");
  if (const auto avg = c.integer("average_last"); avg > 0) {
    if (avg > o.n_updates) throw ParameterError("average_last exceeds n_updates");
    o.average_from = o.n_updates - avg;
  }
  o.true_couplings = reference_couplings(data);
  job.eval_k_max = r.eval_k_max;
  job.eval_every = r.eval_every;
  if (r.eval_k_max) job.eval_chains = c.integer("eval_chains");
  job.checkpoint_dir = ctx.dir / "checkpoints" / r.label;
  job.fingerprint = fingerprint(c, r, data);

  std::optional<boltzmann::TrainState> start;
  if (c.flag("resume")) start = load_checkpoint(job.checkpoint_dir, job.fingerprint);
  const bool resumed = start.has_value();
  if (resumed) {
    const double t0 = static_cast<double>(start->update_t);
    ctx.log << "  " << r.label << ": resuming at update " << start->update_t << "\n";
    truncate_csv_rows(ctx.dir / r.metrics_file, t0, false);
    if (!r.curve_file.empty()) truncate_csv_rows(ctx.dir / r.curve_file, t0, false);
  } else {
    start = boltzmann::initial_train_state(data.n_spins(), o);
  }

  CsvWriter metrics(ctx.output(r.metrics_file),
                    {"update_t", "coupling_error", "E2_at_kprime_eq_k", "grad_norm"}, resumed);
  job.on_metrics = [&](const boltzmann::TrainMetrics& m) {
    metrics.row(m.update_t, m.coupling_error, m.e2_at_k, m.grad_norm);
    metrics.flush();
  };
  std::optional<CsvWriter> curves;
  if (!r.curve_file.empty()) {
    curves.emplace(ctx.output(r.curve_file), std::vector<std::string>{"update_t", "k_prime", "E2"}, resumed);
    job.on_curve = [&](const ErrorCurve& e) {
      for (std::size_t i = 0; i < e.values.size(); ++i)
        curves->row(e.update_t, std::uint64_t{i + 1}, e.values[i]);
      curves->flush();
    };
  }
  job.on_checkpoint = [&](std::uint64_t t) {
    ctx.log << "  " << r.label << ": update " << t << "/" << o.n_updates << "\n" << std::flush;
  };
  auto run = run_training(job, data, std::move(*start));
  if (run.diverged) ctx.log << "  " << r.label << ": parameters became non-finite, run stopped\n";
  return run;
}

std::string k_label(double k) { return "k" + format_real(k); }

datasets::SpinDataset dataset_for(Context& ctx) {
  auto data = training_dataset(ctx.config);
  if (ctx.config.text("dataset").empty()) datasets::save_dataset(ctx.output("dataset.txt"), data);
  ctx.log << "  dataset: " << data.size() << " samples of " << data.n_spins() << " spins\n";
  return data;
}

void curve_checks(Context& ctx, const TrainingRun& run, double k) {
  if (run.curves.empty()) return;
  const auto& v = run.curves.back().values;
  const auto best = std::min_element(v.begin(), v.end()) - v.begin() + 1;
  ctx.check("final_argmin_k_prime", static_cast<double>(best), k, static_cast<double>(best) == k);
  const auto kk = static_cast<std::size_t>(k);
  if (kk < v.size()) {
    const double ratio = v[kk - 1] / v.back();
    ctx.check("final_min_to_tail_ratio", ratio, 0.2, ratio <= 0.2);
  }
}

void run_fig3_left(Context& ctx) {
  const auto& c = ctx.config;
  const auto data = dataset_for(ctx);
  const double k = c.real("k");
  const auto scheme = boltzmann::parse_scheme(c.text("scheme"));
  LabelledRun main{k_label(k), k, scheme, "metrics.csv", "error_vs_kprime.csv",
                   c.integer("eval_k_max"), c.integer("eval_every")};
  const auto run = train_labelled(ctx, data, main);
  boltzmann::save_model(ctx.output("model_final.txt"), boltzmann::averaged_model(run.state));
  curve_checks(ctx, run, k);

  const auto inset_k = c.reals("inset_k");
  if (inset_k.empty()) return;
  CsvWriter inset(ctx.output("inset.csv"), {"k", "E2_at_kprime_eq_k"});
  std::vector<double> values;
  for (double ki : inset_k) {
    double e2 = kNaN;
    if (ki == k && !run.curves.empty() && sweeps(ki) <= run.curves.back().values.size()) {
      e2 = run.curves.back().values[sweeps(ki) - 1];
    } else {
      LabelledRun extra{"inset_" + k_label(ki), ki, scheme, "metrics_inset_" + k_label(ki) + ".csv",
                        "", 0, 0};
      const auto r = train_labelled(ctx, data, extra);
      const auto model = boltzmann::averaged_model(r.state);
      boltzmann::save_model(ctx.output("model_inset_" + k_label(ki) + ".txt"), model);
      const auto moments = datasets::data_moments(data);
      e2 = error_curve(model, moments, sweeps(ki), c.integer("eval_chains"), c.integer("seed"),
                       r.state.chains.order)
               .back();
    }
    inset.row(ki, e2);
    values.push_back(e2);
  }
  if (values.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double spread = *hi / *lo;
    ctx.check("inset_spread", spread, 2.0, spread <= 2.0);
  }
}

void run_fig3_right(Context& ctx) {
  const auto& c = ctx.config;
  const auto data = dataset_for(ctx);
  std::vector<LabelledRun> runs;
  for (double k : c.reals("k_values"))
    runs.push_back({k_label(k), k, boltzmann::Scheme::random_init, "metrics_" + k_label(k) + ".csv", "", 0, 0});
  if (const double pk = c.real("pcd_k"); pk > 0.0)
    runs.push_back({"pcd_" + k_label(pk), pk, boltzmann::Scheme::persistent,
                    "metrics_pcd_" + k_label(pk) + ".csv", "", 0, 0});
  for (const auto& r : runs) {
    const auto run = train_labelled(ctx, data, r);
    boltzmann::save_model(ctx.output("model_" + r.label + ".txt"), boltzmann::averaged_model(run.state));
  }
}

void run_custom(Context& ctx) {
  const auto& c = ctx.config;
  const auto data = dataset_for(ctx);
  const double k = c.real("k");
  LabelledRun r{"run", k, boltzmann::parse_scheme(c.text("scheme")), "metrics.csv",
                "error_vs_kprime.csv", c.integer("eval_k_max"), c.integer("eval_every")};
  const auto run = train_labelled(ctx, data, r);
  boltzmann::save_model(ctx.output("model_final.txt"), boltzmann::averaged_model(run.state));
}

}  // namespace

bool RunSummary::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

fs::path output_directory(const ExperimentConfig& config) {
  if (const auto& out = config.text("out"); !out.empty()) return out;
  if (const char* root = std::getenv("NONEQ_OUT_ROOT"); root && *root) return fs::path(root) / config.experiment();
  return fs::path("results") / config.experiment();
}

DirectoryLock::DirectoryLock(const fs::path& dir) : path_(dir / ".lock") {
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST)
      throw FormatError(dir.string() + " is in use by another run (remove " + path_.string() +
                        " if that run is gone)");
    throw FormatError("cannot create " + path_.string() + ": " + std::strerror(errno));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

DirectoryLock::~DirectoryLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

void write_summary_json(const fs::path& path, const RunSummary& summary) {
  nlohmann::json j;
  j["experiment"] = summary.experiment;
  j["all_pass"] = summary.all_pass();
  auto& checks = j["checks"] = nlohmann::json::array();
  for (const auto& c : summary.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  j["outputs"] = summary.outputs;
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) throw FormatError("cannot write " + path.string());
}

RunSummary run_experiment(const ExperimentConfig& config, std::ostream& log) {
  RunSummary summary;
  summary.experiment = config.experiment();
  summary.out_dir = output_directory(config);
  try {
    fs::create_directories(summary.out_dir);
    DirectoryLock lock(summary.out_dir);
    std::ofstream(summary.out_dir / "config.resolved", std::ios::binary) << config.resolved_text();
    Context ctx{config, summary.out_dir, log, summary};
    ctx.output("config.resolved");
    log << config.experiment() << " -> " << summary.out_dir.string() << "\n";
    const auto& id = config.experiment();
    if (id == "fig1") run_fig1(ctx);
    else if (id == "fig2-left") run_fig2_left(ctx);
    else if (id == "fig2-right") run_fig2_right(ctx);
    else if (id == "fig3-left") run_fig3_left(ctx);
    else if (id == "fig3-right") run_fig3_right(ctx);
    else if (id == "thm1-exact") run_thm1(ctx);
    else run_custom(ctx);
    std::sort(summary.outputs.begin(), summary.outputs.end());
    summary.outputs.erase(std::unique(summary.outputs.begin(), summary.outputs.end()), summary.outputs.end());
    summary.outputs.push_back("summary.json");
    write_summary_json(summary.out_dir / "summary.json", summary);
  } catch (const std::exception& e) {
    throw ExperimentError(config.experiment(), e.what());
  }
  return summary;
}

}  // namespace noneq::experiments
