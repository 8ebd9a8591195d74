#include "noneq/experiments/pipelines.hpp"

#include "noneq/boltzmann/io.hpp"
#include "noneq/boltzmann/metrics.hpp"
#include "noneq/errors.hpp"
#include "noneq/gaussian/rotation.hpp"
#include "noneq/markov/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace noneq::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Evaluation chains never share streams with training chains.
constexpr std::uint64_t kEvalStreamBase = std::uint64_t{1} << 40;

double flow_dt(const ExperimentConfig& config, double c_max) {
  const double dt = config.real("dt");
  if (dt < 0.0) throw ParameterError("dt must be non-negative");
  return dt > 0.0 ? dt : gaussian::default_flow_dt(c_max);
}

std::vector<double> broadcast(const std::vector<double>& v, std::size_t n, const char* key) {
  if (v.size() == n) return v;
  if (v.size() == 1) return std::vector<double>(n, v[0]);
  throw ParameterError(std::string(key) + " needs one value or one per mode");
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

IsingParams edge_model(int n, const std::string& edges, double coupling) {
  IsingParams p = IsingParams::zeros(n);
  std::istringstream in(edges);
  std::string item;
  while (std::getline(in, item, ',')) {
    int i = -1, j = -1;
    char dash = 0;
    std::istringstream e(item);
    if (!(e >> i >> dash >> j) || dash != '-' || i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw ParameterError("edges: cannot read '" + item + "' as a pair i-j of distinct spins");
    p.J(i, j) = p.J(j, i) = coupling;
  }
  return p;
}

}  // namespace

std::vector<FlowSeries> flow_family(const ExperimentConfig& config) {
  const auto c_hats = config.reals("c_hat");
  const auto m0s = config.reals("m0");
  const auto ks = config.reals("k_values");
  const auto inits = config.reals("j_init");
  const double t_end = config.real("t_end");
  const auto every = static_cast<std::size_t>(std::max<std::uint64_t>(config.integer("record_every"), 1));

  std::vector<FlowSeries> out;
  for (double c : c_hats)
    for (double m0 : m0s)
      for (double k : ks)
        for (double j0 : inits) {
          FlowSeries s;
          s.c_hat = c;
          s.m0 = m0;
          s.k = k;
          s.j_init = j0;
          s.above_threshold = k > gaussian::divergence_threshold(c, m0);
          s.trajectory = gaussian::integrate_mode_flow({j0, c, m0, 0.0}, k, t_end,
                                                       flow_dt(config, c), every);
          s.j_fixed = s.tau = kNaN;
          s.fit = {kNaN, kNaN, 0};
          if (s.above_threshold) {
            s.j_fixed = gaussian::fixed_point(c, m0, k);
            s.tau = gaussian::relaxation_time(c, m0, k);
            try {
              s.fit = gaussian::fit_exponential_tail(s.trajectory, s.j_fixed);
            } catch (const NumericalError&) {
              // Too few tail points at this recording cadence.
            }
          }
          out.push_back(std::move(s));
        }
  return out;
}

std::vector<RotationSeries> rotation_family(const ExperimentConfig& config) {
  gaussian::RotationInit init;
  init.state = {config.real("phi_init"), config.real("j1_init"), config.real("j2_init"),
                config.real("c1"), config.real("c2")};
  init.m0_1 = config.real("m0_1");
  init.m0_2 = config.real("m0_2");
  init.cross0 = config.real("cross0");
  const double dt = flow_dt(config, std::max(init.state.c1, init.state.c2));
  const auto every = static_cast<std::size_t>(std::max<std::uint64_t>(config.integer("record_every"), 1));
  std::vector<RotationSeries> out;
  for (double k : config.reals("k_values"))
    out.push_back({k, gaussian::integrate_rotation_flow(init, k, config.real("t_end"), dt, every)});
  return out;
}

ResamplingStudy resampling_study(const ExperimentConfig& config) {
  const auto c_hat = config.reals("c_hat");
  const std::size_t d = c_hat.size();
  if (d == 0) throw ParameterError("c_hat needs at least one mode");
  const auto m0 = broadcast(config.reals("m0"), d, "m0");
  const auto j_init = broadcast(config.reals("j_init"), d, "j_init");
  const double k = config.real("k");
  const double lo = config.real("k_prime_min"), hi = config.real("k_prime_max");
  const auto n_points = config.integer("k_prime_points");
  if (!(hi > lo) || lo < 0.0 || n_points < 2) throw ParameterError("invalid generation-time grid");

  ResamplingStudy study;
  study.k = k;
  for (std::uint64_t i = 0; i < n_points; ++i)
    study.k_primes.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_points - 1));

  const Eigen::VectorXd c = to_vector(c_hat), m = to_vector(m0);
  auto snapshot = [&](double t, const Eigen::VectorXd& J) {
    ResamplingSnapshot s;
    s.t = t;
    s.J = J;
    s.curve = gaussian::resampling_error_curve(J, c, m, study.k_primes);
    s.best = gaussian::best_sampling_time(J, c, m, lo, hi);
    return s;
  };
  auto mode_at = [&](std::size_t a, double t) {
    const gaussian::ModeState init{j_init[a], c_hat[a], m0[a], 0.0};
    const auto traj = gaussian::integrate_mode_flow(init, k, t, flow_dt(config, c_hat[a]));
    if (traj.diverged)
      throw NumericalError("mode " + std::to_string(a) + " left J > 0 before t = " + std::to_string(t));
    return traj.back()[0];
  };

  for (double t : config.reals("snapshot_t")) {
    Eigen::VectorXd J(d);
    for (std::size_t a = 0; a < d; ++a) J[static_cast<Eigen::Index>(a)] = mode_at(a, t);
    study.snapshots.push_back(snapshot(t, J));
  }
  Eigen::VectorXd J_inf(d);
  for (std::size_t a = 0; a < d; ++a)
    J_inf[static_cast<Eigen::Index>(a)] = gaussian::fixed_point(c_hat[a], m0[a], k);
  study.converged = snapshot(std::numeric_limits<double>::infinity(), J_inf);

  const double t_end = config.real("t_end");
  for (std::size_t a = 0; a < d; ++a) {
    const double dt = flow_dt(config, c_hat[a]);
    const auto every = static_cast<std::size_t>(std::max(1.0, std::round(t_end / dt / 2000.0)));
    study.trajectories.push_back(gaussian::integrate_mode_flow({j_init[a], c_hat[a], m0[a], 0.0}, k,
                                                               t_end, dt, every));
  }
  return study;
}

ExactStudy exact_study(const ExperimentConfig& config) {
  const auto n = static_cast<int>(config.integer("n_spins"));
  const double k = config.real("k");
  if (!(k > 0.0)) throw ParameterError("k must be positive");
  const IsingParams truth = edge_model(n, config.text("edges"), config.real("coupling"));

  markov::SamplingProcess process;
  process.p0 = markov::uniform_distribution(n);
  const std::string& dyn = config.text("dynamics");
  // k counts sweeps; a sweep is N single-site updates.
  process.k = n * k;
  if (dyn == "continuous") {
    process.dynamics = markov::Dynamics::continuous_glauber;
  } else if (dyn == "discrete") {
    process.dynamics = markov::Dynamics::discrete_heatbath;
    if (process.k != std::floor(process.k))
      throw ParameterError("discrete dynamics needs a whole number of single-site steps");
  } else {
    throw ParameterError("dynamics must be continuous or discrete, got '" + dyn + "'");
  }

  ExactStudy study;
  study.k = k;
  study.data = markov::gibbs_moments(truth);
  markov::TrainExactOptions opts;
  opts.learning_rate = config.real("learning_rate");
  opts.tol = config.real("tol");
  opts.max_iters = config.integer("max_iters");
  const IsingParams zero = IsingParams::zeros(n);
  study.report = markov::train_exact(zero, study.data, process, opts);
  study.generated = markov::finite_k_moments(study.report.params, process);
  study.equilibrium = markov::gibbs_moments(study.report.params);
  study.generated_mismatch = (study.generated - study.data).cwiseAbs().maxCoeff();
  study.equilibrium_mismatch = (study.equilibrium - study.data).cwiseAbs().maxCoeff();

  const double scan_lo = config.real("k_scan_min"), scan_hi = config.real("k_scan_max");
  for (double eps : config.reals("epsilons")) {
    auto o = opts;
    o.tol = eps;
    const auto r = markov::train_exact(zero, study.data, process, o);
    KDagger kd;
    kd.epsilon = eps;
    kd.iterations = r.iterations;
    kd.residual = r.residual;
    r.gradient.cwiseAbs().maxCoeff(&kd.component);
    if (auto root = markov::zero_error_time(r.params, study.data, process, process.p0, kd.component,
                                            n * scan_lo, n * scan_hi, 2000))
      kd.k_dagger = *root / n;
    study.k_dagger.push_back(kd);
  }
  return study;
}

std::uint64_t sweeps(double k) {
  if (!(k >= 1.0) || k != std::floor(k) || k > 1e12)
    throw ParameterError("k must be a whole number of sweeps >= 1, got " + format_real(k));
  return static_cast<std::uint64_t>(k);
}

datasets::SpinDataset training_dataset(const ExperimentConfig& config) {
  const std::string& path = config.text("dataset");
  if (!path.empty()) return datasets::load_dataset(path);
  datasets::Ising2dSpec spec;
  spec.L = static_cast<int>(config.integer("L"));
  spec.beta = config.real("beta");
  spec.n_samples = config.integer("n_samples");
  spec.equil_sweeps = config.integer("equil_sweeps");
  spec.gap_sweeps = config.integer("gap_sweeps");
  spec.seed = config.integer("data_seed");
  return datasets::generate_ising2d(spec);
}

std::optional<Eigen::MatrixXd> reference_couplings(const datasets::SpinDataset& data) {
  for (const auto& [key, value] : data.provenance)
    if (key == "generator" && value == "ising2d") {
      const auto spec = datasets::ising2d_spec_from(data);
      return datasets::ising2d_couplings(spec.L, spec.beta).J;
    }
  return std::nullopt;
}

std::vector<double> error_curve(const boltzmann::BoltzmannModel& model,
                                const boltzmann::MomentEstimate& data, std::uint64_t k_max,
                                std::size_t n_chains, std::uint64_t seed,
                                boltzmann::SiteOrder order) {
  auto chains = boltzmann::make_ensemble(n_chains, model.n_spins(), boltzmann::Scheme::random_init,
                                         seed, kEvalStreamBase);
  chains.order = order;
  boltzmann::init_random(chains);
  std::vector<double> curve;
  for (std::uint64_t kp = 1; kp <= k_max; ++kp) {
    boltzmann::run_steps(chains, model, 1);
    const auto est = boltzmann::estimate_moments(chains.states);
    curve.push_back(boltzmann::correlation_error(est, data));
  }
  return curve;
}

std::optional<boltzmann::TrainState> load_checkpoint(const std::filesystem::path& dir,
                                                     const std::string& fingerprint) {
  const auto state_path = dir / "state.json";
  if (!std::filesystem::exists(state_path)) return std::nullopt;
  std::ifstream in(dir / "fingerprint.txt", std::ios::binary);
  std::ostringstream stored;
  stored << in.rdbuf();
  if (stored.str() != fingerprint)
    throw FormatError("checkpoint in " + dir.string() +
                      " was written with different training settings; remove it or set resume = false");
  return boltzmann::load_train_state(state_path);
}

void save_checkpoint(const std::filesystem::path& dir, const boltzmann::TrainState& state,
                     const std::string& fingerprint) {
  // Write next to the old checkpoint, then swap, so a crash leaves one intact.
  auto tmp = dir;
  tmp += ".tmp";
  std::filesystem::remove_all(tmp);
  std::filesystem::create_directories(tmp);
  boltzmann::save_train_state(tmp / "state.json", tmp / "model.txt", state);
  std::ofstream(tmp / "fingerprint.txt", std::ios::binary) << fingerprint;
  std::filesystem::remove_all(dir);
  std::filesystem::rename(tmp, dir);
}

TrainingRun run_training(const TrainingJob& job, const datasets::SpinDataset& data,
                         boltzmann::TrainState start) {
  const auto moments = datasets::data_moments(data);
  const std::uint64_t n = job.options.n_updates;
  const std::uint64_t every = std::max<std::uint64_t>(job.options.metrics_every, 1);
  const std::uint64_t ckpt = job.checkpoint_dir.empty() ? 0 : job.options.checkpoint_every;

  TrainingRun run;
  run.state = std::move(start);
  boltzmann::reconcile_average(run.state, job.options);
  auto opts = job.options;
  opts.checkpoint_every = 0;
  opts.on_metrics = nullptr;
  opts.on_checkpoint = nullptr;

  auto eval_due = [&](std::uint64_t t) {
    return job.eval_k_max && t > 0 && (t == n || (job.eval_every && t % job.eval_every == 0));
  };
  auto evaluate = [&]() {
    ErrorCurve c{run.state.update_t, error_curve(boltzmann::averaged_model(run.state), moments, job.eval_k_max,
                                                 job.eval_chains, job.options.seed, job.options.order)};
    if (job.on_curve) job.on_curve(c);
    run.curves.push_back(std::move(c));
  };
  // A resumed run redoes the curve of the checkpoint it starts from.
  if (eval_due(run.state.update_t)) evaluate();

  auto next_multiple = [](std::uint64_t t, std::uint64_t step) { return (t / step + 1) * step; };
  while (run.state.update_t < n) {
    std::uint64_t stop = n;
    if (ckpt) stop = std::min(stop, next_multiple(run.state.update_t, ckpt));
    if (job.eval_every && job.eval_k_max) stop = std::min(stop, next_multiple(run.state.update_t, job.eval_every));
    opts.n_updates = stop;
    auto part = boltzmann::train(moments, &data.samples, std::move(run.state), opts);
    run.state = std::move(part.state);
    for (const auto& m : part.metrics) {
      // Segment ends are not metric rows unless they end the whole run.
      if (m.update_t % every != 0 && m.update_t + 1 != n) continue;
      run.metrics.push_back(m);
      if (job.on_metrics) job.on_metrics(m);
    }
    if (part.diverged) {
      run.diverged = true;
      break;
    }
    const std::uint64_t t = run.state.update_t;
    if (eval_due(t)) evaluate();
    if (ckpt && (t % ckpt == 0 || t == n)) {
      save_checkpoint(job.checkpoint_dir, run.state, job.fingerprint);
      if (job.on_checkpoint) job.on_checkpoint(t);
    }
  }
  return run;
}

}  // namespace noneq::experiments
