#include "doctest.h"

#include "noneq/boltzmann/io.hpp"
#include "noneq/boltzmann/mean_field.hpp"
#include "noneq/boltzmann/metrics.hpp"
#include "noneq/boltzmann/training.hpp"
#include "noneq/errors.hpp"
#include "noneq/markov/spectral.hpp"
#include "noneq/markov/training.hpp"
#include "noneq/numerics/eigen.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace noneq;
using namespace noneq::boltzmann;

namespace {

BoltzmannModel ring(int n, double coupling) {
  auto m = BoltzmannModel::zeros(n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    m.J(i, j) = m.J(j, i) = coupling;
  }
  return m;
}

BoltzmannModel random_model(int n, std::uint64_t seed, double scale) {
  numerics::RngStream rng(seed, 0);
  auto m = BoltzmannModel::zeros(n);
  for (int i = 0; i < n; ++i) {
    m.h[i] = scale * rng.gaussian();
    for (int j = i + 1; j < n; ++j) m.J(i, j) = m.J(j, i) = scale * rng.gaussian();
  }
  return m;
}

std::size_t state_index(const SpinMatrix& s, Eigen::Index row) {
  std::size_t a = 0;
  for (Eigen::Index i = 0; i < s.cols(); ++i)
    if (s(row, i) > 0) a |= std::size_t{1} << i;
  return a;
}

// Total variation between the empirical law of the rows and `p`, with the
// standard error scale 0.5 * sum_a sqrt(p_a (1 - p_a) / M).
std::pair<double, double> tv_and_se(const SpinMatrix& s, const Eigen::VectorXd& p) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(p.size());
  for (Eigen::Index r = 0; r < s.rows(); ++r) counts[static_cast<Eigen::Index>(state_index(s, r))] += 1;
  const double m = static_cast<double>(s.rows());
  const double tv = 0.5 * (counts / m - p).cwiseAbs().sum();
  const double se = 0.5 * (p.array() * (1.0 - p.array()) / m).sqrt().sum();
  return {tv, se};
}

// Law after k heat-bath steps (N single-site updates each) from uniform.
Eigen::VectorXd exact_after_steps(const BoltzmannModel& model, int steps) {
  const auto op = markov::build_discrete_heatbath(markov::energy_table(model));
  const int n = model.n_spins();
  const auto ex = markov::spectral_expansion(op, markov::uniform_distribution(n));
  return markov::evolve(ex, static_cast<double>(steps * n));
}

}  // namespace

TEST_CASE("heatbath_step: unbiased coin for a free model") {
  auto chains = make_ensemble(100000, 3, Scheme::random_init, 1);
  init_random(chains);
  heatbath_step(chains, BoltzmannModel::zeros(3));
  CHECK(chains.k_elapsed == 1);
  const auto est = estimate_moments(chains.states);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(est.means[i]) <= 4.0 * est.means_se[i]);
  CHECK(std::abs(est.means.mean()) <= 4.0 / std::sqrt(3.0 * 100000));
}

TEST_CASE("heatbath_step: independent spins relax to tanh(h)") {
  auto model = BoltzmannModel::zeros(3);
  model.h.setConstant(0.5);
  const auto est = sample_k(model, Scheme::random_init, 5, 100000, 2);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(est.means[i] - std::tanh(0.5)) <= 3.0 * est.means_se[i]);
}

TEST_CASE("heatbath_step: one-step law equals the exact kernel (N=4 ring)") {
  const auto model = ring(4, 0.44);
  auto chains = make_ensemble(1000000, 4, Scheme::random_init, 3);
  init_random(chains);
  heatbath_step(chains, model);
  const auto [tv, se] = tv_and_se(chains.states, exact_after_steps(model, 1));
  CHECK(tv <= 3.0 * se);
}

TEST_CASE("property: one-step law equals the exact kernel for random models (N <= 6)") {
  for (int n : {2, 3, 5, 6}) {
    const auto model = random_model(n, 40 + n, 0.6);
    auto chains = make_ensemble(200000, n, Scheme::random_init, 50 + n);
    init_random(chains);
    heatbath_step(chains, model);
    const auto [tv, se] = tv_and_se(chains.states, exact_after_steps(model, 1));
    CHECK(tv <= 3.0 * se);
  }
}

TEST_CASE("heatbath_step: a sequential sweep applies every site kernel once, in order") {
  const auto model = random_model(4, 71, 0.7);
  const auto table = markov::energy_table(model);
  const auto gibbs = markov::gibbs_distribution(table).probabilities;
  // Law after resampling spins 0, 1, 2, 3 in turn from uniform.
  Eigen::VectorXd p = markov::uniform_distribution(4);
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(p.size());
    for (Eigen::Index a = 0; a < p.size(); ++a) {
      const Eigen::Index b = a ^ (Eigen::Index{1} << i);
      const double stay = gibbs[a] / (gibbs[a] + gibbs[b]);
      next[a] += stay * p[a];
      next[b] += (1.0 - stay) * p[a];
    }
    p = next;
  }
  auto chains = make_ensemble(1000000, 4, Scheme::random_init, 72);
  chains.order = SiteOrder::sequential;
  init_random(chains);
  heatbath_step(chains, model);
  const auto [tv, se] = tv_and_se(chains.states, p);
  CHECK(tv <= 3.0 * se);

  // A strong field sets every spin in one sequential sweep; random sites miss some.
  auto pinned = BoltzmannModel::zeros(6);
  pinned.h.setConstant(30.0);
  auto seq = make_ensemble(2000, 6, Scheme::random_init, 73);
  seq.order = SiteOrder::sequential;
  init_random(seq);
  heatbath_step(seq, pinned);
  CHECK(seq.states.cast<int>().minCoeff() == 1);
  auto rnd = make_ensemble(2000, 6, Scheme::random_init, 73);
  init_random(rnd);
  heatbath_step(rnd, pinned);
  CHECK(rnd.states.cast<int>().minCoeff() == -1);

  CHECK(parse_site_order("sequential") == SiteOrder::sequential);
  CHECK(to_string(SiteOrder::random_site) == "random-site");
  CHECK_THROWS_AS(parse_site_order("checkerboard"), ParameterError);
}

TEST_CASE("sample_k: initialization law, equilibrium, data requirement") {
  const auto model = ring(4, 0.44);
  const auto k0 = sample_k(model, Scheme::random_init, 0, 50000, 4);
  for (Eigen::Index p = 0; p < 4; ++p) CHECK(std::abs(k0.means[p]) <= 4.0 * k0.means_se[p]);
  for (Eigen::Index p = 0; p < 6; ++p)
    CHECK(std::abs(k0.correlations[p]) <= 4.0 * k0.correlations_se[p]);

  const auto eq = sample_k(model, Scheme::random_init, 50, 100000, 5);
  const Eigen::VectorXd gibbs = markov::gibbs_moments(model);
  const Eigen::VectorXd se = [&] {
    Eigen::VectorXd s(10);
    s << eq.correlations_se, eq.means_se;
    return s;
  }();
  for (Eigen::Index p = 0; p < 10; ++p) CHECK(std::abs(eq.flat()[p] - gibbs[p]) <= 3.0 * se[p]);

  auto chains = make_ensemble(10, 4, Scheme::data_init, 6);
  CHECK_THROWS_AS(sample_k(model, Scheme::data_init, 1, chains, nullptr), ParameterError);
  SpinMatrix data = SpinMatrix::Ones(3, 4);
  const auto cd0 = sample_k(model, Scheme::data_init, 0, chains, &data);
  CHECK(cd0.means.minCoeff() == 1.0);
}

TEST_CASE("sample_k: persistent chains continue and count elapsed steps") {
  const auto model = ring(4, 0.3);
  auto chains = make_ensemble(100, 4, Scheme::persistent, 7);
  init_random(chains);
  const SpinMatrix before = chains.states;
  sample_k(model, Scheme::persistent, 0, chains);
  CHECK(chains.states == before);
  sample_k(model, Scheme::persistent, 3, chains);
  sample_k(model, Scheme::persistent, 2, chains);
  CHECK(chains.k_elapsed == 5);
}

TEST_CASE("property: averaged sample_k moments are unbiased for the finite-k law") {
  const int n = 4, k = 2;
  const auto model = random_model(n, 8, 0.5);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(num_parameters(n));
  const std::size_t m = 500;
  for (std::uint64_t e = 0; e < 100; ++e) sum += sample_k(model, Scheme::random_init, k, m, 100 + e).flat();
  const Eigen::VectorXd avg = sum / 100.0;
  const markov::SamplingProcess process{markov::Dynamics::discrete_heatbath, double(k * n),
                                        markov::uniform_distribution(n)};
  const Eigen::VectorXd exact = markov::finite_k_moments(model, process);
  for (Eigen::Index p = 0; p < avg.size(); ++p) {
    const double se = std::sqrt((1.0 - exact[p] * exact[p]) / (100.0 * m));
    CHECK(std::abs(avg[p] - exact[p]) <= 3.0 * se);
  }
}

TEST_CASE("correlation_error and coupling_error") {
  MomentEstimate a;
  a.means = Eigen::VectorXd::Zero(4);
  a.correlations = Eigen::VectorXd::LinSpaced(6, -0.5, 0.5);
  MomentEstimate b = a;
  CHECK(correlation_error(a, b) == 0.0);
  b.correlations.array() += 0.1;
  CHECK(correlation_error(a, b) == doctest::Approx(0.01));
  MomentEstimate c;
  c.means = Eigen::VectorXd::Zero(3);
  c.correlations = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(correlation_error(a, c), ParameterError);

  const auto m = random_model(5, 9, 1.0);
  CHECK(coupling_error(m.J, m.J) == 0.0);
  Eigen::MatrixXd shifted = m.J;
  shifted.array() += 0.25;
  CHECK(coupling_error(shifted, m.J) == doctest::Approx(0.25));
  CHECK_THROWS_AS(coupling_error(m.J, Eigen::MatrixXd::Zero(4, 4)), ParameterError);
}

TEST_CASE("mf_correlation_k: free spins, asymptote, symmetry, domain") {
  Eigen::MatrixXd c0(2, 2);
  c0 << 0.4, 0.2, 0.2, 0.9;
  const auto free_c = mf_correlation_k(Eigen::VectorXd::Zero(2), c0, 0.7);
  const Eigen::MatrixXd expected =
      Eigen::MatrixXd::Identity(2, 2) + (c0 - Eigen::MatrixXd::Identity(2, 2)) * std::exp(-1.4);
  CHECK((free_c - expected).cwiseAbs().maxCoeff() <= 1e-15);

  const Eigen::Vector2d spec(0.3, -0.2);
  const double k_inf = 20.0 / (2.0 - 2.0 * spec.maxCoeff());
  const auto late = mf_correlation_k(spec, c0, k_inf);
  CHECK(late(0, 0) == doctest::Approx(1.0 / 0.7).epsilon(1e-8));
  CHECK(late(1, 1) == doctest::Approx(1.0 / 1.2).epsilon(1e-8));
  CHECK(std::abs(late(0, 1)) <= 1e-8);
  const auto mid = mf_correlation_k(spec, c0, 0.8);
  CHECK(mid(0, 1) == mid(1, 0));
  CHECK(mf_correlation_k(spec, c0, 0.0) == c0);
  CHECK_THROWS_AS(mf_correlation_k(Eigen::Vector2d(1.0, 0.1), c0, 1.0), ParameterError);
}

TEST_CASE("mf_correlation_matrix: linearization error is small and second order") {
  const int n = 6;
  numerics::RngStream rng(3, 0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = rng.gaussian();
  a *= 0.2 / numerics::sym_eig(a).eigenvalues.maxCoeff();
  const Eigen::MatrixXd f = markov::observable_table(n);
  auto deviation = [&](const Eigen::MatrixXd& coupling) {
    BoltzmannModel m = BoltzmannModel::zeros(n);
    m.J = coupling;
    const auto ex = markov::spectral_expansion(
        markov::build_continuous_glauber(markov::energy_table(m)), markov::uniform_distribution(n));
    double dev = 0.0;
    for (double k : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      const Eigen::VectorXd p = markov::evolve(ex, n * k);
      const Eigen::MatrixXd states = markov::observable_table(n).rightCols(n);
      const Eigen::MatrixXd exact = states.transpose() * p.asDiagonal() * states;
      const Eigen::MatrixXd mf =
          mf_correlation_matrix(coupling, Eigen::MatrixXd::Identity(n, n), k);
      dev = std::max(dev, (mf - exact).cwiseAbs().maxCoeff() / exact.cwiseAbs().maxCoeff());
    }
    return dev;
  };
  const double d1 = deviation(a), d2 = deviation(0.5 * a);
  MESSAGE("mean-field deviation " << d1 << ", halved couplings " << d2);
  CHECK(d1 <= 0.05);
  CHECK(d1 / d2 >= 3.0);
  CHECK(d1 / d2 <= 6.0);
}

TEST_CASE("train: zero updates, reproducibility, metrics") {
  const auto truth = ring(4, 0.4);
  const auto data = sample_k(truth, Scheme::random_init, 40, 3000, 10);
  TrainOptions opts;
  opts.k = 2;
  opts.n_chains = 200;
  opts.n_updates = 0;
  opts.seed = 11;
  SpinMatrix dummy = SpinMatrix::Ones(1, 4);
  auto r0 = train(data, &dummy, initial_train_state(4, opts), opts);
  CHECK(flatten(r0.state.model).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r0.metrics.empty());

  opts.n_updates = 50;
  opts.learning_rate = 0.05;
  opts.true_couplings = truth.J;
  opts.metrics_every = 10;
  const auto r1 = train(data, nullptr, initial_train_state(4, opts), opts);
  const auto r2 = train(data, nullptr, initial_train_state(4, opts), opts);
  CHECK(flatten(r1.state.model) == flatten(r2.state.model));
  CHECK(r1.metrics.size() == 6);
  CHECK(r1.metrics.front().update_t == 0);
  CHECK(r1.metrics.back().update_t == 49);
  CHECK(r1.metrics.back().coupling_error < r1.metrics.front().coupling_error);
  CHECK(std::isfinite(r1.metrics.back().e2_at_k));

  opts.scheme = Scheme::data_init;
  CHECK_THROWS_AS(train(data, nullptr, initial_train_state(4, opts), opts), ParameterError);
}

TEST_CASE("train: resumed run is bitwise identical to an uninterrupted one") {
  const auto truth = ring(4, 0.4);
  const auto data = sample_k(truth, Scheme::random_init, 40, 2000, 12);
  TrainOptions opts;
  opts.scheme = Scheme::persistent;
  opts.order = SiteOrder::sequential;
  opts.k = 1;
  opts.n_chains = 100;
  opts.n_updates = 40;
  opts.learning_rate = 0.05;
  opts.seed = 13;
  // The checkpoint lands while the parameter average is accumulating.
  opts.average_from = 10;
  const auto full = train(data, nullptr, initial_train_state(4, opts), opts);
  REQUIRE(full.state.average_count == 30);

  const auto dir = std::filesystem::temp_directory_path() / "noneq_test_resume";
  std::filesystem::create_directories(dir);
  opts.checkpoint_every = 15;
  int saved = 0;
  opts.on_checkpoint = [&](const TrainState& s) {
    if (s.update_t == 15) {
      save_train_state(dir / "state.json", dir / "model.txt", s);
      ++saved;
    }
  };
  train(data, nullptr, initial_train_state(4, opts), opts);
  REQUIRE(saved == 1);
  opts.on_checkpoint = nullptr;
  const auto restored = load_train_state(dir / "state.json");
  CHECK(restored.update_t == 15);
  CHECK(restored.chains.order == SiteOrder::sequential);
  CHECK(restored.average_count == 5);
  const auto resumed = train(data, nullptr, restored, opts);
  CHECK(flatten(resumed.state.model) == flatten(full.state.model));
  CHECK(resumed.state.chains.states == full.state.chains.states);
  CHECK(flatten(averaged_model(resumed.state)) == flatten(averaged_model(full.state)));
  std::filesystem::remove_all(dir);
}

TEST_CASE("train: averaged model is the mean of the tail iterates") {
  const auto data = sample_k(ring(4, 0.4), Scheme::random_init, 40, 2000, 12);
  TrainOptions opts;
  opts.k = 2;
  opts.n_chains = 100;
  opts.n_updates = 20;
  opts.learning_rate = 0.05;
  opts.checkpoint_every = 1;
  std::vector<Eigen::VectorXd> iterates;
  opts.on_checkpoint = [&](const TrainState& s) { iterates.push_back(flatten(s.model)); };
  const auto plain = train(data, nullptr, initial_train_state(4, opts), opts);
  CHECK(plain.state.average_count == 0);
  CHECK(flatten(averaged_model(plain.state)) == flatten(plain.state.model));

  opts.average_from = 14;
  iterates.clear();
  const auto avg = train(data, nullptr, initial_train_state(4, opts), opts);
  REQUIRE(iterates.size() == 20);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(iterates.front().size());
  for (std::size_t t = 14; t < 20; ++t) mean += iterates[t];
  mean /= 6.0;
  CHECK(avg.state.average_count == 6);
  CHECK((flatten(averaged_model(avg.state)) - mean).cwiseAbs().maxCoeff() <= 1e-15);
  // Averaging does not change the trajectory itself.
  CHECK(flatten(avg.state.model) == flatten(plain.state.model));

  // A state from another averaging window is dropped before the window, refused inside it.
  TrainState early = avg.state;
  opts.average_from = 30;
  reconcile_average(early, opts);
  CHECK(early.average_count == 0);
  TrainState inside = avg.state;
  opts.average_from = 10;
  CHECK_THROWS_AS(reconcile_average(inside, opts), ParameterError);
}

TEST_CASE("train: generated moments reproduce the data at the training k") {
  const auto truth = ring(4, 0.5);
  const auto data = sample_k(truth, Scheme::random_init, 60, 4000, 20);
  TrainOptions opts;
  opts.k = 2;
  opts.n_chains = 4000;
  opts.n_updates = 1000;
  opts.learning_rate = 0.05;
  opts.seed = 21;
  auto run = train(data, nullptr, initial_train_state(4, opts), opts);
  opts.learning_rate = 0.005;
  opts.n_updates = 1500;
  run = train(data, nullptr, run.state, opts);
  const auto gen = sample_k(run.state.model, Scheme::random_init, 2, 200000, 22);
  for (Eigen::Index p = 0; p < 6; ++p)
    CHECK(std::abs(gen.correlations[p] - data.correlations[p]) <= 3.0 * gen.correlations_se[p]);
  // The same model sampled near equilibrium misses the data.
  const auto eq = sample_k(run.state.model, Scheme::random_init, 60, 200000, 23);
  CHECK(correlation_error(eq, data) > 10.0 * correlation_error(gen, data));
}

TEST_CASE("train: long chains recover the maximum-likelihood couplings") {
  const int n = 5;
  const auto truth = random_model(n, 30, 0.3);
  // Data moments are exact Gibbs moments, so the ML model is the truth.
  const Eigen::VectorXd target = markov::gibbs_moments(truth);
  MomentEstimate data;
  data.correlations = target.head(num_pairs(n));
  data.means = target.tail(n);
  data.n_samples = 1;
  const auto ex = markov::spectral_expansion(
      markov::build_discrete_heatbath(markov::energy_table(truth)), markov::uniform_distribution(n));
  const double sweeps = markov::mixing_time(ex) / n;
  TrainOptions opts;
  opts.k = static_cast<std::uint64_t>(std::ceil(50.0 * std::max(sweeps, 1.0)));
  opts.n_chains = 1000;
  opts.n_updates = 600;
  opts.learning_rate = 0.1;
  opts.seed = 31;
  auto run = train(data, nullptr, initial_train_state(n, opts), opts);
  opts.learning_rate = 0.01;
  opts.n_updates = 800;
  run = train(data, nullptr, run.state, opts);
  CHECK(coupling_error(run.state.model.J, truth.J) <= 0.02);
  CHECK((run.state.model.h - truth.h).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("model file round trip and format errors") {
  const auto m = random_model(5, 40, 1.0);
  std::stringstream ss;
  write_model(ss, m);
  const auto back = read_model(ss);
  CHECK(back.J == m.J);
  CHECK(back.h == m.h);

  std::stringstream bad("not-a-model\n2\n0.1\n0 0\n");
  CHECK_THROWS_AS(read_model(bad), FormatError);
  std::stringstream truncated("noneq-model v1\n3\n0.1 0.2\n");
  CHECK_THROWS_AS(read_model(truncated), FormatError);
  std::stringstream garbage("noneq-model v1\n2\n0.1\n0 x\n");
  CHECK_THROWS_AS(read_model(garbage), FormatError);
  CHECK(parse_scheme("pcd") == Scheme::persistent);
  CHECK_THROWS_AS(parse_scheme("gibbs"), ParameterError);
}
