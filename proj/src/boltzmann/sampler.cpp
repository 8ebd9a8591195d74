#include "noneq/boltzmann/sampler.hpp"

#include "noneq/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

namespace noneq::boltzmann {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::random_init: return "random-init";
    case Scheme::data_init: return "data-init";
    case Scheme::persistent: return "persistent";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "random-init" || name == "rdm") return Scheme::random_init;
  if (name == "data-init" || name == "cd") return Scheme::data_init;
  if (name == "persistent" || name == "pcd") return Scheme::persistent;
  throw ParameterError("unknown sampling scheme '" + name +
                       "' (expected random-init, data-init or persistent)");
}

std::string to_string(SiteOrder order) {
  return order == SiteOrder::sequential ? "sequential" : "random-site";
}

SiteOrder parse_site_order(const std::string& name) {
  if (name == "random-site") return SiteOrder::random_site;
  if (name == "sequential") return SiteOrder::sequential;
  throw ParameterError("unknown site order '" + name + "' (expected random-site or sequential)");
}

ChainEnsemble make_ensemble(std::size_t n_chains, int n_spins, Scheme scheme, std::uint64_t seed,
                            std::uint64_t stream_base) {
  if (n_chains < 1) throw ParameterError("ensemble needs at least one chain");
  if (n_spins < 1) throw ParameterError("ensemble needs at least one spin");
  ChainEnsemble e;
  e.states = SpinMatrix::Ones(static_cast<Eigen::Index>(n_chains), n_spins);
  e.scheme = scheme;
  e.streams.reserve(n_chains);
  for (std::size_t c = 0; c < n_chains; ++c) e.streams.emplace_back(seed, stream_base + c);
  return e;
}

Eigen::VectorXd MomentEstimate::flat() const {
  Eigen::VectorXd out(correlations.size() + means.size());
  out << correlations, means;
  return out;
}

Eigen::MatrixXd MomentEstimate::correlation_matrix() const {
  const int n = n_spins();
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) c(i, j) = c(j, i) = correlations[pair_index(i, j, n)];
  return c;
}

MomentEstimate estimate_moments(const SpinMatrix& samples) {
  const Eigen::Index m = samples.rows();
  const int n = static_cast<int>(samples.cols());
  if (m < 1) throw ParameterError("estimate_moments: no samples");
  const Eigen::MatrixXd s = samples.cast<double>();
  const Eigen::MatrixXd c = (s.transpose() * s) / static_cast<double>(m);
  MomentEstimate est;
  est.n_samples = static_cast<std::size_t>(m);
  est.means = s.colwise().mean().transpose();
  est.correlations.resize(num_pairs(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) est.correlations[pair_index(i, j, n)] = c(i, j);
  // Each statistic is a +-1 variable, so its variance is 1 - mean^2.
  const double denom = static_cast<double>(std::max<Eigen::Index>(m - 1, 1));
  est.means_se = ((1.0 - est.means.array().square()).max(0.0) / denom).sqrt().matrix();
  est.correlations_se =
      ((1.0 - est.correlations.array().square()).max(0.0) / denom).sqrt().matrix();
  return est;
}

void init_random(ChainEnsemble& chains) {
  const int n = chains.n_spins();
  for (std::size_t c = 0; c < chains.n_chains(); ++c) {
    auto& rng = chains.streams[c];
    std::uint64_t bits = 0;
    for (int i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng.next_u64();
      chains.states(static_cast<Eigen::Index>(c), i) = (bits >> (i % 64)) & 1 ? 1 : -1;
    }
  }
  chains.k_elapsed = 0;
}

void init_from_data(ChainEnsemble& chains, const SpinMatrix& data) {
  if (data.rows() < 1) throw ParameterError("data-init scheme needs a non-empty dataset");
  if (data.cols() != chains.states.cols())
    throw ParameterError("data-init: dataset and ensemble differ in the number of spins");
  for (std::size_t c = 0; c < chains.n_chains(); ++c) {
    const auto row = chains.streams[c].uniform_int(static_cast<std::uint64_t>(data.rows()));
    chains.states.row(static_cast<Eigen::Index>(c)) = data.row(static_cast<Eigen::Index>(row));
  }
  chains.k_elapsed = 0;
}

unsigned sampler_threads() {
  if (const char* env = std::getenv("NONEQ_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

namespace {

void run_chain_range(ChainEnsemble& chains, const BoltzmannModel& model, std::uint64_t k,
                     std::size_t begin, std::size_t end) {
  const int n = chains.n_spins();
  const Eigen::MatrixXd& J = model.J;
  const auto rows = static_cast<Eigen::Index>(end - begin);
  // Local fields of all chains in the range, one row per chain.
  Eigen::MatrixXd fields =
      chains.states.middleRows(static_cast<Eigen::Index>(begin), rows).cast<double>() * J;
  fields.rowwise() += model.h.transpose();
  std::vector<double> field(static_cast<std::size_t>(n));
  for (std::size_t c = begin; c < end; ++c) {
    std::int8_t* s = chains.states.row(static_cast<Eigen::Index>(c)).data();
    auto& rng = chains.streams[c];
    for (int i = 0; i < n; ++i)
      field[static_cast<std::size_t>(i)] = fields(static_cast<Eigen::Index>(c - begin), i);
    auto update = [&](int i, std::uint32_t coin_bits) {
      const double coin = static_cast<double>(coin_bits) * 0x1.0p-32;
      const double p_up = 1.0 / (1.0 + std::exp(-2.0 * field[static_cast<std::size_t>(i)]));
      const std::int8_t next = coin < p_up ? 1 : -1;
      if (next != s[i]) {
        const double delta = 2.0 * next;
        const double* col = J.col(i).data();
        for (int j = 0; j < n; ++j) field[static_cast<std::size_t>(j)] += delta * col[j];
        s[i] = next;
      }
    };
    if (chains.order == SiteOrder::sequential) {
      for (std::uint64_t sweep = 0; sweep < k; ++sweep)
        for (int i = 0; i < n; ++i) update(i, static_cast<std::uint32_t>(rng.next_u64()));
      continue;
    }
    const std::uint64_t updates = k * static_cast<std::uint64_t>(n);
    const auto nn = static_cast<std::uint64_t>(n);
    const auto reject = static_cast<std::uint32_t>((std::uint64_t{1} << 32) % nn);
    for (std::uint64_t u = 0; u < updates; ++u) {
      // One 64-bit draw per update: the high word picks the site (Lemire,
      // rejection on the rare biased values), the low word is the coin.
      std::uint64_t bits = rng.next_u64();
      std::uint64_t m = (bits >> 32) * nn;
      while (static_cast<std::uint32_t>(m) < reject) {
        bits = rng.next_u64();
        m = (bits >> 32) * nn;
      }
      update(static_cast<int>(m >> 32), static_cast<std::uint32_t>(bits));
    }
  }
}

}  // namespace

void run_steps(ChainEnsemble& chains, const BoltzmannModel& model, std::uint64_t k) {
  if (model.n_spins() != chains.n_spins())
    throw ParameterError("run_steps: model and ensemble differ in the number of spins");
  model.validate();
  const std::size_t m = chains.n_chains();
  const unsigned threads = std::min<std::size_t>(sampler_threads(), m);
  if (threads <= 1) {
    run_chain_range(chains, model, k, 0, m);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = m * t / threads, e = m * (t + 1) / threads;
      pool.emplace_back(run_chain_range, std::ref(chains), std::cref(model), k, b, e);
    }
    for (auto& th : pool) th.join();
  }
  chains.k_elapsed += k;
}

void heatbath_step(ChainEnsemble& chains, const BoltzmannModel& model) {
  run_steps(chains, model, 1);
}

MomentEstimate sample_k(const BoltzmannModel& model, Scheme scheme, std::uint64_t k,
                        ChainEnsemble& chains, const SpinMatrix* data) {
  switch (scheme) {
    case Scheme::random_init: init_random(chains); break;
    case Scheme::data_init:
      if (data == nullptr) throw ParameterError("data-init scheme requires a dataset");
      init_from_data(chains, *data);
      break;
    case Scheme::persistent: break;
  }
  chains.scheme = scheme;
  run_steps(chains, model, k);
  return estimate_moments(chains.states);
}

MomentEstimate sample_k(const BoltzmannModel& model, Scheme scheme, std::uint64_t k,
                        std::size_t n_chains, std::uint64_t seed, const SpinMatrix* data) {
  auto chains = make_ensemble(n_chains, model.n_spins(), scheme, seed);
  if (scheme == Scheme::persistent) init_random(chains);
  return sample_k(model, scheme, k, chains, data);
}

}  // namespace noneq::boltzmann
