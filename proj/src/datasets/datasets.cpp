#include "noneq/datasets/datasets.hpp"

#include "noneq/errors.hpp"
#include "noneq/numerics/eigen.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace noneq::datasets {

namespace {

constexpr const char* kMagic = "NONEQ-SPINS 1";

std::string exact(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

template <class T>
T parse_number(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  T v{};
  if (!(in >> v) || !(in >> std::ws).eof()) throw FormatError("bad value for " + what + ": '" + text + "'");
  return v;
}

}  // namespace

const std::string& SpinDataset::get(const std::string& key) const {
  for (const auto& [k, v] : provenance)
    if (k == key) return v;
  throw FormatError("dataset provenance has no '" + key + "'");
}

IsingParams ising2d_couplings(int L, double beta) {
  if (L < 2) throw ParameterError("ising2d: lattice side must be at least 2");
  auto p = IsingParams::zeros(L * L);
  for (int r = 0; r < L; ++r)
    for (int c = 0; c < L; ++c) {
      const int i = r * L + c;
      for (int j : {r * L + (c + 1) % L, ((r + 1) % L) * L + c}) {
        p.J(i, j) += beta;
        p.J(j, i) += beta;
      }
    }
  return p;
}

SpinDataset generate_ising2d(const Ising2dSpec& spec) {
  if (spec.gap_sweeps < 1) throw ParameterError("ising2d: gap must be at least one sweep");
  const auto model = ising2d_couplings(spec.L, spec.beta);
  const int n = model.n_spins();
  std::vector<std::vector<std::pair<int, double>>> nbr(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (model.J(i, j) != 0.0) nbr[static_cast<std::size_t>(i)].emplace_back(j, model.J(i, j));

  numerics::RngStream rng(spec.seed, 0);
  std::vector<std::int8_t> s(static_cast<std::size_t>(n));
  for (auto& x : s) x = rng.uniform() < 0.5 ? 1 : -1;
  auto sweep = [&] {
    for (int i = 0; i < n; ++i) {
      double f = 0.0;
      for (const auto& [j, w] : nbr[static_cast<std::size_t>(i)]) f += w * s[static_cast<std::size_t>(j)];
      s[static_cast<std::size_t>(i)] = rng.uniform() < 1.0 / (1.0 + std::exp(-2.0 * f)) ? 1 : -1;
    }
  };
  for (std::uint64_t t = 0; t < spec.equil_sweeps; ++t) sweep();

  SpinDataset d;
  d.samples.resize(static_cast<Eigen::Index>(spec.n_samples), n);
  for (std::size_t m = 0; m < spec.n_samples; ++m) {
    for (std::uint64_t t = 0; t < spec.gap_sweeps; ++t) sweep();
    for (int i = 0; i < n; ++i) d.samples(static_cast<Eigen::Index>(m), i) = s[static_cast<std::size_t>(i)];
  }
  d.provenance = {{"generator", "ising2d"},
                  {"L", std::to_string(spec.L)},
                  {"beta", exact(spec.beta)},
                  {"n_samples", std::to_string(spec.n_samples)},
                  {"equil_sweeps", std::to_string(spec.equil_sweeps)},
                  {"gap_sweeps", std::to_string(spec.gap_sweeps)},
                  {"seed", std::to_string(spec.seed)},
                  {"update", "sequential-heat-bath"},
                  {"boundary", "periodic"}};
  return d;
}

Ising2dSpec ising2d_spec_from(const SpinDataset& d) {
  if (d.get("generator") != "ising2d") throw FormatError("dataset was not generated by ising2d");
  Ising2dSpec s;
  s.L = parse_number<int>(d.get("L"), "L");
  s.beta = parse_number<double>(d.get("beta"), "beta");
  s.n_samples = parse_number<std::size_t>(d.get("n_samples"), "n_samples");
  s.equil_sweeps = parse_number<std::uint64_t>(d.get("equil_sweeps"), "equil_sweeps");
  s.gap_sweeps = parse_number<std::uint64_t>(d.get("gap_sweeps"), "gap_sweeps");
  s.seed = parse_number<std::uint64_t>(d.get("seed"), "seed");
  return s;
}

Eigen::MatrixXd generate_gaussian(const Eigen::MatrixXd& coupling, std::size_t n, std::uint64_t seed) {
  const auto es = numerics::sym_eig(coupling);
  if (es.eigenvalues.size() == 0 || es.eigenvalues.minCoeff() <= 0.0)
    throw ParameterError("generate_gaussian: coupling matrix must be positive definite");
  // x = V diag(lambda^{-1/2}) z has covariance V diag(1/lambda) V^T = J^{-1}.
  const Eigen::MatrixXd map =
      es.eigenvectors * es.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
  const Eigen::Index d = coupling.rows();
  numerics::RngStream rng(seed, 0);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd z(d);
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index i = 0; i < d; i += 2) {
      const auto [a, b] = rng.gaussian_pair();
      z[i] = a;
      if (i + 1 < d) z[i + 1] = b;
    }
    out.row(r) = (map * z).transpose();
  }
  return out;
}

Eigen::MatrixXd gaussian_second_moments(const Eigen::MatrixXd& samples) {
  if (samples.rows() == 0) throw ParameterError("gaussian_second_moments: empty dataset");
  return samples.transpose() * samples / static_cast<double>(samples.rows());
}

boltzmann::MomentEstimate data_moments(const SpinDataset& dataset) {
  if (dataset.size() == 0) throw ParameterError("data_moments: empty dataset");
  return boltzmann::estimate_moments(dataset.samples);
}

void write_dataset(std::ostream& out, const SpinDataset& d) {
  out << kMagic << '\n' << "n " << d.samples.rows() << '\n' << "N " << d.samples.cols() << '\n';
  for (const auto& [k, v] : d.provenance) {
    if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos)
      throw ParameterError("dataset provenance keys must be single words");
    out << "prov " << k << ' ' << v << '\n';
  }
  out << "data\n";
  std::string line(static_cast<std::size_t>(d.samples.cols()), '+');
  for (Eigen::Index r = 0; r < d.samples.rows(); ++r) {
    for (Eigen::Index i = 0; i < d.samples.cols(); ++i)
      line[static_cast<std::size_t>(i)] = d.samples(r, i) > 0 ? '+' : '-';
    out << line << '\n';
  }
}

SpinDataset read_dataset(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw FormatError(std::string("dataset: missing ") + what);
    ++lineno;
  };
  auto fail = [&](const std::string& msg) {
    throw FormatError("dataset line " + std::to_string(lineno) + ": " + msg);
  };
  next("header");
  if (line != kMagic) fail("expected '" + std::string(kMagic) + "'");
  next("sample count");
  if (line.rfind("n ", 0) != 0) fail("expected 'n <count>'");
  const auto rows = parse_number<long long>(line.substr(2), "n");
  next("spin count");
  if (line.rfind("N ", 0) != 0) fail("expected 'N <spins>'");
  const auto cols = parse_number<long long>(line.substr(2), "N");
  if (rows < 0 || cols < 1) fail("bad dimensions");

  SpinDataset d;
  for (next("data section"); line != "data"; next("data section")) {
    if (line.rfind("prov ", 0) != 0) fail("expected 'prov <key> <value>' or 'data'");
    const auto rest = line.substr(5);
    const auto sp = rest.find(' ');
    if (sp == std::string::npos) fail("provenance entry without value");
    d.provenance.emplace_back(rest.substr(0, sp), rest.substr(sp + 1));
  }
  d.samples.resize(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    next("sample");
    if (static_cast<long long>(line.size()) != cols) fail("sample has the wrong length");
    for (long long i = 0; i < cols; ++i) {
      const char ch = line[static_cast<std::size_t>(i)];
      if (ch != '+' && ch != '-') fail("spin symbols must be '+' or '-'");
      d.samples(r, i) = ch == '+' ? 1 : -1;
    }
  }
  if (std::getline(in, line) && !line.empty()) fail("trailing content after the samples");
  return d;
}

void save_dataset(const std::filesystem::path& path, const SpinDataset& dataset) {
  {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    write_dataset(out, dataset);
  }
  nlohmann::ordered_json j;
  j["dataset"] = path.filename().string();
  j["n"] = dataset.samples.rows();
  j["N"] = dataset.samples.cols();
  for (const auto& [k, v] : dataset.provenance) j["provenance"][k] = v;
  std::ofstream side(path.string() + ".provenance.json");
  if (!side) throw FormatError("cannot write provenance for " + path.string());
  side << j.dump(2) << '\n';
}

SpinDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_dataset(in);
}

void write_gaussian_csv(std::ostream& out, const Eigen::MatrixXd& samples) {
  for (Eigen::Index i = 0; i < samples.cols(); ++i) out << (i ? ",x" : "x") << i;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index i = 0; i < samples.cols(); ++i) out << (i ? "," : "") << samples(r, i);
    out << '\n';
  }
}

Eigen::MatrixXd read_gaussian_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("gaussian csv: missing header");
  const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    Eigen::Index count = 0;
    while (std::getline(row, cell, ',')) {
      values.push_back(parse_number<double>(cell, "csv line " + std::to_string(lineno)));
      ++count;
    }
    if (count != cols) throw FormatError("gaussian csv line " + std::to_string(lineno) + ": wrong column count");
  }
  const auto rows = static_cast<Eigen::Index>(values.size()) / cols;
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return out;
}

}  // namespace noneq::datasets
