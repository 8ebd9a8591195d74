#include "doctest.h"

#include "noneq/errors.hpp"
#include "noneq/numerics/eigen.hpp"
#include "noneq/numerics/ode.hpp"
#include "noneq/numerics/rng.hpp"
#include "noneq/numerics/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace noneq;
using namespace noneq::numerics;

namespace {

Eigen::MatrixXd random_symmetric(int n, RngStream& rng) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.gaussian();
  return a;
}

}  // namespace

TEST_CASE("sym_eig: identity and analytic 2x2") {
  const auto id = sym_eig(Eigen::MatrixXd::Identity(3, 3));
  CHECK((id.eigenvalues - Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::Matrix2d a;
  a << 2, 1, 1, 2;
  const auto es = sym_eig(a);
  CHECK(es.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(es.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  // Sign convention: largest-magnitude component positive, first index on ties.
  CHECK(es.eigenvectors(0, 0) == doctest::Approx(r));
  CHECK(es.eigenvectors(1, 0) == doctest::Approx(-r));
  CHECK(es.eigenvectors(0, 1) == doctest::Approx(r));
  CHECK(es.eigenvectors(1, 1) == doctest::Approx(r));
}

TEST_CASE("sym_eig: random 8x8 reconstructs and is orthonormal") {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = random_symmetric(8, rng);
    const auto es = sym_eig(a);
    const Eigen::MatrixXd vtv = es.eigenvectors.transpose() * es.eigenvectors;
    CHECK((vtv - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((reassemble(es) - a).cwiseAbs().maxCoeff() <= 1e-9);
    for (int c = 1; c < 8; ++c) CHECK(es.eigenvalues[c] >= es.eigenvalues[c - 1]);
  }
}

TEST_CASE("sym_eig: spectrum invariant under symmetric permutation") {
  RngStream rng(12, 0);
  std::vector<int> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd a = random_symmetric(10, rng);
    for (int i = 9; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
    Eigen::MatrixXd b(10, 10);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) b(i, j) = a(perm[i], perm[j]);
    CHECK((sym_eig(a).eigenvalues - sym_eig(b).eigenvalues).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("sym_eig: rejects asymmetric input and reports the asymmetry") {
  Eigen::Matrix2d a;
  a << 1, 2, 2.5, 1;
  CHECK_THROWS_AS(sym_eig(a), StructureError);
  try {
    sym_eig(a);
  } catch (const StructureError& e) {
    CHECK(std::string(e.what()).find("0.5") != std::string::npos);
  }
}

TEST_CASE("integrate_ode: exponential decay and fourth-order convergence") {
  const VectorField decay = [](double, const Eigen::VectorXd& y) -> Eigen::VectorXd { return -y; };
  const auto traj = integrate_ode(decay, Eigen::VectorXd::Ones(1), 1.0, 1e-3);
  CHECK(traj.times.back() == 1.0);
  CHECK(std::abs(traj.back()[0] - std::exp(-1.0)) < 1e-9);
  CHECK(!traj.diverged);
  for (std::size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);

  const double e1 = std::abs(integrate_ode(decay, Eigen::VectorXd::Ones(1), 1.0, 0.1).back()[0] -
                             std::exp(-1.0));
  const double e2 = std::abs(integrate_ode(decay, Eigen::VectorXd::Ones(1), 1.0, 0.05).back()[0] -
                             std::exp(-1.0));
  CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("integrate_ode: zero field, equilibrium flow, errors and divergence") {
  const VectorField zero = [](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return Eigen::VectorXd::Zero(y.size());
  };
  const auto flat = integrate_ode(zero, Eigen::VectorXd::Constant(1, 5.0), 2.0, 0.1);
  for (const auto& v : flat.values) CHECK(v[0] == 5.0);

  // dJ/dt = -c + 1/J with c = 1 relaxes to J = 1/c.
  const VectorField flow = [](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, -1.0 + 1.0 / y[0]);
  };
  const auto eq = integrate_ode(flow, Eigen::VectorXd::Constant(1, 0.3), 60.0, 1e-3);
  CHECK(std::abs(eq.back()[0] - 1.0) < 1e-12);

  CHECK_THROWS_AS(integrate_ode(zero, Eigen::VectorXd::Zero(1), 1.0, 0.0), ParameterError);
  CHECK_THROWS_AS(integrate_ode(zero, Eigen::VectorXd::Zero(1), 1.0, -1.0), ParameterError);

  const VectorField blowup = [](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return y.array().square();
  };
  const auto b = integrate_ode(blowup, Eigen::VectorXd::Ones(1), 2.0, 1e-3);
  CHECK(b.diverged);
  CHECK(b.reason == HaltReason::diverged);
  CHECK(b.times.back() < 1.01);

  OdeOptions opts;
  opts.in_domain = [](const Eigen::VectorXd& y) { return y[0] > 0.0; };
  const VectorField down = [](double, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, -1.0);
  };
  const auto d = integrate_ode(down, Eigen::VectorXd::Ones(1), 3.0, 0.01, opts);
  CHECK(d.diverged);
  CHECK(d.reason == HaltReason::left_domain);
  CHECK(d.back()[0] <= 0.0);
  CHECK(d.times.back() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("find_root: linear, fixed-point function, bracket error") {
  CHECK(std::abs(find_root([](double x) { return x - 2.0; }, 0.0, 5.0, 1e-12) - 2.0) < 1e-12);

  // g(J) = J c - 1 + exp(-2Jk)(1 - J m0) with c = 1, m0 = 0, k = 1.
  const auto g = [](double j) { return j - 1.0 + std::exp(-2.0 * j); };
  const double root = find_root(g, 1e-8, 10.0, 1e-12);
  CHECK(root == doctest::Approx(0.797).epsilon(1e-3));
  // Stationarity: c - m0 e^{-2Jk} = (1 - e^{-2Jk}) / J.
  CHECK(std::abs(1.0 - (1.0 - std::exp(-2.0 * root)) / root) < 1e-12);

  CHECK_THROWS_AS(find_root([](double x) { return x * x - 1.0; }, 2.0, 3.0, 1e-12), BracketError);
  CHECK_THROWS_AS(find_root([](double x) { return x; }, -1.0, 1.0, 0.0), ParameterError);
}

TEST_CASE("find_root: monotone functions agree with a 10x finer bisection") {
  RngStream rng(5, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const double shift = rng.uniform() * 4.0 - 2.0;
    const double slope = 0.1 + rng.uniform() * 5.0;
    const auto g = [&](double x) { return std::tanh(slope * (x - shift)) + 0.1 * (x - shift); };
    const double tol = 1e-6;
    CHECK(std::abs(find_root(g, -3.0, 3.0, tol) - find_root(g, -3.0, 3.0, tol / 10)) <= tol);
  }
}

TEST_CASE("rng: Philox4x32-10 known-answer vectors") {
  const auto zero = RngStream::philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);
  const auto ones = RngStream::philox4x32_10({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("rng: determinism, stream separation, seeking") {
  RngStream a(7, 0), b(7, 0), c(7, 1);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);

  RngStream d(3, 9);
  for (int i = 0; i < 37; ++i) d.uniform();
  const auto pos = d.position();
  const double next = d.uniform();
  RngStream e(3, 9, pos);
  CHECK(e.uniform() == next);
  d.seek(pos);
  CHECK(d.uniform() == next);
}

TEST_CASE("rng: uniform and Gaussian moments at n = 1e6") {
  const int n = 1'000'000;
  RngStream rng(7, 0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK_MESSAGE((u >= 0.0 && u < 1.0), "uniform out of range");
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) <= 4.0 / std::sqrt(12.0 * n));

  RngStream g(8, 0);
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n / 2; ++i) {
    const auto [x, y] = g.gaussian_pair();
    s1 += x + y;
    s2 += x * x + y * y;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) <= 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("rng: uniform_int covers the range evenly") {
  RngStream rng(9, 3);
  std::vector<int> counts(7, 0);
  const int n = 70'000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_int(7)];
  for (int c : counts) CHECK(std::abs(c - n / 7) < 4.0 * std::sqrt(n / 7.0));
  CHECK_THROWS_AS(rng.uniform_int(0), ParameterError);
}
