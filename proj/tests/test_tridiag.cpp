#include <algorithm>
#include <random>

#include "doctest.h"
#include "pqslab/tridiag.hpp"
#include "support.hpp"

using namespace pqslab;

namespace {

SymTridiagonal random_sym(std::mt19937_64& rng, int n) {
  SymTridiagonal t;
  for (int k = 0; k < n; ++k) t.diag.push_back(testing::uniform(rng, -5.0, 5.0));
  for (int k = 0; k + 1 < n; ++k) t.off.push_back(testing::uniform(rng, -3.0, 3.0));
  return t;
}

Eigen::MatrixXd dense(const SymTridiagonal& t) {
  const int n = static_cast<int>(t.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) a(k, k) = t.diag[k];
  for (int k = 0; k + 1 < n; ++k) a(k + 1, k) = a(k, k + 1) = t.off[k];
  return a;
}

Eigen::MatrixXcd dense(const HermTridiagonal& h) {
  const int n = static_cast<int>(h.size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) a(k, k) = h.diag[k];
  for (int k = 0; k + 1 < n; ++k) {
    a(k + 1, k) = h.off[k];
    a(k, k + 1) = std::conj(h.off[k]);
  }
  return a;
}

}  // namespace

TEST_CASE("symmetric eigenvalues agree with a dense solver") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = testing::uniform_int(rng, 1, 80);
    auto t = random_sym(rng, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(t));
    auto values = tridiagonal_eigenvalues(t);
    REQUIRE(values.size() == static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) CHECK(values[k] == doctest::Approx(es.eigenvalues()(k)).epsilon(1e-11).scale(10.0));
  }
}

TEST_CASE("full eigensystem reconstructs the matrix") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = testing::uniform_int(rng, 1, 60);
    auto t = random_sym(rng, n);
    auto sys = tridiagonal_eigensystem(t);
    const Eigen::MatrixXd& v = sys.vectors;
    Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(sys.values.data(), n);
    CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((v * lam.asDiagonal() * v.transpose() - dense(t)).cwiseAbs().maxCoeff() < 1e-11);
    CHECK(std::is_sorted(sys.values.begin(), sys.values.end()));
  }
}

TEST_CASE("lowest pairs and Sturm counts") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = testing::uniform_int(rng, 2, 120);
    auto t = random_sym(rng, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(t));
    auto low = tridiagonal_lowest(t, 3);
    const std::size_t k = std::min<std::size_t>(3, n);
    REQUIRE(low.values.size() == k);
    for (std::size_t j = 0; j < k; ++j) {
      CHECK(low.values[j] == doctest::Approx(es.eigenvalues()(j)).epsilon(1e-11).scale(10.0));
      const Eigen::VectorXd r = dense(t) * low.vectors[j] - low.values[j] * low.vectors[j];
      CHECK(r.norm() < 1e-9);
      CHECK(low.vectors[j].norm() == doctest::Approx(1.0));
    }
    const double mid = 0.5 * (es.eigenvalues()(n / 2) + es.eigenvalues()(n / 2 - 1));
    CHECK(sturm_count(t, mid) == static_cast<std::size_t>(n / 2));
  }
}

TEST_CASE("degenerate spectrum gives orthogonal vectors") {
  // Two decoupled identical blocks: every eigenvalue is doubled.
  SymTridiagonal t;
  t.diag = {1.0, 2.0, 1.0, 2.0};
  t.off = {0.5, 0.0, 0.5};
  auto low = tridiagonal_lowest(t, 2);
  CHECK(low.values[0] == doctest::Approx(low.values[1]));
  CHECK(std::abs(low.vectors[0].dot(low.vectors[1])) < 1e-12);
}

TEST_CASE("Hermitian tridiagonal via gauge transform") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = testing::uniform_int(rng, 1, 50);
    HermTridiagonal h;
    for (int k = 0; k < n; ++k) h.diag.push_back(testing::uniform(rng, -2.0, 2.0));
    for (int k = 0; k + 1 < n; ++k) h.off.push_back({testing::gauss(rng), testing::gauss(rng)});
    if (n > 3) h.off[1] = 0.0;
    const Eigen::MatrixXcd a = dense(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    auto sys = hermitian_eigensystem(h);
    for (int k = 0; k < n; ++k) CHECK(sys.values[k] == doctest::Approx(es.eigenvalues()(k)).epsilon(1e-11).scale(10.0));
    const Eigen::MatrixXcd& v = sys.vectors;
    Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(sys.values.data(), n);
    CHECK((v * lam.cast<std::complex<double>>().asDiagonal() * v.adjoint() - a).cwiseAbs().maxCoeff() < 1e-11);

    auto low = hermitian_lowest(h, 1);
    CHECK(low.values[0] == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-11).scale(10.0));
    CHECK((a * low.vectors[0] - low.values[0] * low.vectors[0]).norm() < 1e-9);
  }
}

TEST_CASE("empty and single-element inputs") {
  CHECK(tridiagonal_eigenvalues(SymTridiagonal{}).empty());
  SymTridiagonal one{{3.5}, {}};
  auto sys = tridiagonal_eigensystem(one);
  CHECK(sys.values[0] == 3.5);
  CHECK(std::abs(sys.vectors(0, 0)) == doctest::Approx(1.0));

  for (double d : {0.0, 3.5, -1e-300}) {
    const auto low = tridiagonal_lowest(SymTridiagonal{{d}, {}}, 2);
    REQUIRE(low.vectors.size() == 1);
    CHECK(low.values[0] == doctest::Approx(d));
    CHECK(low.vectors[0](0) == 1.0);
  }
  const auto zero = tridiagonal_lowest(SymTridiagonal{{0.0, 0.0, 0.0}, {0.0, 0.0}}, 2);
  REQUIRE(zero.vectors.size() == 2);
  CHECK(zero.values[1] == doctest::Approx(0.0));
  CHECK(zero.vectors[0].dot(zero.vectors[1]) == 0.0);
  CHECK(zero.vectors[1].norm() == doctest::Approx(1.0));
}
