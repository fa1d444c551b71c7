#include <random>
#include <vector>

#include "doctest.h"
#include "pqslab/kernels.hpp"
#include "support.hpp"

using namespace pqslab;
using namespace pqslab::kernels;

namespace {

// Direct evaluation of the sums from the defining operators.
SectorSums reference_sums(const SectorState& s) {
  const auto d = testing::dense_spin(s.n);
  const Eigen::MatrixXcd jp = d.jx + cplx(0.0, 1.0) * d.jy;
  const Eigen::VectorXcd& c = s.amplitudes;
  SectorSums r;
  r.norm = c.squaredNorm();
  r.z1 = testing::dense_expect(d.jz, c);
  r.z2 = testing::dense_expect(d.jz * d.jz, c);
  r.p1 = (c.adjoint() * jp * c)(0, 0);
  r.p2 = (c.adjoint() * jp * jp * c)(0, 0);
  r.p1z = (c.adjoint() * (jp * d.jz + d.jz * jp) * c)(0, 0);
  return r;
}

void check_close(const SectorSums& a, const SectorSums& b, double tol) {
  CHECK(std::abs(a.norm - b.norm) < tol);
  CHECK(std::abs(a.z1 - b.z1) < tol);
  CHECK(std::abs(a.z2 - b.z2) < tol);
  CHECK(std::abs(a.p1 - b.p1) < tol);
  CHECK(std::abs(a.p2 - b.p2) < tol);
  CHECK(std::abs(a.p1z - b.p1z) < tol);
}

}  // namespace

TEST_CASE("scalar sums match the operator definitions") {
  std::mt19937_64 rng(21);
  for (int n : {0, 1, 2, 3, 4, 5, 8, 17, 64}) {
    auto s = testing::random_state(rng, n);
    const double scale = std::max(1.0, 1.0 * n * n);
    check_close(sector_sums_scalar(s.amplitudes.data(), sector_tables(n)), reference_sums(s), 1e-12 * scale);
  }
}

TEST_CASE("tables") {
  const auto& t = sector_tables(4);
  CHECK(t.n == 4);
  CHECK(t.m.size() == 5);
  CHECK(t.ladder.size() == 4);
  CHECK(t.ladder2.size() == 3);
  CHECK(t.ladder_z.size() == 4);
  CHECK(&sector_tables(4) == &t);
  CHECK(sector_tables(0).ladder.empty());
}

TEST_CASE("projection kernel matches a dense product") {
  std::mt19937_64 rng(22);
  for (int dim : {1, 2, 3, 4, 5, 7, 9, 33}) {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Random(dim, dim);
    Eigen::VectorXcd psi = testing::random_state(rng, dim - 1).amplitudes;
    std::vector<double> out(dim);
    project_abs2_scalar(basis.data(), dim, psi.data(), out.data());
    Eigen::VectorXcd proj = basis.transpose().cast<cplx>() * psi;
    for (int j = 0; j < dim; ++j) CHECK(out[j] == doctest::Approx(std::norm(proj(j))).epsilon(1e-13));
  }
}

#if defined(PQSLAB_WITH_AVX2)
TEST_CASE("AVX2 kernels agree with the scalar reference") {
  if (!avx2_available()) {
    MESSAGE("AVX2/FMA not available on this CPU; skipped");
    return;
  }
  std::mt19937_64 rng(23);
  for (int n = 0; n <= 70; ++n) {
    auto s = testing::random_state(rng, n);
    const auto& t = sector_tables(n);
    const double scale = std::max(1.0, 1.0 * n * n);
    check_close(sector_sums_avx2(s.amplitudes.data(), t), sector_sums_scalar(s.amplitudes.data(), t), 1e-13 * scale);
  }
  for (int dim = 1; dim <= 40; ++dim) {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Random(dim, dim);
    Eigen::VectorXcd psi = testing::random_state(rng, dim - 1).amplitudes;
    std::vector<double> a(dim), b(dim);
    project_abs2_scalar(basis.data(), dim, psi.data(), a.data());
    project_abs2_avx2(basis.data(), dim, psi.data(), b.data());
    for (int j = 0; j < dim; ++j) CHECK(b[j] == doctest::Approx(a[j]).epsilon(1e-13).scale(1e-3));
  }
}
#endif

TEST_CASE("dispatch names a backend") {
  const auto name = active_backend();
  CHECK((name == "scalar" || name == "avx2"));
  std::mt19937_64 rng(24);
  auto s = testing::random_state(rng, 12);
  check_close(sector_sums(s.amplitudes.data(), sector_tables(12)), reference_sums(s), 1e-11);
}
