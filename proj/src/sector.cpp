#include "pqslab/sector.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pqslab/tridiag.hpp"

namespace pqslab {

SectorBasis::SectorBasis(int n) : n_(n) {
  if (n < 0) throw std::invalid_argument("sector boson number must be >= 0, got " + std::to_string(n));
}

std::size_t SectorBasis::index_of_twice_m(int twice_m) const {
  if (std::abs(twice_m) > n_ || ((twice_m + n_) % 2) != 0) {
    throw std::out_of_range("2m = " + std::to_string(twice_m) + " is not in sector n = " + std::to_string(n_));
  }
  return static_cast<std::size_t>((twice_m + n_) / 2);
}

double SectorBasis::ladder(std::size_t k) const {
  // (J - m)(J + m + 1) = (n - k)(k + 1) with m = k - J.
  const auto kk = static_cast<double>(k);
  return std::sqrt((n_ - kk) * (kk + 1.0));
}

std::vector<double> SectorBasis::ladder_coefficients() const {
  std::vector<double> out(static_cast<std::size_t>(n_));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = ladder(k);
  return out;
}

std::vector<double> SectorBasis::m_values() const {
  std::vector<double> out(dim());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = m(k);
  return out;
}

double SectorOperator::hermiticity_defect() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double SectorOperator::unitarity_defect() const {
  const auto d = matrix.rows();
  return (matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

SpinOperators build_spin_operators(int n) {
  const SectorBasis basis(n);
  const auto d = static_cast<Eigen::Index>(basis.dim());
  Eigen::MatrixXcd jplus = Eigen::MatrixXcd::Zero(d, d);
  Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    jz(k, k) = basis.m(static_cast<std::size_t>(k));
    if (k + 1 < d) jplus(k + 1, k) = basis.ladder(static_cast<std::size_t>(k));
  }
  const cplx i_unit(0.0, 1.0);
  SpinOperators ops;
  ops.jx = {n, 0.5 * (jplus + jplus.adjoint())};
  ops.jy = {n, (jplus - jplus.adjoint()) / (2.0 * i_unit)};
  ops.jz = {n, jz};
  ops.number = {n, Eigen::MatrixXcd::Identity(d, d) * static_cast<double>(n)};
  return ops;
}

double generalized_inverse_scalar(int n) {
  if (n < 0) throw std::invalid_argument("negative boson number");
  return n == 0 ? 0.0 : 1.0 / n;
}

SectorOperator build_jphi(int n, double angle) {
  SpinOperators ops = build_spin_operators(n);
  return {n, std::cos(angle) * ops.jx.matrix + std::sin(angle) * ops.jy.matrix};
}

TridiagonalHamiltonian hamiltonian_tridiagonal(int n, const HamiltonianParams& params) {
  const SectorBasis basis(n);
  TridiagonalHamiltonian h;
  h.diag.resize(basis.dim());
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const double na = static_cast<double>(k);
    const double nb = static_cast<double>(n) - na;
    h.diag[k] = 0.5 * params.g * (na * (na - 1.0) + nb * (nb - 1.0));
  }
  h.off = basis.ladder_coefficients();
  for (double& o : h.off) o *= params.kappa;
  return h;
}

SectorOperator build_hamiltonian(int n, const HamiltonianParams& params) {
  const TridiagonalHamiltonian t = hamiltonian_tridiagonal(n, params);
  const auto d = static_cast<Eigen::Index>(t.diag.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    h(k, k) = t.diag[static_cast<std::size_t>(k)];
    if (k + 1 < d) {
      h(k + 1, k) = t.off[static_cast<std::size_t>(k)];
      h(k, k + 1) = t.off[static_cast<std::size_t>(k)];
    }
  }
  return {n, h};
}

namespace {

constexpr double kAxisTolerance = 1e-9;

void require_unit_axis(const Vec3& axis) {
  const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (std::fabs(norm - 1.0) > kAxisTolerance) {
    throw std::invalid_argument("rotation axis must be normalized (|axis| = " + std::to_string(norm) + ")");
  }
}

}  // namespace

SectorOperator su2_rotation(int n, const Vec3& axis, double angle) {
  require_unit_axis(axis);
  const SectorBasis basis(n);
  const auto d = static_cast<Eigen::Index>(basis.dim());

  // Generator axis.J is Hermitian tridiagonal:
  //   diag = az m,  G(k+1,k) = ladder_k (ax - i ay) / 2.
  HermTridiagonal gen;
  gen.diag.resize(basis.dim());
  for (std::size_t k = 0; k < basis.dim(); ++k) gen.diag[k] = axis[2] * basis.m(k);
  gen.off.resize(basis.dim() - 1);
  for (std::size_t k = 0; k + 1 < basis.dim(); ++k) {
    gen.off[k] = basis.ladder(k) * cplx(0.5 * axis[0], -0.5 * axis[1]);
  }
  const HermEigensystem eig = hermitian_eigensystem(gen);

  Eigen::VectorXcd phases(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    phases(j) = std::polar(1.0, -angle * eig.values[static_cast<std::size_t>(j)]);
  }
  Eigen::MatrixXcd u = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
  return {n, u};
}

Mat3 rotation_matrix(const Vec3& axis, double angle) {
  require_unit_axis(axis);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  const auto [x, y, z] = axis;
  return {{{c + t * x * x, t * x * y - s * z, t * x * z + s * y},
           {t * x * y + s * z, c + t * y * y, t * y * z - s * x},
           {t * x * z - s * y, t * y * z + s * x, c + t * z * z}}};
}

Mat3 rotation_z(double angle) { return rotation_matrix({0.0, 0.0, 1.0}, angle); }

namespace {

const Vec3 kMzAxis = {-1.0 / std::numbers::sqrt3, 1.0 / std::numbers::sqrt3, -1.0 / std::numbers::sqrt3};
constexpr double kMzAngle = 2.0 * std::numbers::pi / 3.0;

}  // namespace

SectorOperator mz_input_rotation(int n) {
  SectorOperator u = su2_rotation(n, kMzAxis, kMzAngle);
  // Global phase matching the single-particle mode map, one factor per boson.
  u.matrix *= std::polar(1.0, 1.25 * std::numbers::pi * n);
  return u;
}

Mat3 mz_rotation_matrix() { return {{{0.0, 0.0, 1.0}, {-1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}}}; }

const Eigen::MatrixXcd& mz_unitary_cached(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Eigen::MatrixXcd>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;
  }
  auto built = std::make_unique<Eigen::MatrixXcd>(mz_input_rotation(n).matrix);
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.emplace(n, std::move(built));
  return *it->second;
}

}  // namespace pqslab
