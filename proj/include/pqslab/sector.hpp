#pragma once

// Fixed-number angular-momentum sectors of a two-mode boson system.
//
// A sector holds n bosons shared between modes a and b. In the Schwinger
// picture it is a spin J = n/2 multiplet with basis |J,m>, m = -J..J, where
// n_a = J + m and n_b = J - m. Index k of every vector or matrix in this
// library corresponds to m = k - J (m ascending).

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace pqslab {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Basis bookkeeping for the sector with n bosons. J is never stored as a
/// floating-point number; twice_m(k) = 2k - n is exact.
class SectorBasis {
 public:
  explicit SectorBasis(int n);

  int n() const { return n_; }
  std::size_t dim() const { return static_cast<std::size_t>(n_) + 1; }
  double j() const { return 0.5 * n_; }

  int twice_m(std::size_t k) const { return 2 * static_cast<int>(k) - n_; }
  double m(std::size_t k) const { return 0.5 * twice_m(k); }
  /// Inverse of m(k); twice_m must have the parity of n and |twice_m| <= n.
  std::size_t index_of_twice_m(int twice_m) const;

  /// <J,m+1| J+ |J,m> = sqrt((J-m)(J+m+1)) for k = 0..n-1.
  double ladder(std::size_t k) const;
  std::vector<double> ladder_coefficients() const;
  std::vector<double> m_values() const;

 private:
  int n_;
};

/// A Hermitian (or unitary) matrix acting inside one sector.
struct SectorOperator {
  int n = 0;
  Eigen::MatrixXcd matrix;

  double hermiticity_defect() const;
  double unitarity_defect() const;
};

struct SpinOperators {
  SectorOperator jx, jy, jz, number;
};

struct HamiltonianParams {
  double kappa = 1.0;  // tunneling
  double g = 0.0;      // self-interaction; g < 0 attractive, g > 0 repulsive
};

SpinOperators build_spin_operators(int n);

/// Moore-Penrose inverse of the number operator restricted to sector n.
double generalized_inverse_scalar(int n);

/// cos(angle) Jx + sin(angle) Jy.
SectorOperator build_jphi(int n, double angle);

/// Real symmetric tridiagonal Hamiltonian
///   H = kappa (a^dag b + a b^dag) + g/2 (a^dag a^dag a a + b^dag b^dag b b).
struct TridiagonalHamiltonian {
  std::vector<double> diag;
  std::vector<double> off;  // off[k] couples k and k+1
};
TridiagonalHamiltonian hamiltonian_tridiagonal(int n, const HamiltonianParams& params);
SectorOperator build_hamiltonian(int n, const HamiltonianParams& params);

/// exp(-i angle axis.J) via eigendecomposition of the generator.
/// Throws std::invalid_argument unless |axis| = 1 within 1e-9.
SectorOperator su2_rotation(int n, const Vec3& axis, double angle);

/// The 3x3 rotation R with U^dag J_i U = sum_j R_ij J_j for
/// U = exp(-i angle axis.J).
Mat3 rotation_matrix(const Vec3& axis, double angle);
Mat3 rotation_z(double angle);

/// Mach-Zehnder input beamsplitter a = (-i a_i + b_i)/sqrt2,
/// b = -(i a_i + b_i)/sqrt2 as a sector unitary. Satisfies
/// U^dag Jx U = Jz, U^dag Jy U = -Jx, U^dag Jz U = -Jy.
SectorOperator mz_input_rotation(int n);
Mat3 mz_rotation_matrix();

/// Cached mz_input_rotation(n); safe to call concurrently.
const Eigen::MatrixXcd& mz_unitary_cached(int n);

}  // namespace pqslab
