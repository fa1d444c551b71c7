#pragma once

// Eigensolvers for symmetric and Hermitian tridiagonal matrices.
//
// Every Hermitian operator diagonalized in this library (Hamiltonian,
// J^phi, rotation generators, the planar-variance functional) is tridiagonal
// in the |J,m> basis, so these routines carry all production eigensolves.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace pqslab {

struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // size diag.size() - 1 (or 0 when empty)

  std::size_t size() const { return diag.size(); }
  double norm_inf() const;
};

struct HermTridiagonal {
  std::vector<double> diag;
  std::vector<std::complex<double>> off;  // off[k] = A(k+1, k)

  std::size_t size() const { return diag.size(); }
};

struct SymEigensystem {
  std::vector<double> values;  // ascending
  Eigen::MatrixXd vectors;     // column j pairs with values[j]
};

struct HermEigensystem {
  std::vector<double> values;
  Eigen::MatrixXcd vectors;
};

struct LowestPairs {
  std::vector<double> values;
  std::vector<Eigen::VectorXd> vectors;
};

/// All eigenvalues, ascending (implicit QL with Wilkinson shifts).
std::vector<double> tridiagonal_eigenvalues(const SymTridiagonal& t);

/// Full eigendecomposition, ascending.
SymEigensystem tridiagonal_eigensystem(const SymTridiagonal& t);

/// The k smallest eigenpairs by Sturm bisection and inverse iteration.
/// Vectors of clustered eigenvalues are mutually orthogonalized.
LowestPairs tridiagonal_lowest(const SymTridiagonal& t, std::size_t k);

/// Number of eigenvalues strictly below x (Sturm count).
std::size_t sturm_count(const SymTridiagonal& t, double x);

/// A Hermitian tridiagonal matrix is D T D^dag with T real symmetric
/// (off-diagonals |A(k+1,k)|) and D = diag(phase). Returns T and D.
struct GaugedTridiagonal {
  SymTridiagonal real;
  std::vector<std::complex<double>> phase;
};
GaugedTridiagonal gauge_to_real(const HermTridiagonal& h);

HermEigensystem hermitian_eigensystem(const HermTridiagonal& h);

struct HermLowest {
  std::vector<double> values;
  std::vector<Eigen::VectorXcd> vectors;
};
HermLowest hermitian_lowest(const HermTridiagonal& h, std::size_t k);

}  // namespace pqslab
