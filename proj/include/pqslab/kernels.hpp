#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and, on
// x86-64, an AVX2/FMA variant; the variant is picked once at first use from
// the CPU features (override with PQSLAB_KERNEL=scalar|avx2).

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

namespace pqslab::kernels {

using cplx = std::complex<double>;

/// Per-sector coefficient tables, index k <-> m = k - J.
struct SectorTables {
  int n = 0;
  std::vector<double> m;         // dim
  std::vector<double> ladder;    // dim-1: sqrt((J-m)(J+m+1))
  std::vector<double> ladder2;   // dim-2: ladder[k] * ladder[k+1]
  std::vector<double> ladder_z;  // dim-1: ladder[k] * (2 m_k + 1)
};

/// Thread-safe cached tables for sector n.
const SectorTables& sector_tables(int n);

/// Raw sums over one sector state c:
///   norm = sum |c_k|^2,  z1 = sum m |c|^2,  z2 = sum m^2 |c|^2,
///   p1  = <J+>       = sum conj(c_{k+1}) ladder_k c_k,
///   p2  = <J+^2>     = sum conj(c_{k+2}) ladder2_k c_k,
///   p1z = <{J+, Jz}> = sum conj(c_{k+1}) ladder_z_k c_k.
struct SectorSums {
  double norm = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
  cplx p1{};
  cplx p2{};
  cplx p1z{};
};

/// out[j] = |sum_k basis(k, j) psi[k]|^2 with `basis` a dim x dim real
/// column-major matrix.
using ProjectAbs2Fn = void (*)(const double* basis, std::size_t dim, const cplx* psi, double* out);
using SectorSumsFn = SectorSums (*)(const cplx* amp, const SectorTables& tables);

SectorSums sector_sums_scalar(const cplx* amp, const SectorTables& tables);
void project_abs2_scalar(const double* basis, std::size_t dim, const cplx* psi, double* out);

#if defined(PQSLAB_WITH_AVX2)
SectorSums sector_sums_avx2(const cplx* amp, const SectorTables& tables);
void project_abs2_avx2(const double* basis, std::size_t dim, const cplx* psi, double* out);
#endif

bool avx2_available();

/// Dispatched entry points.
SectorSums sector_sums(const cplx* amp, const SectorTables& tables);
void project_abs2(const double* basis, std::size_t dim, const cplx* psi, double* out);

std::string_view active_backend();

}  // namespace pqslab::kernels
