#include <map>
#include <memory>
#include <mutex>

#include "pqslab/kernels.hpp"
#include "pqslab/sector.hpp"

namespace pqslab::kernels {

const SectorTables& sector_tables(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<SectorTables>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;

  const SectorBasis basis(n);
  auto t = std::make_unique<SectorTables>();
  t->n = n;
  t->m = basis.m_values();
  t->ladder = basis.ladder_coefficients();
  for (std::size_t k = 0; k + 1 < t->ladder.size(); ++k) t->ladder2.push_back(t->ladder[k] * t->ladder[k + 1]);
  for (std::size_t k = 0; k < t->ladder.size(); ++k) t->ladder_z.push_back(t->ladder[k] * (2.0 * t->m[k] + 1.0));
  return *cache.emplace(n, std::move(t)).first->second;
}

SectorSums sector_sums_scalar(const cplx* amp, const SectorTables& tables) {
  SectorSums s;
  const std::size_t dim = tables.m.size();
  for (std::size_t k = 0; k < dim; ++k) {
    const double w = std::norm(amp[k]);
    s.norm += w;
    s.z1 += tables.m[k] * w;
    s.z2 += tables.m[k] * tables.m[k] * w;
  }
  for (std::size_t k = 0; k + 1 < dim; ++k) {
    const cplx prod = std::conj(amp[k + 1]) * amp[k];
    s.p1 += tables.ladder[k] * prod;
    s.p1z += tables.ladder_z[k] * prod;
  }
  for (std::size_t k = 0; k + 2 < dim; ++k) {
    s.p2 += tables.ladder2[k] * (std::conj(amp[k + 2]) * amp[k]);
  }
  return s;
}

void project_abs2_scalar(const double* basis, std::size_t dim, const cplx* psi, double* out) {
  for (std::size_t j = 0; j < dim; ++j) {
    const double* col = basis + j * dim;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      re += col[k] * psi[k].real();
      im += col[k] * psi[k].imag();
    }
    out[j] = re * re + im * im;
  }
}

}  // namespace pqslab::kernels
