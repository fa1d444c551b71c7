#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pqslab/kernels.hpp"

namespace pqslab::kernels {

namespace {

struct Table {
  SectorSumsFn sector_sums;
  ProjectAbs2Fn project_abs2;
  std::string_view name;
};

Table select() {
  const Table scalar{sector_sums_scalar, project_abs2_scalar, "scalar"};
#if defined(PQSLAB_WITH_AVX2)
  const Table avx2{sector_sums_avx2, project_abs2_avx2, "avx2"};
#endif
  const char* env = std::getenv("PQSLAB_KERNEL");
  const std::string want = env != nullptr ? env : "";
  if (want == "scalar") return scalar;
  if (want == "avx2") {
#if defined(PQSLAB_WITH_AVX2)
    if (avx2_available()) return avx2;
#endif
    throw std::runtime_error("PQSLAB_KERNEL=avx2 requested but AVX2/FMA is not available");
  }
  if (!want.empty() && want != "auto") {
    throw std::runtime_error("unknown PQSLAB_KERNEL value: " + want);
  }
#if defined(PQSLAB_WITH_AVX2)
  if (avx2_available()) return avx2;
#endif
  return scalar;
}

const Table& table() {
  static const Table t = select();
  return t;
}

}  // namespace

bool avx2_available() {
#if defined(PQSLAB_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

SectorSums sector_sums(const cplx* amp, const SectorTables& tables) { return table().sector_sums(amp, tables); }

void project_abs2(const double* basis, std::size_t dim, const cplx* psi, double* out) {
  table().project_abs2(basis, dim, psi, out);
}

std::string_view active_backend() { return table().name; }

}  // namespace pqslab::kernels
