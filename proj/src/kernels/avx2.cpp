#include <immintrin.h>

#include "pqslab/kernels.hpp"

namespace pqslab::kernels {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Lanes hold [re0, im0, re1, im1]; returns (re0 + re1, im0 + im1).
cplx hsum_complex(__m256d v) {
  const __m128d s = _mm_add_pd(_mm256_castpd256_pd128(v), _mm256_extractf128_pd(v, 1));
  return {_mm_cvtsd_f64(s), _mm_cvtsd_f64(_mm_unpackhi_pd(s, s))};
}

// conj(a) * b for two packed complex numbers per register, times real w
// broadcast per complex element ([w0, w0, w1, w1]); accumulated into acc.
__m256d conj_mul_acc(__m256d a, __m256d b, __m256d w, __m256d acc) {
  // re = ar br + ai bi, im = ar bi - ai br
  const __m256d b_swap = _mm256_permute_pd(b, 0b0101);
  const __m256d re = _mm256_mul_pd(a, b);        // [ar br, ai bi, ...]
  const __m256d im = _mm256_mul_pd(a, b_swap);   // [ar bi, ai br, ...]
  const __m256d re_sum = _mm256_hadd_pd(re, re);  // [ar br + ai bi, same, ...]
  const __m256d im_dif = _mm256_hsub_pd(im, im);  // [ar bi - ai br, same, ...]
  const __m256d prod = _mm256_blend_pd(re_sum, im_dif, 0b1010);
  return _mm256_fmadd_pd(prod, w, acc);
}

__m256d widen_pair(const double* w) {
  // [w0, w0, w1, w1]
  const __m128d p = _mm_loadu_pd(w);
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(p), 0b01010000);
}

}  // namespace

SectorSums sector_sums_avx2(const cplx* amp, const SectorTables& tables) {
  const std::size_t dim = tables.m.size();
  const auto* a = reinterpret_cast<const double*>(amp);
  SectorSums s;

  __m256d norm_acc = _mm256_setzero_pd();
  __m256d z1_acc = _mm256_setzero_pd();
  __m256d z2_acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= dim; k += 2) {
    const __m256d c = _mm256_loadu_pd(a + 2 * k);
    const __m256d sq = _mm256_mul_pd(c, c);
    const __m256d m = widen_pair(tables.m.data() + k);
    norm_acc = _mm256_add_pd(norm_acc, sq);
    const __m256d msq = _mm256_mul_pd(m, sq);
    z1_acc = _mm256_add_pd(z1_acc, msq);
    z2_acc = _mm256_fmadd_pd(m, msq, z2_acc);
  }
  s.norm = hsum(norm_acc);
  s.z1 = hsum(z1_acc);
  s.z2 = hsum(z2_acc);
  for (; k < dim; ++k) {
    const double w = std::norm(amp[k]);
    s.norm += w;
    s.z1 += tables.m[k] * w;
    s.z2 += tables.m[k] * tables.m[k] * w;
  }

  __m256d p1_acc = _mm256_setzero_pd();
  __m256d pz_acc = _mm256_setzero_pd();
  k = 0;
  for (; k + 3 <= dim; k += 2) {
    const __m256d lower = _mm256_loadu_pd(a + 2 * k);
    const __m256d upper = _mm256_loadu_pd(a + 2 * (k + 1));
    p1_acc = conj_mul_acc(upper, lower, widen_pair(tables.ladder.data() + k), p1_acc);
    pz_acc = conj_mul_acc(upper, lower, widen_pair(tables.ladder_z.data() + k), pz_acc);
  }
  s.p1 = hsum_complex(p1_acc);
  s.p1z = hsum_complex(pz_acc);
  for (; k + 1 < dim; ++k) {
    const cplx prod = std::conj(amp[k + 1]) * amp[k];
    s.p1 += tables.ladder[k] * prod;
    s.p1z += tables.ladder_z[k] * prod;
  }

  __m256d p2_acc = _mm256_setzero_pd();
  k = 0;
  for (; k + 4 <= dim; k += 2) {
    const __m256d lower = _mm256_loadu_pd(a + 2 * k);
    const __m256d upper = _mm256_loadu_pd(a + 2 * (k + 2));
    p2_acc = conj_mul_acc(upper, lower, widen_pair(tables.ladder2.data() + k), p2_acc);
  }
  s.p2 = hsum_complex(p2_acc);
  for (; k + 2 < dim; ++k) {
    s.p2 += tables.ladder2[k] * (std::conj(amp[k + 2]) * amp[k]);
  }
  return s;
}

void project_abs2_avx2(const double* basis, std::size_t dim, const cplx* psi, double* out) {
  const auto* p = reinterpret_cast<const double*>(psi);
  for (std::size_t j = 0; j < dim; ++j) {
    const double* col = basis + j * dim;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= dim; k += 4) {
      const __m256d v = _mm256_loadu_pd(col + k);
      const __m256d v01 = _mm256_permute4x64_pd(v, 0b01010000);
      const __m256d v23 = _mm256_permute4x64_pd(v, 0b11111010);
      acc0 = _mm256_fmadd_pd(v01, _mm256_loadu_pd(p + 2 * k), acc0);
      acc1 = _mm256_fmadd_pd(v23, _mm256_loadu_pd(p + 2 * k + 4), acc1);
    }
    cplx sum = hsum_complex(_mm256_add_pd(acc0, acc1));
    for (; k < dim; ++k) sum += col[k] * psi[k];
    out[j] = std::norm(sum);
  }
}

}  // namespace pqslab::kernels
