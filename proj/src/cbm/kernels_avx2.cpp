// AVX2+FMA sweep: all eight lanes of each site updated by one vector op per
// step of the scalar kernel.  Per-lane arithmetic (fma order, polynomial
// constants, division, integer RNG updates, compare/select) mirrors
// kernels_scalar.cpp exactly, so the two kernels are bit-identical.
#if defined(__x86_64__) || defined(_M_X64)
#ifdef CBM_COMPILE_AVX2

#include <immintrin.h>

#include "cbm/kernels.hpp"

namespace cbm::kern {

namespace {

inline __m256 exp_poly_avx2(__m256 x) {
  x = _mm256_min_ps(_mm256_max_ps(x, _mm256_set1_ps(-87.0f)), _mm256_set1_ps(87.0f));
  const __m256 shifter = _mm256_set1_ps(12582912.0f);
  __m256 z = _mm256_fmadd_ps(x, _mm256_set1_ps(1.44269504f), shifter);
  __m256 n = _mm256_sub_ps(z, shifter);
  __m256 r = _mm256_fmadd_ps(n, _mm256_set1_ps(-0.693359375f), x);
  r = _mm256_fmadd_ps(n, _mm256_set1_ps(2.12194440e-4f), r);
  __m256 p = _mm256_set1_ps(1.9875691500e-4f);
  p = _mm256_fmadd_ps(p, r, _mm256_set1_ps(1.3981999507e-3f));
  p = _mm256_fmadd_ps(p, r, _mm256_set1_ps(8.3334519073e-3f));
  p = _mm256_fmadd_ps(p, r, _mm256_set1_ps(4.1665795894e-2f));
  p = _mm256_fmadd_ps(p, r, _mm256_set1_ps(1.6666665459e-1f));
  p = _mm256_fmadd_ps(p, r, _mm256_set1_ps(5.0000001201e-1f));
  __m256 y = _mm256_add_ps(_mm256_fmadd_ps(p, _mm256_mul_ps(r, r), r),
                           _mm256_set1_ps(1.0f));
  // n is an exact small integer; cvtps matches the scalar (int) cast
  __m256i ni = _mm256_cvtps_epi32(n);
  __m256i bits = _mm256_slli_epi32(_mm256_add_epi32(ni, _mm256_set1_epi32(127)), 23);
  return _mm256_mul_ps(y, _mm256_castsi256_ps(bits));
}

inline __m256i rotl32(__m256i x, int k) {
  return _mm256_or_si256(_mm256_slli_epi32(x, k), _mm256_srli_epi32(x, 32 - k));
}

}  // namespace

void sweep_avx2(const Plan& plan, int sweeps, LaneState& st) {
  float* q = st.q.data();
  uint32_t* S = st.rng.data();
  const float* bias = plan.bias.data();
  const int* indptr = plan.indptr.data();
  const int* nbr = plan.nbr.data();
  const float* w = plan.w.data();

  __m256i s0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(S + 0 * lanes));
  __m256i s1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(S + 1 * lanes));
  __m256i s2 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(S + 2 * lanes));
  __m256i s3 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(S + 3 * lanes));
  const __m256 ones = _mm256_set1_ps(1.0f);
  const __m256 scale24 = _mm256_set1_ps(0x1.0p-24f);

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int oi = 0; oi < plan.n_sites; ++oi) {
      const int i = plan.order[oi];
      __m256 acc = _mm256_set1_ps(bias[i]);
      for (int k = indptr[i]; k < indptr[i + 1]; ++k)
        acc = _mm256_fmadd_ps(_mm256_set1_ps(w[k]),
                              _mm256_loadu_ps(q + size_t(nbr[k]) * lanes), acc);
      const __m256 p1 = _mm256_div_ps(ones, _mm256_add_ps(ones, exp_poly_avx2(acc)));

      const __m256i res = _mm256_add_epi32(rotl32(_mm256_add_epi32(s0, s3), 7), s0);
      const __m256i t = _mm256_slli_epi32(s1, 9);
      s2 = _mm256_xor_si256(s2, s0);
      s3 = _mm256_xor_si256(s3, s1);
      s1 = _mm256_xor_si256(s1, s2);
      s0 = _mm256_xor_si256(s0, s3);
      s2 = _mm256_xor_si256(s2, t);
      s3 = rotl32(s3, 11);

      const __m256 u =
          _mm256_mul_ps(_mm256_cvtepi32_ps(_mm256_srli_epi32(res, 8)), scale24);
      const __m256 hit = _mm256_cmp_ps(u, p1, _CMP_LT_OQ);
      _mm256_storeu_ps(q + size_t(i) * lanes, _mm256_and_ps(hit, ones));
    }
  }

  _mm256_storeu_si256(reinterpret_cast<__m256i*>(S + 0 * lanes), s0);
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(S + 1 * lanes), s1);
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(S + 2 * lanes), s2);
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(S + 3 * lanes), s3);
}

}  // namespace cbm::kern

#endif  // CBM_COMPILE_AVX2
#endif  // x86_64
