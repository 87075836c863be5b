// Compiled with -mavx2. Only reached after a runtime CPU check.

#include <immintrin.h>

#include "fuchs/kernels.hpp"

namespace fuchs::kernels::avx2_backend {

namespace {

inline __m256d load(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// [re, re] and [im, im] per complex lane.
inline __m256d dup_re(__m256d v) { return _mm256_movedup_pd(v); }
inline __m256d dup_im(__m256d v) { return _mm256_permute_pd(v, 0xF); }
inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0x5); }

inline __m256d negate(__m256d v) { return _mm256_xor_pd(v, _mm256_set1_pd(-0.0)); }
// Matches kernels::neg, which maps -0 to +0.
inline __m256d negate_positive_zero(__m256d v) { return _mm256_add_pd(negate(v), _mm256_setzero_pd()); }

inline __m256d mul2(__m256d a, __m256d b) {
  const __m256d p1 = _mm256_mul_pd(a, dup_re(b));              // [ar*br, ai*br]
  const __m256d p2 = _mm256_mul_pd(swap_re_im(a), dup_im(b));  // [ai*bi, ar*bi]
  return _mm256_addsub_pd(p1, p2);
}

inline __m256d div2(__m256d a, __m256d b) {
  const __m256d br = dup_re(b);
  const __m256d bi = dup_im(b);
  const __m256d a_sw = swap_re_im(a);

  // |br| >= |bi|
  const __m256d r1 = _mm256_div_pd(bi, br);
  const __m256d den1 = _mm256_add_pd(br, _mm256_mul_pd(bi, r1));
  const __m256d num1 = _mm256_addsub_pd(a, negate(_mm256_mul_pd(a_sw, r1)));
  const __m256d q1 = _mm256_div_pd(num1, den1);

  // |br| < |bi|
  const __m256d r2 = _mm256_div_pd(br, bi);
  const __m256d den2 = _mm256_add_pd(bi, _mm256_mul_pd(br, r2));
  const __m256d num2 = _mm256_addsub_pd(_mm256_mul_pd(a, r2), negate(a_sw));
  const __m256d q2 = _mm256_div_pd(num2, den2);

  const __m256d absb = _mm256_andnot_pd(_mm256_set1_pd(-0.0), b);
  const __m256d first = _mm256_cmp_pd(dup_re(absb), dup_im(absb), _CMP_GE_OQ);
  return _mm256_blendv_pd(q2, q1, first);
}

}  // namespace

void add(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store(out + i, _mm256_add_pd(load(a + i), load(b + i)));
  for (; i < n; ++i) out[i] = kernels::add(a[i], b[i]);
}

void sub(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store(out + i, _mm256_sub_pd(load(a + i), load(b + i)));
  for (; i < n; ++i) out[i] = kernels::sub(a[i], b[i]);
}

void mul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store(out + i, mul2(load(a + i), load(b + i)));
  for (; i < n; ++i) out[i] = kernels::mul(a[i], b[i]);
}

void div(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store(out + i, div2(load(a + i), load(b + i)));
  for (; i < n; ++i) out[i] = kernels::div(a[i], b[i]);
}

void neg(const cplx* a, cplx* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store(out + i, negate_positive_zero(load(a + i)));
  for (; i < n; ++i) out[i] = kernels::neg(a[i]);
}

}  // namespace fuchs::kernels::avx2_backend
