// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma in its own translation
// unit; nothing here runs unless the dispatcher verified CPUID support.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "oscal/kernels.hpp"

namespace oscal::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  const double a = _mm_cvtsd_f64(lo);
  const double b = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  return a > b ? a : b;
}

// exp() for 4 doubles, Cephes-style: x = k*ln2 + r, exp(r) from a rational in
// r^2, scale by 2^k through the exponent field. Relative error a few ulp of
// std::exp on [-708, 708]; inputs below ln(DBL_MIN) flush to 0 (no denormal
// output) and inputs above 709.0 saturate to +inf.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);
  const __m256d overflow_x = _mm256_set1_pd(709.0);
  const __m256d underflow_x = _mm256_set1_pd(-708.39641853226410622);

  const __m256d kf = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(kf, ln2_hi, x);
  r = _mm256_fnmadd_pd(kf, ln2_lo, r);
  const __m256d r2 = _mm256_mul_pd(r, r);

  __m256d px = _mm256_fmadd_pd(p0, r2, p1);
  px = _mm256_fmadd_pd(px, r2, p2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(q0, r2, q1);
  qx = _mm256_fmadd_pd(qx, r2, q2);
  qx = _mm256_fmadd_pd(qx, r2, q3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  const __m128i k32 = _mm256_cvtpd_epi32(kf);
  const __m256i k64 = _mm256_cvtepi32_epi64(k32);
  const __m256i pow2k =
      _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(pow2k));

  e = _mm256_blendv_pd(e, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
                       _mm256_cmp_pd(x, overflow_x, _CMP_GT_OQ));
  e = _mm256_blendv_pd(e, _mm256_setzero_pd(),
                       _mm256_cmp_pd(x, underflow_x, _CMP_LT_OQ));
  return e;
}

double k_reduce_max(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vm = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4) vm = _mm256_max_pd(vm, _mm256_loadu_pd(x + i));
    m = hmax(vm);
  }
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double k_reduce_sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double k_sum_sq(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

double k_sum_sq_diff(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double k_dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double k_exp_shift_scale_sum(const double* x, std::size_t n, double shift,
                             double scale) {
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d vscale = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vshift), vscale);
    acc = _mm256_add_pd(acc, exp4(v));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::exp((x[i] - shift) * scale);
  return s;
}

double k_exp_shift_scale_store(double* out, const double* x, std::size_t n,
                               double shift, double scale) {
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d vscale = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v =
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vshift), vscale);
    const __m256d e = exp4(v);
    _mm256_storeu_pd(out + i, e);
    acc = _mm256_add_pd(acc, e);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    out[i] = std::exp((x[i] - shift) * scale);
    s += out[i];
  }
  return s;
}

void k_scale_inplace(double* x, std::size_t n, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vc));
  for (; i < n; ++i) x[i] *= c;
}

double k_prod_one_minus(const double* x, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = one;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_mul_pd(acc, _mm256_sub_pd(one, _mm256_loadu_pd(x + i)));
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  lo = _mm_mul_pd(lo, hi);
  double p = _mm_cvtsd_f64(lo) * _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  for (; i < n; ++i) p *= 1.0 - x[i];
  return p;
}

constexpr Ops kAvx2Ops = {
    "avx2",
    k_reduce_max,
    k_reduce_sum,
    k_sum_sq,
    k_sum_sq_diff,
    k_dot,
    k_exp_shift_scale_sum,
    k_exp_shift_scale_store,
    k_scale_inplace,
    k_prod_one_minus,
};

}  // namespace

const Ops& avx2_ops() { return kAvx2Ops; }

}  // namespace oscal::kernels

#endif  // x86_64
