#pragma once

#include <cstddef>
#include <vector>

namespace oscal::kernels {

/// Flat-array kernels behind every arithmetic inner loop. Each operation has
/// a scalar reference implementation plus SIMD variants; the active table is
/// chosen once per process from CPUID and can be pinned with
/// OSCAL_SIMD={auto,scalar,avx2}. All functions accept n == 0.
struct Ops {
  const char* name;

  double (*reduce_max)(const double* x, std::size_t n);  // -inf for n == 0
  double (*reduce_sum)(const double* x, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);

  // sum of exp((x[i] - shift) * scale); the _store form also writes each term
  double (*exp_shift_scale_sum)(const double* x, std::size_t n, double shift,
                                double scale);
  double (*exp_shift_scale_store)(double* out, const double* x, std::size_t n,
                                  double shift, double scale);

  void (*scale_inplace)(double* x, std::size_t n, double c);

  // prod of (1 - x[i]); 1 for n == 0
  double (*prod_one_minus)(const double* x, std::size_t n);
};

const Ops& scalar_ops();

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_supports_avx2();
const Ops& avx2_ops();  // call only when cpu_supports_avx2()
#endif

/// The dispatched table; fixed after the first call.
const Ops& active();

/// Every table compiled into this binary (for equivalence tests).
std::vector<const Ops*> compiled_ops();

}  // namespace oscal::kernels
