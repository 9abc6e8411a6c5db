#include <cmath>
#include <limits>

#include "oscal/kernels.hpp"

// Reference kernels. Plain single-accumulator loops: these define the
// semantics the SIMD variants are tested against.

namespace oscal::kernels {
namespace {

double k_reduce_max(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double k_reduce_sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double k_sum_sq(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double k_sum_sq_diff(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double k_dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double k_exp_shift_scale_sum(const double* x, std::size_t n, double shift,
                             double scale) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp((x[i] - shift) * scale);
  return s;
}

double k_exp_shift_scale_store(double* out, const double* x, std::size_t n,
                               double shift, double scale) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp((x[i] - shift) * scale);
    s += out[i];
  }
  return s;
}

void k_scale_inplace(double* x, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

double k_prod_one_minus(const double* x, std::size_t n) {
  double p = 1.0;
  for (std::size_t i = 0; i < n; ++i) p *= 1.0 - x[i];
  return p;
}

constexpr Ops kScalarOps = {
    "scalar",
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

const Ops& scalar_ops() { return kScalarOps; }

}  // namespace oscal::kernels
