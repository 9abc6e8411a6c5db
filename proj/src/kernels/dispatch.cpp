#include <cstdlib>
#include <string>

#include "oscal/error.hpp"
#include "oscal/kernels.hpp"

namespace oscal::kernels {

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_supports_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

namespace {

const Ops& select() {
  const char* env = std::getenv("OSCAL_SIMD");
  const std::string mode = env ? env : "auto";
  if (mode == "scalar") return scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
  if (mode == "avx2") {
    if (!cpu_supports_avx2())
      throw InvalidArgument("OSCAL_SIMD=avx2 requested but the CPU lacks AVX2/FMA");
    return avx2_ops();
  }
  if (mode == "auto") return cpu_supports_avx2() ? avx2_ops() : scalar_ops();
#else
  if (mode == "avx2")
    throw InvalidArgument("OSCAL_SIMD=avx2 is not available in this build");
  if (mode == "auto") return scalar_ops();
#endif
  throw InvalidArgument("unrecognized OSCAL_SIMD value '" + mode +
                        "' (expected auto, scalar or avx2)");
}

}  // namespace

const Ops& active() {
  static const Ops& ops = select();
  return ops;
}

std::vector<const Ops*> compiled_ops() {
  std::vector<const Ops*> all;
  all.push_back(&scalar_ops());
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_supports_avx2()) all.push_back(&avx2_ops());
#endif
  return all;
}

}  // namespace oscal::kernels
