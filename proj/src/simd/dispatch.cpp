#include <cstdlib>
#include <string_view>

#include "bpm/error.hpp"
#include "bpm/simd/kernels.hpp"

namespace bpm::simd {

#if BPM_SPDC_HAVE_AVX2
const Kernels& avx2_kernel_table();
#endif

const Kernels* avx2_kernels() {
#if BPM_SPDC_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const Kernels& select() {
  const char* env = std::getenv("BPM_SPDC_SIMD");
  const std::string_view request = env ? env : "auto";
  if (request == "scalar") return scalar_kernels();
  if (request == "avx2") {
    if (const Kernels* k = avx2_kernels()) return *k;
    throw Error("BPM_SPDC_SIMD=avx2 requested but AVX2/FMA kernels are unavailable on this build or CPU");
  }
  if (request != "auto" && !request.empty())
    throw Error("BPM_SPDC_SIMD must be one of auto, scalar, avx2");
  if (const Kernels* k = avx2_kernels()) return *k;
  return scalar_kernels();
}

}  // namespace

const Kernels& active_kernels() {
  static const Kernels& chosen = select();
  return chosen;
}

}  // namespace bpm::simd
