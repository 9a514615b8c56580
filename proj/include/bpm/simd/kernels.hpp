#pragma once

// Batch arithmetic kernels behind the dispersion and SHG sweeps.
//
// Every kernel has a scalar reference built from scalar_math.hpp and, on x86-64,
// an AVX2+FMA variant. The variant is chosen once per process: the CPU must
// report AVX2 and FMA, and the environment variable BPM_SPDC_SIMD can force
// `scalar` (or demand `avx2`). Variants agree to a few ulps, not bit-for-bit,
// because FMA contracts roundings.
//
// All spans passed to one call must have the same length; `out` may alias an input.

#include <span>
#include <string_view>

namespace bpm::simd {

enum class Isa { scalar, avx2 };

struct Kernels {
  Isa isa;
  std::string_view name;

  void (*sellmeier)(std::span<const double> lambda_nm, std::span<const double> coefficients, double shift,
                    std::span<double> out);
  void (*cauchy)(std::span<const double> lambda_nm, std::span<const double> coefficients, double shift,
                 std::span<double> out);
  void (*angle_mix)(std::span<const double> n_o, std::span<const double> n_e, double sin2, double cos2,
                    std::span<double> out);
  void (*degenerate_mismatch)(std::span<const double> lambda_fh_nm, std::span<const double> n_fh,
                              std::span<const double> n_sh, std::span<double> out);
  /// out = sinc²(scale · x)
  void (*sinc_squared)(std::span<const double> x, double scale, std::span<double> out);
};

const Kernels& scalar_kernels();

/// AVX2 table, or nullptr when not compiled in or the CPU lacks AVX2/FMA.
const Kernels* avx2_kernels();

/// Kernel table selected for this process (see header comment).
const Kernels& active_kernels();

}  // namespace bpm::simd
