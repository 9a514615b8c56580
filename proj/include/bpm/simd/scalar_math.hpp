#pragma once

// Reference scalar formulas. The batch kernels in kernels.hpp must agree with
// these to rounding; point evaluations elsewhere in the library call them directly.

#include <cmath>
#include <numbers>
#include <span>

namespace bpm::simd {

/// Wavevector factor 2π/λ for λ in nm, expressed in rad/mm.
inline constexpr double kTwoPiPerNmInRadPerMm = 2.0 * std::numbers::pi * 1.0e6;

/// n(λ) = sqrt(A + Σ_j B_j λ²/(λ² − C_j)) + shift with λ in µm.
/// `coefficients` = {A, B_1, C_1, B_2, C_2, ...}.
inline double sellmeier_point(double lambda_nm, std::span<const double> coefficients, double shift) {
  const double lum = lambda_nm * 1.0e-3;
  const double l2 = lum * lum;
  double sum = coefficients[0];
  for (std::size_t j = 1; j + 1 < coefficients.size(); j += 2)
    sum += coefficients[j] * l2 / (l2 - coefficients[j + 1]);
  return std::sqrt(sum) + shift;
}

/// n(λ) = Σ_k c_k λ^(−2k) + shift with λ in nm (Cauchy series).
inline double cauchy_point(double lambda_nm, std::span<const double> coefficients, double shift) {
  const double u = 1.0 / (lambda_nm * lambda_nm);
  double acc = 0.0;
  for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * u + coefficients[k];
  return acc + shift;
}

/// Index-ellipsoid rotation: 1/n² = sin²θ/n_e² + cos²θ/n_o².
inline double angle_mix_point(double n_o, double n_e, double sin2, double cos2) {
  if (cos2 == 0.0) return n_e;
  if (sin2 == 0.0) return n_o;
  return 1.0 / std::sqrt(sin2 / (n_e * n_e) + cos2 / (n_o * n_o));
}

/// Degenerate mismatch 2π[2 n_fh/λ_fh − n_sh/(λ_fh/2)] in rad/mm.
inline double degenerate_mismatch_point(double lambda_fh_nm, double n_fh, double n_sh) {
  return 2.0 * kTwoPiPerNmInRadPerMm * (n_fh - n_sh) / lambda_fh_nm;
}

/// sinc²(x) with sinc(x) = sin(x)/x and sinc(0) = 1.
inline double sinc_squared_point(double x) {
  if (x == 0.0) return 1.0;
  const double s = std::sin(x) / x;
  return s * s;
}

}  // namespace bpm::simd
