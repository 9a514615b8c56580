#include "bpm/simd/kernels.hpp"
#include "bpm/simd/scalar_math.hpp"

namespace bpm::simd {

namespace {

void sellmeier(std::span<const double> lambda_nm, std::span<const double> coefficients, double shift,
               std::span<double> out) {
  for (std::size_t i = 0; i < lambda_nm.size(); ++i) out[i] = sellmeier_point(lambda_nm[i], coefficients, shift);
}

void cauchy(std::span<const double> lambda_nm, std::span<const double> coefficients, double shift,
            std::span<double> out) {
  for (std::size_t i = 0; i < lambda_nm.size(); ++i) out[i] = cauchy_point(lambda_nm[i], coefficients, shift);
}

void angle_mix(std::span<const double> n_o, std::span<const double> n_e, double sin2, double cos2,
               std::span<double> out) {
  for (std::size_t i = 0; i < n_o.size(); ++i) out[i] = angle_mix_point(n_o[i], n_e[i], sin2, cos2);
}

void degenerate_mismatch(std::span<const double> lambda_fh_nm, std::span<const double> n_fh,
                         std::span<const double> n_sh, std::span<double> out) {
  for (std::size_t i = 0; i < lambda_fh_nm.size(); ++i)
    out[i] = degenerate_mismatch_point(lambda_fh_nm[i], n_fh[i], n_sh[i]);
}

void sinc_squared(std::span<const double> x, double scale, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = sinc_squared_point(scale * x[i]);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels table{Isa::scalar, "scalar", sellmeier, cauchy, angle_mix, degenerate_mismatch, sinc_squared};
  return table;
}

}  // namespace bpm::simd
