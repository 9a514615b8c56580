// AVX2 + FMA variants of the batch kernels. Compiled with -mavx2 -mfma; only
// reached after dispatch.cpp has confirmed CPU support. Tails go through masked
// loads so this TU never emits copies of the shared inline scalar helpers.

#include <immintrin.h>

#include <array>
#include <numbers>

#include "bpm/simd/kernels.hpp"
#include "bpm/simd/scalar_math.hpp"  // constants only

namespace bpm::simd {

namespace {

constexpr std::size_t kLanes = 4;

__m256i tail_mask(std::size_t remaining) {
  const __m256i lane = _mm256_set_epi64x(3, 2, 1, 0);
  return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(remaining)), lane);
}

__m256d load(const double* p, std::size_t remaining) {
  return remaining >= kLanes ? _mm256_loadu_pd(p) : _mm256_maskload_pd(p, tail_mask(remaining));
}

void store(double* p, __m256d v, std::size_t remaining) {
  if (remaining >= kLanes)
    _mm256_storeu_pd(p, v);
  else
    _mm256_maskstore_pd(p, tail_mask(remaining), v);
}

void sellmeier(std::span<const double> lambda_nm, std::span<const double> coefficients, double shift,
               std::span<double> out) {
  const std::size_t n = lambda_nm.size();
  const __m256d nm_to_um = _mm256_set1_pd(1.0e-3);
  const __m256d a = _mm256_set1_pd(coefficients[0]);
  const __m256d vshift = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i < n; i += kLanes) {
    const std::size_t rem = n - i;
    const __m256d lum = _mm256_mul_pd(load(&lambda_nm[i], rem), nm_to_um);
    const __m256d l2 = _mm256_mul_pd(lum, lum);
    __m256d sum = a;
    for (std::size_t j = 1; j + 1 < coefficients.size(); j += 2) {
      const __m256d b = _mm256_set1_pd(coefficients[j]);
      const __m256d c = _mm256_set1_pd(coefficients[j + 1]);
      sum = _mm256_add_pd(sum, _mm256_div_pd(_mm256_mul_pd(b, l2), _mm256_sub_pd(l2, c)));
    }
    store(&out[i], _mm256_add_pd(_mm256_sqrt_pd(sum), vshift), rem);
  }
}

void cauchy(std::span<const double> lambda_nm, std::span<const double> coefficients, double shift,
            std::span<double> out) {
  const std::size_t n = lambda_nm.size();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vshift = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i < n; i += kLanes) {
    const std::size_t rem = n - i;
    const __m256d l = load(&lambda_nm[i], rem);
    const __m256d u = _mm256_div_pd(one, _mm256_mul_pd(l, l));
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = coefficients.size(); k-- > 0;)
      acc = _mm256_fmadd_pd(acc, u, _mm256_set1_pd(coefficients[k]));
    store(&out[i], _mm256_add_pd(acc, vshift), rem);
  }
}

void angle_mix(std::span<const double> n_o, std::span<const double> n_e, double sin2, double cos2,
               std::span<double> out) {
  const std::size_t n = n_o.size();
  if (cos2 == 0.0 || sin2 == 0.0) {
    const auto src = cos2 == 0.0 ? n_e : n_o;
    for (std::size_t i = 0; i < n; ++i) out[i] = src[i];
    return;
  }
  const __m256d vs = _mm256_set1_pd(sin2);
  const __m256d vc = _mm256_set1_pd(cos2);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i < n; i += kLanes) {
    const std::size_t rem = n - i;
    const __m256d no = load(&n_o[i], rem);
    const __m256d ne = load(&n_e[i], rem);
    const __m256d inv = _mm256_add_pd(_mm256_div_pd(vs, _mm256_mul_pd(ne, ne)),
                                      _mm256_div_pd(vc, _mm256_mul_pd(no, no)));
    store(&out[i], _mm256_div_pd(one, _mm256_sqrt_pd(inv)), rem);
  }
}

void degenerate_mismatch(std::span<const double> lambda_fh_nm, std::span<const double> n_fh,
                         std::span<const double> n_sh, std::span<double> out) {
  const std::size_t n = lambda_fh_nm.size();
  const __m256d factor = _mm256_set1_pd(2.0 * kTwoPiPerNmInRadPerMm);
  std::size_t i = 0;
  for (; i < n; i += kLanes) {
    const std::size_t rem = n - i;
    const __m256d diff = _mm256_sub_pd(load(&n_fh[i], rem), load(&n_sh[i], rem));
    store(&out[i], _mm256_div_pd(_mm256_mul_pd(factor, diff), load(&lambda_fh_nm[i], rem)), rem);
  }
}

// sin(r) on [-π/2, π/2] by its Taylor series through r^21 (truncation < 2e-18).
constexpr std::array<double, 11> kSinTaylor = [] {
  std::array<double, 11> c{};
  double fact = 1.0;
  for (int k = 0; k < 11; ++k) {
    if (k > 0) fact *= (2.0 * k) * (2.0 * k + 1.0);
    c[k] = (k % 2 ? -1.0 : 1.0) / fact;
  }
  return c;
}();

void sinc_squared(std::span<const double> x, double scale, std::span<double> out) {
  const std::size_t n = x.size();
  // Cody-Waite split of π; the FMA keeps x - k·π_hi exact for |k| < 2^20.
  const __m256d pi_hi = _mm256_set1_pd(std::numbers::pi);
  const __m256d pi_lo = _mm256_set1_pd(1.2246467991473532e-16);
  const __m256d inv_pi = _mm256_set1_pd(std::numbers::inv_pi);
  const __m256d vscale = _mm256_set1_pd(scale);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i < n; i += kLanes) {
    const std::size_t rem = n - i;
    const __m256d v = _mm256_mul_pd(vscale, load(&x[i], rem));
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(v, inv_pi), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, pi_hi, v);
    r = _mm256_fnmadd_pd(k, pi_lo, r);
    const __m256d r2 = _mm256_mul_pd(r, r);
    __m256d p = _mm256_set1_pd(kSinTaylor[10]);
    for (int t = 9; t >= 0; --t) p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(kSinTaylor[t]));
    // sin²(v) = sin²(r): the (-1)^k sign drops out of the square.
    const __m256d s = _mm256_div_pd(_mm256_mul_pd(r, p), v);
    const __m256d sq = _mm256_mul_pd(s, s);
    const __m256d is_zero = _mm256_cmp_pd(v, zero, _CMP_EQ_OQ);
    store(&out[i], _mm256_blendv_pd(sq, one, is_zero), rem);
  }
}

}  // namespace

const Kernels& avx2_kernel_table() {
  static const Kernels table{Isa::avx2, "avx2", sellmeier, cauchy, angle_mix, degenerate_mismatch, sinc_squared};
  return table;
}

}  // namespace bpm::simd
