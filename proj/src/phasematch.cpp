#include "bpm/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>
#include <fmt/core.h>

#include "bpm/error.hpp"
#include "bpm/simd/scalar_math.hpp"

namespace bpm {

namespace {

constexpr double kEnergyTolerance = 1e-9;

const MaterialDispersion& material_of(const WaveguideConfig& c) {
  if (!c.material) throw ArgumentError("waveguide has no material model");
  return *c.material;
}

// n_e(θ; λ_p) − n_o(2λ_p): positive means the pump index is too high.
double degenerate_mismatch_index(const MaterialDispersion& m, double lambda_p, double t, PropagationAngle theta) {
  return index_extraordinary_at_angle(m, lambda_p, t, theta) - index_ordinary(m, 2.0 * lambda_p, t);
}

int sign_of(double v, double zero_tol) {
  if (std::abs(v) <= zero_tol) return 0;
  return v > 0.0 ? 1 : -1;
}

double refine(const auto& f, double lo, double hi, double flo, double fhi) {
  std::uintmax_t iterations = 200;
  const auto tol = [](double a, double b) {
    return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::min(std::abs(a), std::abs(b));
  };
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iterations);
  if (a == b) return a;
  return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

PhaseMatchSolution degenerate_solution(const WaveguideConfig& c, double lambda_p) {
  const auto& m = material_of(c);
  const double lambda_s = 2.0 * lambda_p;
  return PhaseMatchSolution{c.theta.degrees(),
                            c.temperature_K,
                            lambda_p,
                            lambda_s,
                            lambda_s,
                            delta_k(c, lambda_p, lambda_s, lambda_s),
                            index_ordinary(m, lambda_s, c.temperature_K)};
}

}  // namespace

void WaveguideConfig::validate() const {
  const auto& m = material_of(*this);
  if (!(length_mm > 0.0) || !std::isfinite(length_mm))
    throw ArgumentError(fmt::format("waveguide length must be positive, got {} mm", length_mm));
  m.check_temperature(temperature_K);
}

WaveguideConfig WaveguideConfig::with_temperature(double t) const {
  WaveguideConfig c = *this;
  c.temperature_K = t;
  return c;
}

WaveguideConfig WaveguideConfig::with_theta(PropagationAngle a) const {
  WaveguideConfig c = *this;
  c.theta = a;
  return c;
}

WaveguideConfig WaveguideConfig::with_length(double l) const {
  WaveguideConfig c = *this;
  c.length_mm = l;
  return c;
}

double delta_k(const WaveguideConfig& config, double lambda_p_nm, double lambda_s_nm, double lambda_i_nm) {
  config.validate();
  const auto& m = *config.material;
  if (!(lambda_p_nm > 0.0 && lambda_s_nm > 0.0 && lambda_i_nm > 0.0))
    throw ArgumentError("wavelengths must be positive");
  const double inv_p = 1.0 / lambda_p_nm;
  if (std::abs(inv_p - 1.0 / lambda_s_nm - 1.0 / lambda_i_nm) > kEnergyTolerance * inv_p)
    throw ArgumentError(fmt::format("energy not conserved: 1/{} != 1/{} + 1/{}", lambda_p_nm, lambda_s_nm,
                                    lambda_i_nm));
  const double t = config.temperature_K;
  const double n_p = index_extraordinary_at_angle(m, lambda_p_nm, t, config.theta);
  const double n_s = index_ordinary(m, lambda_s_nm, t);
  const double n_i = index_ordinary(m, lambda_i_nm, t);
  return simd::kTwoPiPerNmInRadPerMm * (n_s / lambda_s_nm + n_i / lambda_i_nm - n_p / lambda_p_nm);
}

PhaseMatchSolution solve_pm_wavelength(const WaveguideConfig& config, const SolverOptions& options) {
  config.validate();
  const auto& m = *config.material;
  const WavelengthRange valid = m.valid_range();
  const WavelengthRange search = options.pump_search.value_or(WavelengthRange{valid.min_nm, valid.max_nm / 2.0});
  if (!(search.min_nm < search.max_nm))
    throw ArgumentError(fmt::format("empty pump search interval [{}, {}] nm", search.min_nm, search.max_nm));
  if (!valid.contains(search.min_nm) || !valid.contains(2.0 * search.max_nm))
    throw RangeError(fmt::format("pump search [{}, {}] nm needs pump and signal inside [{}, {}] nm", search.min_nm,
                                 search.max_nm, valid.min_nm, valid.max_nm),
                     search.min_nm < valid.min_nm ? search.min_nm : 2.0 * search.max_nm);
  if (options.scan_samples < 2) throw ArgumentError("scan_samples must be at least 2");

  const double t = config.temperature_K;
  const auto f = [&](double l) { return degenerate_mismatch_index(m, l, t, config.theta); };

  const int n = options.scan_samples;
  std::vector<double> x(n), y(n);
  std::vector<int> s(n);
  for (int k = 0; k < n; ++k) {
    x[k] = k + 1 == n ? search.max_nm : search.min_nm + (search.max_nm - search.min_nm) * k / (n - 1);
    y[k] = f(x[k]);
    s[k] = sign_of(y[k], options.zero_tolerance);
  }

  std::vector<int> nonzero;
  for (int k = 0; k < n; ++k)
    if (s[k] != 0) nonzero.push_back(k);
  if (nonzero.empty())
    throw MultipleRoots("phase mismatch vanishes over the whole pump search interval",
                        {Bracket{search.min_nm, search.max_nm}}, true);

  // A run of zero samples counts as one root; a sign change between neighbours as another.
  struct Candidate {
    Bracket bracket;
    int lo_index;
    int hi_index;
    bool sign_change;
  };
  std::vector<Candidate> candidates;
  if (nonzero.front() > 0) candidates.push_back({{x[0], x[nonzero.front() - 1]}, 0, nonzero.front() - 1, false});
  for (std::size_t j = 1; j < nonzero.size(); ++j) {
    const int a = nonzero[j - 1], b = nonzero[j];
    if (s[a] != s[b])
      candidates.push_back({{x[a], x[b]}, a, b, true});
    else if (b > a + 1)
      candidates.push_back({{x[a + 1], x[b - 1]}, a + 1, b - 1, false});
  }
  if (nonzero.back() < n - 1)
    candidates.push_back({{x[nonzero.back() + 1], x[n - 1]}, nonzero.back() + 1, n - 1, false});

  if (candidates.empty()) {
    const int sign = s[nonzero.front()];
    throw NoCrossing(fmt::format("no degenerate phase matching for pump in [{}, {}] nm at theta = {} deg, T = {} K: "
                                 "n_e(theta; lp) - n_o(2 lp) stays {}",
                                 search.min_nm, search.max_nm, config.theta.degrees(), t,
                                 sign > 0 ? "positive" : "negative"),
                     sign);
  }
  if (candidates.size() > 1) {
    std::vector<Bracket> brackets;
    for (const auto& c : candidates) brackets.push_back(c.bracket);
    throw MultipleRoots(fmt::format("{} phase-matching roots for pump in [{}, {}] nm", candidates.size(),
                                    search.min_nm, search.max_nm),
                        std::move(brackets), false);
  }

  const Candidate& c = candidates.front();
  if (!c.sign_change) {
    if (c.lo_index != c.hi_index)
      throw MultipleRoots("phase mismatch vanishes over a sub-interval of the pump search range", {c.bracket}, true);
    return degenerate_solution(config, x[c.lo_index]);
  }
  return degenerate_solution(config, refine(f, c.bracket.lo, c.bracket.hi, y[c.lo_index], y[c.hi_index]));
}

PhaseMatchSolution solve_pm_angle(const WaveguideConfig& config, double lambda_p_nm) {
  config.validate();
  const auto& m = *config.material;
  const double t = config.temperature_K;
  m.check(lambda_p_nm, t);
  m.check(2.0 * lambda_p_nm, t);

  const double target = index_ordinary(m, 2.0 * lambda_p_nm, t);
  const double n_o = index_ordinary(m, lambda_p_nm, t);
  const double n_e = index_extraordinary_principal(m, lambda_p_nm, t);
  const auto g = [&](double deg) {
    const PropagationAngle a(std::clamp(deg, 0.0, 90.0));
    return simd::angle_mix_point(n_o, n_e, a.sin2(), a.cos2()) - target;
  };

  const double g0 = g(0.0);
  const double g90 = g(90.0);
  if (g0 == 0.0 && g90 == 0.0)
    throw MultipleRoots(fmt::format("every angle phase-matches a {} nm pump", lambda_p_nm), {Bracket{0.0, 90.0}},
                        true);
  if (g90 == 0.0) return degenerate_solution(config.with_theta(PropagationAngle(90.0)), lambda_p_nm);
  if (g0 == 0.0) return degenerate_solution(config.with_theta(PropagationAngle(0.0)), lambda_p_nm);
  if ((g0 > 0.0) == (g90 > 0.0))
    throw NoCrossing(fmt::format("pump {} nm cannot be phase-matched: n_e(theta) spans [{:.6f}, {:.6f}] over "
                                 "theta in [0, 90] deg but n_o({} nm) = {:.6f}",
                                 lambda_p_nm, std::min(n_o, n_e), std::max(n_o, n_e), 2.0 * lambda_p_nm, target),
                     g0 > 0.0 ? 1 : -1);

  const double theta = refine(g, 0.0, 90.0, g0, g90);
  return degenerate_solution(config.with_theta(PropagationAngle(theta)), lambda_p_nm);
}

TuningRate tuning_rate(const WaveguideConfig& config, double step_K, const SolverOptions& options) {
  if (!(step_K > 0.0) || !std::isfinite(step_K)) throw ArgumentError("temperature step must be positive");
  const double lo = solve_pm_wavelength(config.with_temperature(config.temperature_K - step_K), options).lambda_p_nm;
  const double mid = solve_pm_wavelength(config, options).lambda_p_nm;
  const double hi = solve_pm_wavelength(config.with_temperature(config.temperature_K + step_K), options).lambda_p_nm;
  const double fh_lo = 2.0 * lo, fh_mid = 2.0 * mid, fh_hi = 2.0 * hi;
  const double second = fh_hi - 2.0 * fh_mid + fh_lo;
  const double slope_step = std::abs(fh_hi - fh_lo) / 2.0;
  return TuningRate{(fh_hi - fh_lo) / (2.0 * step_K), fh_mid, second, std::abs(second) > 0.1 * slope_step};
}

ShgSpectrum shg_from_mismatch(std::span<const double> lambda_fh_nm, std::span<const double> delta_k_rad_per_mm,
                              double length_mm, const simd::Kernels& kernels) {
  if (lambda_fh_nm.empty()) throw ArgumentError("empty wavelength grid");
  if (lambda_fh_nm.size() != delta_k_rad_per_mm.size()) throw ArgumentError("grid and mismatch sizes differ");
  if (!(length_mm > 0.0) || !std::isfinite(length_mm)) throw ArgumentError("waveguide length must be positive");

  std::vector<double> eff(lambda_fh_nm.size());
  kernels.sinc_squared(delta_k_rad_per_mm, length_mm / 2.0, eff);
  const auto peak = std::max_element(eff.begin(), eff.end());
  const double max = *peak;
  if (!(max > 0.0)) throw UndefinedEstimate("SHG efficiency is zero on every grid point");

  ShgSpectrum out;
  out.points.reserve(eff.size());
  for (std::size_t i = 0; i < eff.size(); ++i) out.points.push_back({lambda_fh_nm[i], eff[i] / max});
  out.peak_lambda_nm = lambda_fh_nm[static_cast<std::size_t>(peak - eff.begin())];
  return out;
}

ShgSpectrum shg_spectrum(const WaveguideConfig& config, std::span<const double> lambda_fh_nm,
                         const simd::Kernels& kernels) {
  config.validate();
  const auto& m = *config.material;
  if (lambda_fh_nm.empty()) throw ArgumentError("empty wavelength grid");
  for (std::size_t i = 1; i < lambda_fh_nm.size(); ++i)
    if (!(lambda_fh_nm[i] > lambda_fh_nm[i - 1])) throw ArgumentError("wavelength grid must be strictly increasing");

  const std::size_t n = lambda_fh_nm.size();
  std::vector<double> sh(n), n_fh(n), n_sh(n), dk(n);
  for (std::size_t i = 0; i < n; ++i) sh[i] = lambda_fh_nm[i] / 2.0;
  index_batch(m, Polarization::ordinary, lambda_fh_nm, config.temperature_K, n_fh, kernels);
  index_extraordinary_at_angle_batch(m, sh, config.temperature_K, config.theta, n_sh, kernels);
  kernels.degenerate_mismatch(lambda_fh_nm, n_fh, n_sh, dk);
  return shg_from_mismatch(lambda_fh_nm, dk, config.length_mm, kernels);
}

std::vector<double> wavelength_grid(double min_nm, double max_nm, double step_nm) {
  if (!(step_nm > 0.0) || !std::isfinite(step_nm)) throw ArgumentError("grid step must be positive");
  if (!(min_nm <= max_nm)) throw ArgumentError("grid minimum exceeds maximum");
  const auto count = static_cast<std::size_t>(std::floor((max_nm - min_nm) / step_nm + 1e-9)) + 1;
  if (count > 50'000'000) throw ResourceError("wavelength grid exceeds 5e7 points");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = std::min(min_nm + step_nm * static_cast<double>(i), max_nm);
  return grid;
}

double main_lobe_fwhm(const ShgSpectrum& spectrum) {
  const auto& p = spectrum.points;
  std::size_t peak = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i].efficiency > p[peak].efficiency) peak = i;
  const auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double y0 = p[inside].efficiency, y1 = p[outside].efficiency;
    const double t = (y0 - 0.5) / (y0 - y1);
    return p[inside].lambda_nm + t * (p[outside].lambda_nm - p[inside].lambda_nm);
  };
  double left = std::numeric_limits<double>::quiet_NaN(), right = left;
  for (std::size_t i = peak; i > 0; --i)
    if (p[i - 1].efficiency < 0.5) {
      left = crossing(i, i - 1);
      break;
    }
  for (std::size_t i = peak; i + 1 < p.size(); ++i)
    if (p[i + 1].efficiency < 0.5) {
      right = crossing(i, i + 1);
      break;
    }
  return right - left;
}

}  // namespace bpm
