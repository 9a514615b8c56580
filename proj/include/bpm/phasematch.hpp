#pragma once

// Type-1 (e -> o + o) birefringent phase matching in a straight waveguide:
// wavevector mismatch, degenerate phase-matching solvers in wavelength and
// angle, thermal tuning rate and the undepleted-pump SHG spectrum.

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bpm/dispersion.hpp"
#include "bpm/simd/kernels.hpp"

namespace bpm {

/// Ridge geometry, carried for provenance only; indices come from the material model.
struct WaveguideGeometry {
  double top_width_um = 5.0;
  double etch_depth_um = 1.5;
  double film_thickness_um = 5.0;
  double sidewall_angle_deg = 45.0;
};

struct WaveguideConfig {
  std::shared_ptr<const MaterialDispersion> material;
  PropagationAngle theta{90.0};
  double length_mm = 20.0;
  double temperature_K = 293.15;
  WaveguideGeometry geometry{};

  /// Throws ArgumentError / RangeError when length or temperature are unusable.
  void validate() const;
  WaveguideConfig with_temperature(double t) const;
  WaveguideConfig with_theta(PropagationAngle a) const;
  WaveguideConfig with_length(double l) const;
};

struct PhaseMatchSolution {
  double theta_deg;
  double temperature_K;
  double lambda_p_nm;
  double lambda_s_nm;
  double lambda_i_nm;
  double residual_delta_k;  ///< rad/mm at the returned point
  double matched_index;     ///< n_o(λ_s), equal to n_e(θ; λ_p) at the root
};

struct SolverOptions {
  /// Pump search interval; defaults to [λ_min, λ_max / 2] of the material.
  std::optional<WavelengthRange> pump_search;
  /// Uniform samples used to bracket sign changes before refinement.
  int scan_samples = 2048;
  /// |mismatch| at or below this (index units) counts as an exact zero when bracketing.
  double zero_tolerance = 1e-14;
};

/// Δk = k_s + k_i − k_p with k = 2π n/λ, in rad/mm. The pump travels on the
/// extraordinary branch at θ, signal and idler on the ordinary branch.
/// Requires 1/λ_p = 1/λ_s + 1/λ_i to 1e-9 relative (ArgumentError otherwise).
double delta_k(const WaveguideConfig& config, double lambda_p_nm, double lambda_s_nm, double lambda_i_nm);

/// Degenerate pump wavelength at fixed θ and T where n_e(θ; λ_p) = n_o(2λ_p).
/// Throws NoCrossing (with the sign of the mismatch) or MultipleRoots.
PhaseMatchSolution solve_pm_wavelength(const WaveguideConfig& config, const SolverOptions& options = {});

/// Propagation angle matching the given pump wavelength degenerately. Eq. of the
/// index ellipsoid is monotone in θ, so there is at most one root on [0°, 90°].
PhaseMatchSolution solve_pm_angle(const WaveguideConfig& config, double lambda_p_nm);

struct TuningRate {
  double nm_per_K;           ///< d(2λ_p)/dT: first-harmonic / signal wavelength axis
  double lambda_fh_nm;       ///< 2λ_p at the configured temperature
  double second_difference;  ///< λ_FH(T+ΔT) − 2λ_FH(T) + λ_FH(T−ΔT), nm
  bool nonlinear;            ///< |second difference| above 10% of the slope over one step
};

/// Central finite difference of the phase-matched FH wavelength with temperature.
TuningRate tuning_rate(const WaveguideConfig& config, double step_K = 1.0, const SolverOptions& options = {});

struct ShgPoint {
  double lambda_nm;
  double efficiency;
};

struct ShgSpectrum {
  std::vector<ShgPoint> points;
  double peak_lambda_nm;
};

/// Normalized SHG efficiency sinc²(Δk L/2) over a grid of fundamental wavelengths.
ShgSpectrum shg_spectrum(const WaveguideConfig& config, std::span<const double> lambda_fh_nm,
                         const simd::Kernels& kernels = simd::active_kernels());

/// Normalizes sinc²(Δk L/2) for a precomputed mismatch curve (rad/mm).
ShgSpectrum shg_from_mismatch(std::span<const double> lambda_fh_nm, std::span<const double> delta_k_rad_per_mm,
                              double length_mm, const simd::Kernels& kernels = simd::active_kernels());

/// Inclusive grid min, min+step, ... up to max (last point clamped to max).
std::vector<double> wavelength_grid(double min_nm, double max_nm, double step_nm);

/// Full width at half maximum of the main lobe around the peak, by linear
/// interpolation of the half-maximum crossings. NaN when a side never drops below 1/2.
double main_lobe_fwhm(const ShgSpectrum& spectrum);

}  // namespace bpm
