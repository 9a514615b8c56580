#pragma once

// Figures of merit of a heralded SPDC source computed from count rates:
// pair generation rate, coincidence-to-accidental ratio, heralding efficiency,
// heralded g²(0) and single-photon purity, each with a Poisson (delta-method)
// standard deviation. Also the closed-form forward model of expected rates.
//
// Setup convention: pair photons are separated by a 50:50 fiber beamsplitter
// (each photon independently reaches the signal arm with probability r), and
// the idler arm feeds a second splitter with ratio ρ onto detectors I1 and I2.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "bpm/tags.hpp"

namespace bpm {

struct Estimate {
  double value;
  double sigma;
};

/// Rates in Hz over `duration_s`; coincidences use the window |Δt| ≤ τ/2.
/// C_si, C_si1 and C_si2 are true (accidental-subtracted) coincidences,
/// C_si1i2 is the raw three-fold rate.
struct CountRates {
  double C_s = 0.0;
  double C_i = 0.0;
  double C_si = 0.0;
  double C_si1 = 0.0;
  double C_si2 = 0.0;
  double C_si1i2 = 0.0;
  double duration_s = 1.0;
  double window_s = 1e-9;

  /// Throws ArgumentError for negative or non-finite fields and
  /// InconsistentCounts when C_si exceeds min(C_s, C_i).
  void validate() const;
  double counts(double rate) const noexcept { return rate * duration_s; }
};

struct LossBudget {
  double on_chip_dB = 3.76;
  double off_chip_signal_dB = 4.82;
  double off_chip_idler_dB = 5.09;
  std::array<double, 3> eta_d{1.0, 1.0, 1.0};  ///< per detector, indexed by Channel

  void validate() const;
  double signal_dB() const noexcept { return on_chip_dB + off_chip_signal_dB; }
  double idler_dB() const noexcept { return on_chip_dB + off_chip_idler_dB; }
  /// Arm transmittance times detector efficiency for one detector.
  double detection_probability(Channel c) const noexcept;
};

/// Source and detection model shared by the analytic forward model and the
/// Monte Carlo generator.
struct SourceModel {
  double pair_rate_Hz = 0.0;
  LossBudget loss{};
  double splitter_ratio = 0.5;       ///< ρ: probability an idler-arm photon goes to I1
  double pair_splitter_ratio = 0.5;  ///< r: probability a pair photon enters the signal arm
  std::array<double, 3> jitter_sigma_s{50e-12, 50e-12, 50e-12};
  std::array<double, 3> dark_rate_Hz{100.0, 100.0, 100.0};
  std::array<double, 3> dead_time_s{0.0, 0.0, 0.0};
  double window_s = 1e-9;
  double duration_s = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t max_events = 100'000'000;

  void validate() const;
  static double pair_rate_from_pump(double brightness_Hz_per_mW, double pump_mW);
  /// Probability that one pair photon produces a detection on channel c.
  double photon_detection_probability(Channel c) const noexcept;
};

/// Expected rates of a SourceModel, jitter neglected (window ≫ jitter).
struct ExpectedRates {
  CountRates rates;                   ///< true coincidences, expected triples
  std::array<double, 3> singles_Hz;   ///< per detector, darks included
  double accidental_si_Hz;            ///< C_s·C_i·τ
  double accidental_si1_Hz;
  double accidental_si2_Hz;
  double car;                         ///< C_si / (C_s·C_i·τ)
  double pgr;                         ///< C_s·C_i / (2·C_si)
  double g2h_zero;                    ///< from expected triples and raw two-folds
};

ExpectedRates analytic_forward(const SourceModel& model);

/// 1/(2ρ(1−ρ)): the factor 2 of a 50:50 splitter, generalized to ratio ρ.
double splitter_factor(double ratio);

/// PGR = C_s·C_i / (f(ρ)·C_si). Throws UndefinedEstimate when C_si = 0.
Estimate pgr(const CountRates& c, double splitter_ratio = 0.5);

struct BaselinePolicy {
  /// Bins whose centre satisfies |t| > this are baseline; 0 selects 5 bin widths.
  double exclusion_half_width_s = 0.0;
};

struct CarEstimate {
  double car;
  double sigma;
  bool lower_bound;  ///< baseline was empty; car assumes one baseline count
  std::uint64_t peak_counts;
  double baseline_mean;
  std::size_t baseline_bins;
};

/// CAR = max bin / baseline mean − 1. Needs ≥ 1 non-baseline bin and ≥ 10
/// baseline bins (ArgumentError); an empty histogram is UndefinedEstimate.
CarEstimate car_from_histogram(const CoincidenceHistogram& h, const BaselinePolicy& policy = {});

/// 10^(−loss/10). Throws ArgumentError for negative or non-finite loss.
double heralding_efficiency_from_loss(double loss_dB);

enum class HeraldedArm { signal, idler };

/// Efficiency of `arm` heralded by the other: C_si / (C_herald·η_d·p), where p is
/// the probability that the herald's partner is routed to `arm` (1 when pair
/// photons are separated deterministically, 1 − r or r behind the pair splitter).
/// σ is binomial in the herald counts. Throws InconsistentCounts above one.
Estimate heralding_efficiency_from_counts(const CountRates& c, double eta_d, HeraldedArm arm = HeraldedArm::idler,
                                          double partner_routing = 1.0);

/// g²_H(0) = C_si1i2·C_s / (f(ρ)·C_si1·C_si2). Throws UndefinedEstimate when a
/// heralded two-fold is zero. With no triples the value is 0 and σ uses one count.
Estimate g2h_zero(const CountRates& c, double splitter_ratio = 0.5);

/// Least-squares slope through the origin of (pump mW, PGR Hz) points.
Estimate brightness_fit(std::span<const std::pair<double, double>> points);

struct MetricOptions {
  double eta_d_signal = 1.0;
  double eta_d_idler = 1.0;
  std::optional<double> pump_mW;
  double splitter_ratio = 0.5;
  double pair_splitter_ratio = 0.5;
};

/// Undefined estimates are reported as NaN rather than thrown.
struct SpdcMetrics {
  Estimate pgr;
  Estimate brightness;
  Estimate car;
  bool car_lower_bound;
  Estimate eta_H_signal;
  Estimate eta_H_idler;
  Estimate g2h_zero;
  Estimate purity;
};

SpdcMetrics compute_metrics(const CountRates& c, const std::optional<CarEstimate>& car,
                            const MetricOptions& options = {});

}  // namespace bpm
