#include "bpm/photonstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "bpm/error.hpp"

namespace bpm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

void require_fraction(double v, const char* name, bool allow_zero) {
  if (!std::isfinite(v) || v > 1.0 || (allow_zero ? v < 0.0 : v <= 0.0))
    throw ArgumentError(fmt::format("{} must lie in {}0, 1], got {}", name, allow_zero ? "[" : "(", v));
}

void require_ratio(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw ArgumentError(fmt::format("{} must lie in (0, 1), got {}", name, v));
}

double transmittance(double dB) { return std::pow(10.0, -dB / 10.0); }

}  // namespace

void CountRates::validate() const {
  const std::pair<const char*, double> fields[] = {{"C_s", C_s},     {"C_i", C_i},     {"C_si", C_si},
                                                   {"C_si1", C_si1}, {"C_si2", C_si2}, {"C_si1i2", C_si1i2}};
  for (const auto& [name, v] : fields)
    if (!finite_nonnegative(v)) throw ArgumentError(fmt::format("{} must be a non-negative rate, got {}", name, v));
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ArgumentError("duration must be positive");
  if (!(window_s > 0.0) || !std::isfinite(window_s)) throw ArgumentError("coincidence window must be positive");
  if (C_si > std::min(C_s, C_i))
    throw InconsistentCounts(fmt::format("C_si = {} exceeds min(C_s, C_i) = {}", C_si, std::min(C_s, C_i)));
}

void LossBudget::validate() const {
  for (double dB : {on_chip_dB, off_chip_signal_dB, off_chip_idler_dB})
    if (!finite_nonnegative(dB)) throw ArgumentError(fmt::format("loss must be a non-negative dB value, got {}", dB));
  for (double e : eta_d) require_fraction(e, "detector efficiency", false);
}

double LossBudget::detection_probability(Channel c) const noexcept {
  const double arm = c == Channel::S ? signal_dB() : idler_dB();
  return transmittance(arm) * eta_d[index(c)];
}

void SourceModel::validate() const {
  if (!finite_nonnegative(pair_rate_Hz)) throw ArgumentError("pair rate must be non-negative");
  loss.validate();
  require_ratio(splitter_ratio, "splitter_ratio");
  require_ratio(pair_splitter_ratio, "pair_splitter_ratio");
  for (Channel c : kChannels) {
    const auto i = index(c);
    if (!finite_nonnegative(jitter_sigma_s[i])) throw ArgumentError("jitter must be non-negative");
    if (!finite_nonnegative(dark_rate_Hz[i])) throw ArgumentError("dark rate must be non-negative");
    if (!finite_nonnegative(dead_time_s[i])) throw ArgumentError("dead time must be non-negative");
  }
  if (!(window_s > 0.0) || !std::isfinite(window_s)) throw ArgumentError("coincidence window must be positive");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ArgumentError("duration must be positive");
}

double SourceModel::pair_rate_from_pump(double brightness_Hz_per_mW, double pump_mW) {
  if (!finite_nonnegative(brightness_Hz_per_mW) || !finite_nonnegative(pump_mW))
    throw ArgumentError("brightness and pump power must be non-negative");
  return brightness_Hz_per_mW * pump_mW;
}

double SourceModel::photon_detection_probability(Channel c) const noexcept {
  const double route = c == Channel::S    ? pair_splitter_ratio
                       : c == Channel::I1 ? (1.0 - pair_splitter_ratio) * splitter_ratio
                                          : (1.0 - pair_splitter_ratio) * (1.0 - splitter_ratio);
  return route * loss.detection_probability(c);
}

ExpectedRates analytic_forward(const SourceModel& model) {
  model.validate();
  const double mu = model.pair_rate_Hz;
  const double tau = model.window_s;
  const double p_s = model.photon_detection_probability(Channel::S);
  const double q1 = model.photon_detection_probability(Channel::I1);
  const double q2 = model.photon_detection_probability(Channel::I2);

  ExpectedRates out{};
  // Two photons per pair, each routed and detected independently.
  out.singles_Hz = {2.0 * mu * p_s + model.dark_rate_Hz[0], 2.0 * mu * q1 + model.dark_rate_Hz[1],
                    2.0 * mu * q2 + model.dark_rate_Hz[2]};
  const double c_s = out.singles_Hz[0], c_1 = out.singles_Hz[1], c_2 = out.singles_Hz[2];
  const double c_i = c_1 + c_2;

  CountRates& r = out.rates;
  r.C_s = c_s;
  r.C_i = c_i;
  r.C_si1 = 2.0 * mu * p_s * q1;
  r.C_si2 = 2.0 * mu * p_s * q2;
  r.C_si = r.C_si1 + r.C_si2;
  // Leading order: one correlated pair plus one uncorrelated event, or three uncorrelated events.
  r.C_si1i2 = 2.0 * mu * tau * (p_s * q1 * c_2 + p_s * q2 * c_1 + q1 * q2 * c_s) + c_s * c_1 * c_2 * tau * tau;
  r.duration_s = model.duration_s;
  r.window_s = tau;

  out.accidental_si_Hz = c_s * c_i * tau;
  out.accidental_si1_Hz = c_s * c_1 * tau;
  out.accidental_si2_Hz = c_s * c_2 * tau;
  out.car = out.accidental_si_Hz > 0.0 ? r.C_si / out.accidental_si_Hz : kNaN;
  out.pgr = r.C_si > 0.0 ? pgr(r, model.pair_splitter_ratio).value : kNaN;
  out.g2h_zero = r.C_si1 > 0.0 && r.C_si2 > 0.0 ? g2h_zero(r, model.splitter_ratio).value : kNaN;
  return out;
}

double splitter_factor(double ratio) {
  require_ratio(ratio, "splitting ratio");
  return 1.0 / (2.0 * ratio * (1.0 - ratio));
}

Estimate pgr(const CountRates& c, double splitter_ratio) {
  c.validate();
  const double f = splitter_factor(splitter_ratio);
  if (c.C_si == 0.0) throw UndefinedEstimate("PGR undefined: no coincidences");
  const double value = c.C_s * c.C_i / (f * c.C_si);
  const double rel2 = 1.0 / c.counts(c.C_s) + 1.0 / c.counts(c.C_i) + 1.0 / c.counts(c.C_si);
  return {value, value * std::sqrt(rel2)};
}

CarEstimate car_from_histogram(const CoincidenceHistogram& h, const BaselinePolicy& policy) {
  if (h.bin_width_ps <= 0 || h.counts.size() != static_cast<std::size_t>(2 * h.half_bins + 1))
    throw ArgumentError("malformed coincidence histogram");
  if (!(policy.exclusion_half_width_s >= 0.0)) throw ArgumentError("baseline exclusion must be non-negative");
  const double exclusion_ps =
      policy.exclusion_half_width_s > 0.0 ? policy.exclusion_half_width_s * 1e12 : 5.0 * h.bin_width_ps;

  std::uint64_t peak = 0;
  std::uint64_t baseline_sum = 0;
  std::size_t baseline_bins = 0;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    peak = std::max(peak, h.counts[i]);
    if (std::abs(static_cast<double>(h.center_ps(i))) > exclusion_ps) {
      baseline_sum += h.counts[i];
      ++baseline_bins;
    }
  }
  if (baseline_bins == h.counts.size()) throw ArgumentError("histogram has no bins inside the exclusion zone");
  if (baseline_bins < 10)
    throw ArgumentError(fmt::format("histogram has {} baseline bins, at least 10 needed", baseline_bins));
  if (peak == 0) throw UndefinedEstimate("CAR undefined: histogram is empty");

  const bool lower_bound = baseline_sum == 0;
  const double effective_sum = lower_bound ? 1.0 : static_cast<double>(baseline_sum);
  const double mean = effective_sum / static_cast<double>(baseline_bins);
  const double ratio = static_cast<double>(peak) / mean;
  const double sigma = ratio * std::sqrt(1.0 / static_cast<double>(peak) + 1.0 / effective_sum);
  return {ratio - 1.0, sigma, lower_bound, peak, lower_bound ? 0.0 : mean, baseline_bins};
}

double heralding_efficiency_from_loss(double loss_dB) {
  if (!finite_nonnegative(loss_dB))
    throw ArgumentError(fmt::format("loss must be a non-negative dB value, got {}", loss_dB));
  return transmittance(loss_dB);
}

Estimate heralding_efficiency_from_counts(const CountRates& c, double eta_d, HeraldedArm arm,
                                          double partner_routing) {
  c.validate();
  require_fraction(eta_d, "detector efficiency", false);
  require_fraction(partner_routing, "partner routing probability", false);
  const double herald = arm == HeraldedArm::idler ? c.C_s : c.C_i;
  if (herald == 0.0) throw UndefinedEstimate("heralding efficiency undefined: no herald counts");
  const double h = c.C_si / herald;
  const double scale = eta_d * partner_routing;
  const double value = h / scale;
  if (value > 1.0)
    throw InconsistentCounts(fmt::format("heralding efficiency {} exceeds one for detector efficiency {}", value,
                                         eta_d));
  return {value, std::sqrt(h * (1.0 - h) / c.counts(herald)) / scale};
}

Estimate g2h_zero(const CountRates& c, double splitter_ratio) {
  c.validate();
  const double f = splitter_factor(splitter_ratio);
  if (c.C_si1 == 0.0 || c.C_si2 == 0.0) throw UndefinedEstimate("g2_H(0) undefined: no heralded detections");
  const double n_s = c.counts(c.C_s);
  const double n_1 = c.counts(c.C_si1);
  const double n_2 = c.counts(c.C_si2);
  const double n_3 = c.counts(c.C_si1i2);
  const double value = n_3 * n_s / (f * n_1 * n_2);
  const double n_3_scale = n_3 > 0.0 ? n_3 : 1.0;
  const double scale = n_3_scale * n_s / (f * n_1 * n_2);
  return {value, scale * std::sqrt(1.0 / n_3_scale + 1.0 / n_s + 1.0 / n_1 + 1.0 / n_2)};
}

Estimate brightness_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ArgumentError("brightness fit needs at least two (power, rate) points");
  double spp = 0.0, spr = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [p, r] = points[i];
    if (!(p > 0.0) || !std::isfinite(p) || !std::isfinite(r))
      throw ArgumentError("pump powers must be positive and rates finite");
    for (std::size_t j = 0; j < i; ++j)
      if (points[j].first == p) throw ArgumentError("pump powers must be distinct");
    spp += p * p;
    spr += p * r;
  }
  const double slope = spr / spp;
  double ss = 0.0;
  for (const auto& [p, r] : points) ss += (r - slope * p) * (r - slope * p);
  const double s2 = ss / static_cast<double>(points.size() - 1);
  return {slope, std::sqrt(s2 / spp)};
}

SpdcMetrics compute_metrics(const CountRates& c, const std::optional<CarEstimate>& car,
                            const MetricOptions& options) {
  c.validate();
  const Estimate nan{kNaN, kNaN};
  const auto guarded = [&](auto&& f) -> Estimate {
    try {
      return f();
    } catch (const UndefinedEstimate&) {
      return nan;
    } catch (const InconsistentCounts&) {
      return nan;
    }
  };

  SpdcMetrics m{};
  m.pgr = guarded([&] { return pgr(c, options.pair_splitter_ratio); });
  m.brightness = nan;
  if (options.pump_mW && *options.pump_mW > 0.0)
    m.brightness = {m.pgr.value / *options.pump_mW, m.pgr.sigma / *options.pump_mW};
  m.car = car ? Estimate{car->car, car->sigma} : nan;
  m.car_lower_bound = car && car->lower_bound;
  m.eta_H_idler = guarded([&] {
    return heralding_efficiency_from_counts(c, options.eta_d_idler, HeraldedArm::idler,
                                            1.0 - options.pair_splitter_ratio);
  });
  m.eta_H_signal = guarded([&] {
    return heralding_efficiency_from_counts(c, options.eta_d_signal, HeraldedArm::signal,
                                            options.pair_splitter_ratio);
  });
  m.g2h_zero = guarded([&] { return g2h_zero(c, options.splitter_ratio); });
  m.purity = {1.0 - m.g2h_zero.value, m.g2h_zero.sigma};
  return m;
}

}  // namespace bpm
