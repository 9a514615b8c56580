#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "bpm/error.hpp"
#include "bpm/montecarlo.hpp"

namespace bpm {

namespace {

struct Tag {
  std::int64_t t;
  std::size_t index;
};

std::vector<Tag> select(const TagStream& s, ChannelSet set) {
  std::vector<Tag> out;
  for (std::size_t i = 0; i < s.events.size(); ++i)
    if (set.contains(s.events[i].channel)) out.push_back({s.events[i].timestamp_ps, i});
  return out;
}

std::vector<std::int64_t> times_of(const TagStream& s, Channel c) {
  std::vector<std::int64_t> out;
  for (const auto& e : s.events)
    if (e.channel == c) out.push_back(e.timestamp_ps);
  return out;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && (a < 0) != (b < 0)) ? q - 1 : q;
}

void require_sorted(const TagStream& s) {
  const auto it = std::adjacent_find(s.events.begin(), s.events.end(),
                                     [](const TagEvent& a, const TagEvent& b) { return b.timestamp_ps < a.timestamp_ps; });
  if (it != s.events.end())
    throw ContractViolation(fmt::format("tag stream not time-ordered at event {}", it - s.events.begin() + 1));
}

}  // namespace

CoincidenceHistogram coincidence_histogram(const TagStream& stream, ChannelSet a, ChannelSet b, double bin_width_s,
                                           double span_s) {
  require_sorted(stream);
  if (a.empty() || b.empty()) throw ArgumentError("histogram channel sets must not be empty");
  if (!(bin_width_s > 0.0)) throw ArgumentError("bin width must be positive");
  if (!(span_s >= 0.0)) throw ArgumentError("histogram span must be non-negative");
  const std::int64_t w = seconds_to_ps(bin_width_s);
  if (w <= 0) throw ArgumentError("bin width must be at least 1 ps");
  const double k = std::round(span_s / bin_width_s);
  if (k > 5e6) throw ResourceError("histogram would exceed 1e7 bins");

  CoincidenceHistogram h;
  h.bin_width_ps = w;
  h.half_bins = static_cast<int>(k);
  h.a = a;
  h.b = b;
  h.duration_s = stream.duration_s;
  h.counts.assign(2 * static_cast<std::size_t>(h.half_bins) + 1, 0);

  const auto ta = select(stream, a);
  const auto tb = select(stream, b);
  // Delay Δ lands in bin floor((2Δ + w) / 2w); keep 2Δ inside ±(2K + 1)w.
  const std::int64_t reach2 = (2 * static_cast<std::int64_t>(h.half_bins) + 1) * w;
  std::size_t lo = 0;
  for (const Tag& x : ta) {
    while (lo < tb.size() && 2 * (x.t - tb[lo].t) > reach2) ++lo;
    for (std::size_t j = lo; j < tb.size() && 2 * (tb[j].t - x.t) < reach2; ++j) {
      if (tb[j].index == x.index) continue;
      const std::int64_t d2 = 2 * (tb[j].t - x.t);
      if (d2 < -reach2) continue;
      const std::int64_t bin = floor_div(d2 + w, 2 * w);
      ++h.counts[static_cast<std::size_t>(bin + h.half_bins)];
    }
  }
  return h;
}

TripleCounts triple_coincidences(const TagStream& stream, double window_s) {
  require_sorted(stream);
  if (!(window_s > 0.0)) throw ArgumentError("coincidence window must be positive");
  const std::int64_t tau = seconds_to_ps(window_s);

  const auto s = times_of(stream, Channel::S);
  const auto i1 = times_of(stream, Channel::I1);
  const auto i2 = times_of(stream, Channel::I2);
  TripleCounts c;
  c.n_s = s.size();
  c.n_i1 = i1.size();
  c.n_i2 = i2.size();

  std::size_t l1 = 0, l2 = 0;
  const auto hit = [tau](const std::vector<std::int64_t>& v, std::size_t& lo, std::int64_t t) {
    while (lo < v.size() && 2 * (t - v[lo]) > tau) ++lo;
    return lo < v.size() && 2 * (v[lo] - t) <= tau;
  };
  for (std::int64_t t : s) {
    const bool h1 = hit(i1, l1, t);
    const bool h2 = hit(i2, l2, t);
    c.n_si += h1 || h2;
    c.n_si1 += h1;
    c.n_si2 += h2;
    c.n_si1i2 += h1 && h2;
  }
  return c;
}

TripleCounts& operator+=(TripleCounts& a, const TripleCounts& b) {
  a.n_s += b.n_s;
  a.n_i1 += b.n_i1;
  a.n_i2 += b.n_i2;
  a.n_si += b.n_si;
  a.n_si1 += b.n_si1;
  a.n_si2 += b.n_si2;
  a.n_si1i2 += b.n_si1i2;
  return a;
}

CountRates rates_from_counts(const TripleCounts& n, double duration_s, double window_s, bool subtract_accidentals) {
  if (!(duration_s > 0.0)) throw ArgumentError("duration must be positive");
  const auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  const auto two_fold = [&](std::uint64_t coincidences, double partner_singles) {
    double v = d(coincidences);
    if (subtract_accidentals) v = std::max(0.0, v - d(n.n_s) * partner_singles * window_s / duration_s);
    return v / duration_s;
  };
  CountRates r;
  r.C_s = d(n.n_s) / duration_s;
  r.C_i = d(n.n_i1 + n.n_i2) / duration_s;
  r.C_si = two_fold(n.n_si, d(n.n_i1 + n.n_i2));
  r.C_si1 = two_fold(n.n_si1, d(n.n_i1));
  r.C_si2 = two_fold(n.n_si2, d(n.n_i2));
  r.C_si1i2 = d(n.n_si1i2) / duration_s;
  r.duration_s = duration_s;
  r.window_s = window_s;
  return r;
}

StreamAnalysis analyze_stream(const TagStream& stream, const AnalysisOptions& options) {
  stream.validate();
  StreamAnalysis a;
  a.counts = triple_coincidences(stream, options.window_s);
  a.rates = rates_from_counts(a.counts, stream.duration_s, options.window_s, options.subtract_accidentals);
  const double bin = options.histogram_bin_s > 0.0 ? options.histogram_bin_s : options.window_s;
  a.histogram = coincidence_histogram(stream, Channel::S, ChannelSet::idler(), bin, options.histogram_span_s);
  BaselinePolicy baseline = options.baseline;
  if (baseline.exclusion_half_width_s == 0.0) baseline.exclusion_half_width_s = 5.0 * options.window_s;
  try {
    a.car = car_from_histogram(a.histogram, baseline);
  } catch (const UndefinedEstimate&) {
    a.car.reset();
  }
  return a;
}

}  // namespace bpm
