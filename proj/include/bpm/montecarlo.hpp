#pragma once

// Event-level simulation of the heralded-source experiment and the coincidence
// analysis of the resulting time-tag streams.
//
// Coincidence window convention: events a and b coincide when |t_b − t_a| ≤ τ/2,
// i.e. a centred window of total width τ. In integer picoseconds this is tested
// as 2|Δt| ≤ τ_ps, so both edges are inclusive.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bpm/photonstats.hpp"
#include "bpm/tags.hpp"

namespace bpm {

struct GenerateOptions {
  /// Worker threads; 0 uses the hardware concurrency. Output does not depend on it.
  unsigned threads = 1;
};

struct GenerationStats {
  std::uint64_t pairs = 0;
  std::uint64_t photons_signal_arm = 0;
  std::uint64_t photons_idler_arm = 0;
  std::array<std::uint64_t, 3> pair_detections{};  ///< surviving pair photons per detector, before jitter cuts
  std::array<std::uint64_t, 3> dark_counts{};
  std::uint64_t dropped_outside_duration = 0;
  std::uint64_t dropped_dead_time = 0;
};

struct Simulation {
  TagStream stream;
  GenerationStats stats;
};

/// Expected number of emitted events; generate_tags refuses models above max_events.
double expected_event_count(const SourceModel& model);

/// Poisson pair emission, per-photon routing and loss, Gaussian jitter and
/// Poisson dark counts, merged into one stream sorted by (timestamp, channel).
/// Deterministic in the model (seed included). Throws ResourceError when the
/// expected event count exceeds model.max_events, before allocating.
Simulation generate_tags(const SourceModel& model, const GenerateOptions& options = {});

std::int64_t seconds_to_ps(double seconds);

/// Histogram of t_b − t_a with 2K + 1 bins of width bin_width, K = round(span / bin_width).
/// Sweeps both sorted event lists once. Throws ContractViolation on an unsorted stream.
CoincidenceHistogram coincidence_histogram(const TagStream& stream, ChannelSet a, ChannelSet b, double bin_width_s,
                                           double span_s);

struct TripleCounts {
  std::uint64_t n_s = 0;
  std::uint64_t n_i1 = 0;
  std::uint64_t n_i2 = 0;
  std::uint64_t n_si = 0;      ///< S events with an I1 or I2 event in the window
  std::uint64_t n_si1 = 0;     ///< S events with an I1 event in the window
  std::uint64_t n_si2 = 0;     ///< S events with an I2 event in the window
  std::uint64_t n_si1i2 = 0;   ///< S events with both an I1 and an I2 event in the window
};

/// Single pass over the stream counting window coincidences relative to S events.
TripleCounts triple_coincidences(const TagStream& stream, double window_s);

struct AnalysisOptions {
  double window_s = 1e-9;
  /// Half-span of the S–I delay histogram.
  double histogram_span_s = 100e-9;
  /// Histogram bin width; 0 uses the coincidence window.
  double histogram_bin_s = 0.0;
  /// Baseline exclusion; 0 uses 5 coincidence windows.
  BaselinePolicy baseline{};
  /// Subtract the singles-product estimate N_s·N_x·τ/T from two-fold counts.
  bool subtract_accidentals = true;
};

struct StreamAnalysis {
  TripleCounts counts;
  CountRates rates;
  CoincidenceHistogram histogram;  ///< S against I = I1 ∪ I2
  std::optional<CarEstimate> car;  ///< empty when the histogram has no counts
};

StreamAnalysis analyze_stream(const TagStream& stream, const AnalysisOptions& options = {});

/// Sums per-run counts and durations (independent runs of the same source).
TripleCounts& operator+=(TripleCounts& a, const TripleCounts& b);
CountRates rates_from_counts(const TripleCounts& counts, double duration_s, double window_s,
                             bool subtract_accidentals = true);

/// Tag-file text: `# tagstream v1 duration_s=<float>` then `channel,timestamp_ps` lines.
std::string format_tags(const TagStream& stream);
TagStream parse_tags(std::string_view text, std::string origin = "text");
void write_tags(const TagStream& stream, const std::filesystem::path& path);
TagStream read_tags(const std::filesystem::path& path);

}  // namespace bpm
