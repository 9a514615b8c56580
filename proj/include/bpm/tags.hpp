#pragma once

// Time-tag data shared by the simulator, the coincidence analysis and the
// estimators: detector channels, tag streams and delay histograms.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bpm {

/// Detectors of the heralded-source setup: signal arm and the two outputs of
/// the idler-arm Hanbury Brown–Twiss splitter.
enum class Channel : std::uint8_t { S = 0, I1 = 1, I2 = 2 };

inline constexpr std::array<Channel, 3> kChannels{Channel::S, Channel::I1, Channel::I2};

constexpr std::size_t index(Channel c) noexcept { return static_cast<std::size_t>(c); }
std::string_view to_string(Channel c) noexcept;
std::optional<Channel> parse_channel(std::string_view text) noexcept;

/// Set of channels treated as one detector (e.g. I = I1 ∪ I2).
class ChannelSet {
public:
  constexpr ChannelSet() = default;
  constexpr ChannelSet(Channel c) noexcept : mask_(static_cast<std::uint8_t>(1u << index(c))) {}
  static constexpr ChannelSet idler() noexcept { return ChannelSet(Channel::I1) | ChannelSet(Channel::I2); }

  constexpr bool contains(Channel c) const noexcept { return (mask_ >> index(c)) & 1u; }
  constexpr bool empty() const noexcept { return mask_ == 0; }
  constexpr std::uint8_t mask() const noexcept { return mask_; }
  friend constexpr ChannelSet operator|(ChannelSet a, ChannelSet b) noexcept {
    ChannelSet r;
    r.mask_ = a.mask_ | b.mask_;
    return r;
  }
  friend constexpr bool operator==(ChannelSet, ChannelSet) = default;

private:
  std::uint8_t mask_ = 0;
};

std::string to_string(ChannelSet set);

struct TagEvent {
  std::int64_t timestamp_ps;
  Channel channel;

  friend auto operator<=>(const TagEvent&, const TagEvent&) = default;
};

struct TagStream {
  std::vector<TagEvent> events;
  double duration_s = 0.0;
  std::string provenance;

  /// Throws ContractViolation if timestamps decrease or leave [0, duration].
  void validate() const;
  std::array<std::uint64_t, 3> channel_counts() const noexcept;
  std::int64_t duration_ps() const noexcept;
};

/// Counts of (a, b) event pairs by delay t_b − t_a. Bin k (−K ≤ k ≤ K) is centred
/// on k·w and covers [(k − ½)w, (k + ½)w).
struct CoincidenceHistogram {
  std::int64_t bin_width_ps = 0;
  int half_bins = 0;
  ChannelSet a;
  ChannelSet b;
  std::vector<std::uint64_t> counts;  ///< 2K + 1 entries, index k + K
  double duration_s = 0.0;

  double bin_width_s() const noexcept { return static_cast<double>(bin_width_ps) * 1e-12; }
  std::int64_t center_ps(std::size_t i) const noexcept {
    return (static_cast<std::int64_t>(i) - half_bins) * bin_width_ps;
  }
  std::uint64_t total() const noexcept;
};

}  // namespace bpm
