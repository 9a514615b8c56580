#include "bpm/tags.hpp"

#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "bpm/error.hpp"

namespace bpm {

std::string_view to_string(Channel c) noexcept {
  switch (c) {
    case Channel::S: return "S";
    case Channel::I1: return "I1";
    case Channel::I2: return "I2";
  }
  return "?";
}

std::optional<Channel> parse_channel(std::string_view text) noexcept {
  for (Channel c : kChannels)
    if (text == to_string(c)) return c;
  return std::nullopt;
}

std::string to_string(ChannelSet set) {
  if (set == ChannelSet::idler()) return "I";
  std::string out;
  for (Channel c : kChannels)
    if (set.contains(c)) {
      if (!out.empty()) out += '+';
      out += to_string(c);
    }
  return out;
}

std::int64_t TagStream::duration_ps() const noexcept {
  return static_cast<std::int64_t>(std::llround(duration_s * 1e12));
}

void TagStream::validate() const {
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s))
    throw ContractViolation(fmt::format("tag stream duration {} s is not a finite non-negative value", duration_s));
  const std::int64_t end = duration_ps();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto t = events[i].timestamp_ps;
    if (t < 0 || t > end)
      throw ContractViolation(fmt::format("event {} at {} ps lies outside [0, {}] ps", i + 1, t, end));
    if (i > 0 && t < events[i - 1].timestamp_ps)
      throw ContractViolation(fmt::format("event {} at {} ps precedes the previous event", i + 1, t));
  }
}

std::array<std::uint64_t, 3> TagStream::channel_counts() const noexcept {
  std::array<std::uint64_t, 3> n{};
  for (const auto& e : events) ++n[index(e.channel)];
  return n;
}

std::uint64_t CoincidenceHistogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

}  // namespace bpm
