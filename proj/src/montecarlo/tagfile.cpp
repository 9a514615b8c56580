#include <charconv>
#include <cmath>

#include <fmt/core.h>
#include <fmt/format.h>

#include "bpm/error.hpp"
#include "bpm/io.hpp"
#include "bpm/keyvalue.hpp"
#include "bpm/montecarlo.hpp"

namespace bpm {

namespace {

constexpr std::string_view kHeaderPrefix = "# tagstream v1 duration_s=";

}  // namespace

std::string format_tags(const TagStream& stream) {
  stream.validate();
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "{}{:.17g}\n", kHeaderPrefix, stream.duration_s);
  for (const auto& e : stream.events) fmt::format_to(std::back_inserter(out), "{},{}\n", to_string(e.channel), e.timestamp_ps);
  return fmt::to_string(out);
}

TagStream parse_tags(std::string_view text, std::string origin) {
  TagStream s;
  s.provenance = std::move(origin);
  std::size_t line_no = 0;
  bool header = false;
  std::int64_t end_ps = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (!header) {
      if (!line.starts_with(kHeaderPrefix))
        throw ParseError("expected header '# tagstream v1 duration_s=<seconds>'", line_no);
      const auto parsed = kv::parse_number(line.substr(kHeaderPrefix.size()));
      if (!parsed) throw ParseError("invalid duration in header", line_no);
      const double d = *parsed;
      if (!(d >= 0.0) || !std::isfinite(d)) throw ParseError("duration must be finite and non-negative", line_no);
      s.duration_s = d;
      end_ps = s.duration_ps();
      header = true;
      continue;
    }
    if (line.empty()) {
      if (text.empty()) break;
      throw ParseError("empty line inside tag data", line_no);
    }

    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError("expected 'channel,timestamp_ps'", line_no);
    const auto channel = parse_channel(line.substr(0, comma));
    if (!channel) throw ParseError(fmt::format("unknown channel '{}'", line.substr(0, comma)), line_no);
    const auto digits = line.substr(comma + 1);
    std::int64_t t = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty())
      throw ParseError(fmt::format("invalid timestamp '{}'", digits), line_no);
    if (t < 0 || t > end_ps) throw ParseError(fmt::format("timestamp {} ps outside [0, {}] ps", t, end_ps), line_no);
    if (!s.events.empty() && t < s.events.back().timestamp_ps)
      throw ParseError(fmt::format("timestamp {} ps decreases", t), line_no);
    s.events.push_back({t, *channel});
  }
  if (!header) throw ParseError("missing tagstream header", 1);
  return s;
}

void write_tags(const TagStream& stream, const std::filesystem::path& path) {
  write_file_atomic(path, format_tags(stream));
}

TagStream read_tags(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_tags(text, "file:" + path.string());
  } catch (const ParseError& e) {
    throw e.prefixed(path.string());
  }
}

}  // namespace bpm
