#include "bpm/keyvalue.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bpm/error.hpp"

namespace bpm::kv {

namespace {

bool is_identifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

}  // namespace

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char delimiter) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(delimiter, start);
    parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

const Entry* Section::find(std::string_view key) const {
  for (const auto& e : entries_)
    if (e.key == key) return &e;
  return nullptr;
}

std::string Section::qualified(std::string_view key) const {
  return name_.empty() ? std::string(key) : fmt::format("{}.{}", name_, key);
}

const std::string& Section::text(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw ValidationError(qualified(key), "required key is missing");
  return e->value;
}

double Section::number(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw ValidationError(qualified(key), "required key is missing");
  const auto v = parse_number(e->value);
  if (!v) throw ParseError(fmt::format("{}: '{}' is not a number", qualified(key), e->value), e->line);
  return *v;
}

std::uint64_t Section::integer(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw ValidationError(qualified(key), "required key is missing");
  const auto s = trim(e->value);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(fmt::format("{}: '{}' is not a non-negative integer", qualified(key), e->value), e->line);
  return value;
}

std::vector<double> Section::numbers(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) throw ValidationError(qualified(key), "required key is missing");
  std::vector<double> out;
  for (auto part : split(e->value, ',')) {
    const auto v = parse_number(part);
    if (!v) throw ParseError(fmt::format("{}: '{}' is not a number", qualified(key), part), e->line);
    out.push_back(*v);
  }
  return out;
}

std::optional<std::string> Section::text_or(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return text(key);
}

std::optional<double> Section::number_or(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::optional<std::uint64_t> Section::integer_or(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return integer(key);
}

void Section::expect_only(std::initializer_list<std::string_view> allowed) const {
  for (const auto& e : entries_) {
    if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
      throw ParseError(fmt::format("unknown key '{}'", qualified(e.key)), e.line);
  }
}

void Section::add(Entry entry) {
  if (const Entry* prev = find(entry.key))
    throw ParseError(fmt::format("duplicate key '{}' (first defined on line {})", qualified(entry.key), prev->line),
                     entry.line);
  entries_.push_back(std::move(entry));
}

Document Document::parse(std::string_view text) {
  Document doc;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::string pending;
  std::size_t pending_line = 0;

  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    auto line = trim(raw);
    if (pending.empty() && (line.empty() || line.front() == '#' || line.front() == ';')) continue;

    if (!line.empty() && line.back() == '\\') {
      if (pending.empty()) pending_line = line_no;
      pending.append(line.substr(0, line.size() - 1));
      pending.push_back(' ');
      continue;
    }
    std::size_t entry_line = line_no;
    std::string joined;
    if (!pending.empty()) {
      if (line.empty()) throw ParseError("line continuation into a blank line", pending_line);
      joined = std::move(pending);
      joined.append(line);
      pending.clear();
      line = trim(joined);
      entry_line = pending_line;
    }

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", entry_line);
      auto name = trim(line.substr(1, line.size() - 2));
      if (!is_identifier(name)) throw ParseError(fmt::format("invalid section name '{}'", name), entry_line);
      if (doc.section(name)) throw ParseError(fmt::format("duplicate section [{}]", name), entry_line);
      doc.sections_.emplace_back(std::string(name), entry_line);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", entry_line);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!is_identifier(key)) throw ParseError(fmt::format("invalid key '{}'", key), entry_line);
    if (value.empty()) throw ParseError(fmt::format("key '{}' has an empty value", key), entry_line);
    doc.sections_.back().add(Entry{std::string(key), std::string(value), entry_line});
  }
  if (!pending.empty()) throw ParseError("line continuation at end of file", pending_line);
  return doc;
}

Document Document::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse(buffer.str());
  } catch (const ParseError& e) {
    throw e.prefixed(path.string());
  }
}

const Section* Document::section(std::string_view name) const {
  for (std::size_t i = 1; i < sections_.size(); ++i)
    if (sections_[i].name() == name) return &sections_[i];
  return nullptr;
}

const Section& Document::section_or_empty(std::string_view name) const {
  static const Section empty;
  const Section* s = section(name);
  return s ? *s : empty;
}

void Document::expect_sections(std::initializer_list<std::string_view> allowed) const {
  for (std::size_t i = 1; i < sections_.size(); ++i) {
    if (std::find(allowed.begin(), allowed.end(), sections_[i].name()) == allowed.end())
      throw ParseError(fmt::format("unknown section [{}]", sections_[i].name()), sections_[i].line());
  }
}

}  // namespace bpm::kv
