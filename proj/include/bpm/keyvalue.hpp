#pragma once

// Sectioned key-value text shared by material files and run configs.
//
//   # comment                      (also ';'; blank lines ignored)
//   key = value                    (top-level section, name "")
//   [section]
//   key = value
//   long = 1, 2, 3, \              (trailing backslash continues the line)
//          4, 5
//
// Keys and section names are [A-Za-z0-9_]+. A key may appear once per section,
// a section name once per document.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bpm::kv {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

class Section {
public:
  Section() = default;
  Section(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

  const std::string& name() const noexcept { return name_; }
  std::size_t line() const noexcept { return line_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  const Entry* find(std::string_view key) const;
  bool has(std::string_view key) const { return find(key) != nullptr; }

  // Required accessors throw ValidationError naming "section.key" when absent
  // and ParseError carrying the line number when the value is malformed.
  const std::string& text(std::string_view key) const;
  double number(std::string_view key) const;
  std::uint64_t integer(std::string_view key) const;
  std::vector<double> numbers(std::string_view key) const;

  std::optional<std::string> text_or(std::string_view key) const;
  std::optional<double> number_or(std::string_view key) const;
  std::optional<std::uint64_t> integer_or(std::string_view key) const;

  /// Rejects keys outside `allowed` so misspelt configuration fails loudly.
  void expect_only(std::initializer_list<std::string_view> allowed) const;

  void add(Entry entry);

private:
  std::string qualified(std::string_view key) const;

  std::string name_;
  std::size_t line_ = 0;
  std::vector<Entry> entries_;
};

class Document {
public:
  static Document parse(std::string_view text);
  /// Reads and parses a file; a missing file raises bpm::Error naming the path.
  static Document load(const std::filesystem::path& path);

  const Section& root() const noexcept { return sections_.front(); }
  const Section* section(std::string_view name) const;
  /// Named section or an empty placeholder when the section is absent.
  const Section& section_or_empty(std::string_view name) const;
  const std::vector<Section>& sections() const noexcept { return sections_; }

  void expect_sections(std::initializer_list<std::string_view> allowed) const;

private:
  std::vector<Section> sections_{Section{}};
};

/// Parses a real number with the full-string rule; nullopt on junk.
std::optional<double> parse_number(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char delimiter);

}  // namespace bpm::kv
