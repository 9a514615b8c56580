#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace bpm {

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace bpm
