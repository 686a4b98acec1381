#pragma once

#include <string>
#include <string_view>

namespace specsyn {

/// Whole file as bytes. Throws IoError.
std::string read_text_file(const std::string& path);

/// Writes `content` to a sibling temp file and renames it over `path`, so
/// readers never observe a partial file. Throws IoError.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace specsyn
