#pragma once

#include <string>
#include <string_view>

namespace mktent {

/// Throws Error(Io) when the file cannot be read.
std::string read_file(const std::string& path);

/// Writes through a temporary sibling and renames it into place, so readers
/// never observe a partial file.
void write_file_atomic(const std::string& path, std::string_view contents);

}  // namespace mktent
