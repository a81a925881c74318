#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace mf::io {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// format_double, or an empty field when absent.
std::string format_optional(const std::optional<double>& value);

/// Quotes a CSV field when it contains a separator, quote or newline.
std::string csv_field(std::string_view text);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace mf::io
