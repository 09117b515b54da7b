#pragma once

#include <string>
#include <string_view>

namespace sdgp {

/// First line of every CSV the library writes.
inline constexpr std::string_view kCsvSchemaLine = "#schema=sdgp.v1";

/// Shortest round-trip decimal form of a double ("nan", "inf", "-inf" for
/// non-finite values).
std::string format_double(double v);

/// Writes the whole file or throws IoError.
void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace sdgp
