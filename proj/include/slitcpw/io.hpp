#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace slitcpw {

/// Shortest round-trip-safe decimal text for `value` ("%.17g" trimmed to
/// the fewest digits that parse back identically).
std::string format_number(double value);

/// Two numeric columns with the exact header `header_a,header_b`.
struct Columns {
  std::vector<double> a;
  std::vector<double> b;
};

Columns read_two_column_csv(const std::filesystem::path& path, const std::string& header_a,
                            const std::string& header_b);
Columns parse_two_column_csv(const std::string& text, const std::string& header_a,
                             const std::string& header_b);
std::string format_two_column_csv(const std::string& header_a, const std::string& header_b,
                                  const std::vector<double>& a, const std::vector<double>& b);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace slitcpw
