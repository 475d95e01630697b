#include "slitcpw/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "slitcpw/errors.hpp"

namespace slitcpw {

std::string format_number(double value) {
  char buffer[40];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buffer, sizeof buffer, "%.*g", precision, value);
    if (std::strtod(buffer, nullptr) == value) break;
  }
  return buffer;
}

Columns parse_two_column_csv(const std::string& text, const std::string& header_a,
                             const std::string& header_b) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty CSV; expected header " + header_a + "," + header_b);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header_a + "," + header_b) {
    throw DomainError("unexpected CSV header '" + line + "'; expected " + header_a + "," + header_b);
  }
  Columns columns;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw DomainError("CSV line " + std::to_string(line_no) + ": expected two columns");
    }
    auto parse = [&](std::string_view field) {
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      double value = 0.0;
      const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || end != field.data() + field.size()) {
        throw DomainError("CSV line " + std::to_string(line_no) + ": bad number '" +
                          std::string(field) + "'");
      }
      return value;
    };
    const std::string_view view(line);
    columns.a.push_back(parse(view.substr(0, comma)));
    columns.b.push_back(parse(view.substr(comma + 1)));
  }
  return columns;
}

Columns read_two_column_csv(const std::filesystem::path& path, const std::string& header_a,
                            const std::string& header_b) {
  std::ifstream file(path);
  if (!file) throw DomainError("cannot open CSV file: " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_two_column_csv(buffer.str(), header_a, header_b);
}

std::string format_two_column_csv(const std::string& header_a, const std::string& header_b,
                                  const std::vector<double>& a, const std::vector<double>& b) {
  std::string out = header_a + "," + header_b + "\n";
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    out += format_number(a[i]) + "," + format_number(b[i]) + "\n";
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DomainError("cannot write file: " + path.string());
  file << contents;
}

}  // namespace slitcpw
