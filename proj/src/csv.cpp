#include "bct/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bct/error.hpp"

namespace bct::csv {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

std::vector<Row> read(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  std::vector<Row> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (trim(line).empty()) continue;
    Row row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.push_back(trim(std::string_view(line).substr(
          start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double to_double(const std::string& field) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InputError("not a number: '" + field + "'");
  return v;
}

long long to_int(const std::string& field) {
  long long v = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InputError("not an integer: '" + field + "'");
  return v;
}

std::string format(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace bct::csv
