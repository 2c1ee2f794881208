#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "inarlab/errors.hpp"
#include "inarlab/model.hpp"

namespace inarlab {

/// FNV-1a 64-bit hash of a byte string.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::csv_parse, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

/// Checksum tag recorded in run manifests: "fnv1a64:<16 hex digits>".
inline std::string file_checksum(const std::string& path) {
  const std::uint64_t h = fnv1a64(read_file_bytes(path));
  static const char* hexd = "0123456789abcdef";
  std::string hex(16, '0');
  for (int i = 0; i < 16; ++i) hex[static_cast<std::size_t>(15 - i)] = hexd[(h >> (4 * i)) & 0xF];
  return "fnv1a64:" + hex;
}

/// Parses a count series from CSV text: one nonnegative integer per line,
/// optional single header cell "x", UTF-8 with optional BOM, LF or CRLF.
/// Rejects negatives and non-integers, reporting the offending line number.
inline CountSeries parse_count_csv(std::istream& in, const std::string& source_name) {
  std::vector<int> values;
  std::string line;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
      line.erase(0, 3);
    if (first) {
      first = false;
      if (line == "x") continue;
    }
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;  // trailing newline
    std::size_t pos = 0;
    long long parsed = 0;
    bool ok = true;
    try {
      parsed = std::stoll(line, &pos);
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok || pos != line.size())
      fail(Errc::csv_parse, source_name + ":" + std::to_string(line_no) +
                                ": expected a nonnegative integer, got '" + line + "'");
    if (parsed < 0)
      fail(Errc::csv_parse,
           source_name + ":" + std::to_string(line_no) + ": negative count " + line);
    if (parsed > std::numeric_limits<int>::max())
      fail(Errc::csv_parse, source_name + ":" + std::to_string(line_no) + ": count too large");
    values.push_back(static_cast<int>(parsed));
  }
  if (values.empty()) fail(Errc::csv_parse, source_name + ": no data lines");
  return CountSeries(std::move(values));
}

inline CountSeries read_count_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::csv_parse, "cannot open '" + path + "'");
  return parse_count_csv(in, path);
}

/// Writes the series with the single-cell header "x", one value per line, LF.
inline void write_count_csv(std::ostream& out, const CountSeries& series) {
  out << "x\n";
  for (int x : series.values()) out << x << "\n";
}

inline void write_count_csv(const std::string& path, const CountSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::invalid_argument, "cannot write '" + path + "'");
  write_count_csv(out, series);
}

}  // namespace inarlab
