#ifndef BOSONLAB_REPORT_IO_HPP
#define BOSONLAB_REPORT_IO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bosonlab/errors.hpp"

namespace bosonlab {

using nlohmann::json;

// fixed, locale-independent number rendering; +inf becomes the literal "inf"
inline std::string fmt_num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// JSON encoding of possibly-infinite values: {"finite": false} past the pole
inline json json_num(double v) {
  if (std::isfinite(v)) return json{{"finite", true}, {"value", v}};
  return json{{"finite", false}};
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path);
  os << body;
}

struct CsvWriter {
  std::string body;
  explicit CsvWriter(const std::vector<std::string>& header) {
    append_row(header);
  }
  void append_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body += ',';
      body += cells[i];
    }
    body += '\n';
  }
  void write(const std::string& path) const { write_text_file(path, body); }
};

// FNV-1a over a string, rendered as 16 hex digits
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bosonlab

#endif
