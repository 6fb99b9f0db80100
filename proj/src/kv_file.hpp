#pragma once

// Helpers shared by the line-oriented `key=value` file formats.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ltp/errors.hpp"
#include "ltp/number_format.hpp"

namespace ltp::detail {

inline std::string join(const std::vector<double>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_double(v[i]);
  }
  return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  if (s.empty()) return parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

class KeyValueReader {
 public:
  explicit KeyValueReader(const std::filesystem::path& file) : file_(file), in_(file) {
    if (!in_) throw IoError("cannot open " + file.string());
    std::string header;
    next_line(header);
    if (header != "format_version=1") {
      throw ParseError(file_.string(), line_, "expected format_version=1 header");
    }
  }

  bool next_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  /// Reads `key=value` lines until `stop_key` (inclusive) or EOF.
  std::map<std::string, std::string> read_until(const std::string& stop_key) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (next_line(line)) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected key=value");
      const std::string key = line.substr(0, eq);
      kv[key] = line.substr(eq + 1);
      if (key == stop_key) break;
    }
    return kv;
  }

  const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) fail("missing key '" + key + "'");
    return it->second;
  }

  double to_double(const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) fail("bad number '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad number '" + s + "'");
    }
  }

  std::uint64_t to_uint(const std::string& s) {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(s, &pos);
      if (pos != s.size()) fail("bad integer '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad integer '" + s + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) { throw ParseError(file_.string(), line_, what); }

 private:
  std::filesystem::path file_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

inline std::ofstream open_for_write(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  return out;
}

}  // namespace ltp::detail
