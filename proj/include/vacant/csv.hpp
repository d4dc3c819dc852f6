#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace vacant {

inline constexpr const char* code_version = "1.0.0";

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  if (s == "NA") return std::nan("");
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), "not a number: " + s);
  return v;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void comment(const std::string& text) { os_ << "# " << text << '\n'; }

  void comment(const std::string& key, const std::string& value) { os_ << "# " << key << "=" << value << '\n'; }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;  // from "# key=value" lines
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }

  std::string meta_value(const std::string& key) const {
    for (const auto& [k, v] : meta)
      if (k == key) return v;
    return {};
  }
};

inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      if (auto eq = body.find('='); eq != std::string::npos)
        t.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (t.header.empty())
      t.header = split(line, ',');
    else
      t.rows.push_back(split(line, ','));
  }
  return t;
}

}  // namespace vacant
