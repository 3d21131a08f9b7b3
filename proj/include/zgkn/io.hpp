#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace zgkn::io {

/// 17 significant digits, locale independent. Non-finite values become null / nan.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Single-line JSON object with insertion-ordered fields.
class JsonLine {
 public:
  JsonLine& num(std::string_view key, double v) {
    return raw(key, std::isfinite(v) ? fmt(v) : std::string("null"));
  }
  JsonLine& integer(std::string_view key, long long v) { return raw(key, std::to_string(v)); }
  JsonLine& boolean(std::string_view key, bool v) { return raw(key, v ? "true" : "false"); }
  JsonLine& str(std::string_view key, std::string_view v) { return raw(key, nlohmann::json(std::string(v)).dump()); }
  JsonLine& nums(std::string_view key, const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + (std::isfinite(v[i]) ? fmt(v[i]) : "null");
    return raw(key, s + "]");
  }
  JsonLine& raw(std::string_view key, const std::string& value) {
    body_ += body_.empty() ? "" : ",";
    body_ += nlohmann::json(std::string(key)).dump() + ":" + value;
    return *this;
  }
  std::string str() const { return "{" + body_ + "}"; }

 private:
  std::string body_;
};

/// Row cell: number or text.
struct Cell {
  std::string text;
  Cell(double v) : text(fmt(v)) {}
  Cell(int v) : text(std::to_string(v)) {}
  Cell(long long v) : text(std::to_string(v)) {}
  Cell(std::size_t v) : text(std::to_string(v)) {}
  Cell(bool v) : text(v ? "true" : "false") {}
  Cell(const char* s) : text(s) {}
  Cell(std::string s) : text(std::move(s)) {}
  Cell(std::string_view s) : text(s) {}
};

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char ch : s) o += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return o + "\"";
}

/// Header-first table, written either as CSV or as one JSON object per row.
class Table {
 public:
  enum class Format { Json, Csv };

  Table(std::ostream& os, Format f, std::vector<std::string> columns) : os_(os), f_(f), cols_(std::move(columns)) {
    if (f_ == Format::Csv) {
      for (std::size_t i = 0; i < cols_.size(); ++i) os_ << (i ? "," : "") << csv_escape(cols_[i]);
      os_ << '\n';
    }
  }

  void row(const std::vector<Cell>& cells) {
    if (f_ == Format::Csv) {
      for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << csv_escape(cells[i].text);
      os_ << '\n';
      return;
    }
    std::string s = "{";
    for (std::size_t i = 0; i < cells.size() && i < cols_.size(); ++i) {
      s += (i ? "," : "") + nlohmann::json(cols_[i]).dump() + ":" + json_value(cells[i].text);
    }
    os_ << s << "}\n";
  }

 private:
  // numbers and booleans stay bare, everything else is quoted
  static std::string json_value(const std::string& t) {
    if (t == "true" || t == "false") return t;
    if (t == "nan" || t == "inf" || t == "-inf") return "null";
    double v;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (!t.empty() && res.ec == std::errc() && res.ptr == t.data() + t.size()) return t;
    return nlohmann::json(t).dump();
  }

  std::ostream& os_;
  Format f_;
  std::vector<std::string> cols_;
};

}  // namespace zgkn::io
