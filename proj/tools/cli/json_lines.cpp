#include "json_lines.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace quasivar::cli {

std::string json_number(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

JsonRecord::JsonRecord(std::string_view type) { add("record", type); }

void JsonRecord::key(std::string_view k) {
  if (!body_.empty()) body_ += ',';
  body_ += json_string(k);
  body_ += ':';
}

JsonRecord& JsonRecord::add(std::string_view k, double value) {
  key(k);
  body_ += json_number(value);
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view k, int value) {
  key(k);
  body_ += std::to_string(value);
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view k, std::uint64_t value) {
  key(k);
  body_ += std::to_string(value);
  return *this;
}

JsonRecord& JsonRecord::add_count(std::string_view k, std::size_t value) {
  key(k);
  body_ += std::to_string(value);
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view k, bool value) {
  key(k);
  body_ += value ? "true" : "false";
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view k, std::string_view value) {
  key(k);
  body_ += json_string(value);
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view k, std::span<const double> values) {
  key(k);
  body_ += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += json_number(values[i]);
  }
  body_ += ']';
  return *this;
}

JsonRecord& JsonRecord::add(std::string_view k, const std::vector<std::string>& values) {
  key(k);
  body_ += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += json_string(values[i]);
  }
  body_ += ']';
  return *this;
}

std::string JsonRecord::str() const { return "{" + body_ + "}"; }

void JsonLinesWriter::write(const JsonRecord& record) {
  const std::lock_guard lock(mutex_);
  out_ << record.str() << '\n';
  out_.flush();
}

}  // namespace quasivar::cli
