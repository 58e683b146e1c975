#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quasivar::cli {

/// Formats a double with 17 significant digits; non-finite values become the
/// strings "inf", "-inf" and "nan".
std::string json_number(double x);
std::string json_string(std::string_view s);

/// One JSON object, keys kept in insertion order.
class JsonRecord {
 public:
  explicit JsonRecord(std::string_view type);

  JsonRecord& add(std::string_view key, double value);
  JsonRecord& add(std::string_view key, int value);
  JsonRecord& add(std::string_view key, std::uint64_t value);
  JsonRecord& add_count(std::string_view key, std::size_t value);
  JsonRecord& add(std::string_view key, bool value);
  JsonRecord& add(std::string_view key, std::string_view value);
  JsonRecord& add(std::string_view key, const char* value) { return add(key, std::string_view(value)); }
  JsonRecord& add(std::string_view key, std::span<const double> values);
  JsonRecord& add(std::string_view key, const std::vector<std::string>& values);

  std::string str() const;

 private:
  void key(std::string_view k);
  std::string body_;
};

/// Serialized JSON-lines sink.
class JsonLinesWriter {
 public:
  explicit JsonLinesWriter(std::ostream& out) : out_(out) {}
  void write(const JsonRecord& record);

 private:
  std::ostream& out_;
  std::mutex mutex_;
};

}  // namespace quasivar::cli
