#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace interop {

// Minimal RFC-4180-ish CSV reader: UTF-8, header row, quoted fields with
// embedded commas/quotes/newlines. Header lookup is case-insensitive.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }

  // Column index for a (case-insensitive) name, or nullopt.
  std::optional<std::size_t> column(const std::string& name) const;

  // Reads the next record; false at EOF. Fields are resized to the header
  // width (short rows padded with empty strings).
  bool next(std::vector<std::string>& fields);

  std::size_t line() const { return line_; }

 private:
  bool read_record(std::vector<std::string>& fields);

  std::string data_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
};

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();

  void row(const std::vector<std::string>& fields);

 private:
  struct Impl;
  Impl* impl_;
};

std::string lower(std::string s);

// Serializes a double with 17 significant digits (shortest round-trip is
// not portable across standard libraries; a fixed width keeps bundles
// diffable).
std::string format_double(double v);

std::optional<double> parse_optional_double(const std::string& cell);
std::optional<long long> parse_optional_int(const std::string& cell);

}  // namespace interop
