#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace interop {

// A UTC calendar day, stored as days since 1970-01-01.
class Date {
 public:
  Date() : days_(0) {}
  explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  static Date parse(const std::string& iso);   // "YYYY-MM-DD"
  static Date from_ymd(int year, int month, int day);

  std::int32_t days() const { return days_; }
  std::string to_string() const;               // ISO-8601

  Date operator+(int d) const { return Date(days_ + d); }
  Date operator-(int d) const { return Date(days_ - d); }
  int operator-(Date other) const { return days_ - other.days_; }
  auto operator<=>(const Date&) const = default;

 private:
  std::int32_t days_;
};

struct DateRange {
  Date start;
  Date end;  // inclusive
  bool contains(Date d) const { return start <= d && d <= end; }
};

// ISO-8601 week key, e.g. "2023-W05". Weeks start on Monday; the week
// belongs to the year holding its Thursday.
std::string iso_week(Date d);

// Calendar month key, e.g. "2023-05".
std::string month_key(Date d);

}  // namespace interop
