#include "interop/dates.hpp"

#include <chrono>
#include <cstdio>

#include "interop/errors.hpp"

namespace interop {

namespace {
using days_t = std::chrono::sys_days;
}

Date Date::from_ymd(int year, int month, int day) {
  std::chrono::year_month_day ymd{std::chrono::year{year},
                                  std::chrono::month{unsigned(month)},
                                  std::chrono::day{unsigned(day)}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::IoError, "invalid calendar date " +
                                        std::to_string(year) + "-" +
                                        std::to_string(month) + "-" +
                                        std::to_string(day));
  }
  return Date(static_cast<std::int32_t>(days_t(ymd).time_since_epoch().count()));
}

Date Date::parse(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  // Accept both "YYYY-MM-DD" and "YYYY-MM-DD<T...>" (timestamp prefixes).
  int n = std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &tail);
  if (n < 3 || (n == 4 && tail != 'T' && tail != ' ')) {
    throw Error(ErrorCode::IoError, "unparseable date '" + iso + "'");
  }
  return from_ymd(y, m, d);
}

std::string Date::to_string() const {
  std::chrono::year_month_day ymd{days_t(std::chrono::days(days_))};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

std::string iso_week(Date d) {
  // Thursday of the same ISO week determines the week-year.
  int dow = ((d.days() % 7) + 7 + 3) % 7;  // 0 = Monday (1970-01-01 was Thu)
  Date thursday = d + (3 - dow);
  std::chrono::year_month_day ymd{
      days_t(std::chrono::days(thursday.days()))};
  Date jan1 = Date::from_ymd(int(ymd.year()), 1, 1);
  int week = (thursday - jan1) / 7 + 1;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-W%02d", int(ymd.year()), week);
  return buf;
}

std::string month_key(Date d) {
  std::chrono::year_month_day ymd{days_t(std::chrono::days(d.days()))};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", int(ymd.year()),
                unsigned(ymd.month()));
  return buf;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownChain: return "UnknownChain";
    case ErrorCode::UnknownBridge: return "UnknownBridge";
    case ErrorCode::UnknownFilter: return "UnknownFilter";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::SummaryOrderViolation: return "SummaryOrderViolation";
    case ErrorCode::MemberCountOutOfRange: return "MemberCountOutOfRange";
    case ErrorCode::SameChain: return "SameChain";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::NoSummaries: return "NoSummaries";
    case ErrorCode::EmptyPeriod: return "EmptyPeriod";
    case ErrorCode::UnclassifiedChain: return "UnclassifiedChain";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InsufficientVariation: return "InsufficientVariation";
    case ErrorCode::DegenerateTreatment: return "DegenerateTreatment";
    case ErrorCode::InsufficientPairs: return "InsufficientPairs";
    case ErrorCode::JoinKeyMismatch: return "JoinKeyMismatch";
    case ErrorCode::IncompleteBundle: return "IncompleteBundle";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

}  // namespace interop
