#include "interop/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "interop/errors.hpp"

namespace interop {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

CsvReader::CsvReader(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  data_ = ss.str();
  // strip UTF-8 BOM
  if (data_.size() >= 3 && data_[0] == '\xEF' && data_[1] == '\xBB' &&
      data_[2] == '\xBF') {
    pos_ = 3;
  }
  if (!read_record(header_)) {
    throw Error(ErrorCode::SchemaMismatch, "empty file " + path);
  }
  for (std::size_t i = 0; i < header_.size(); ++i) {
    index_.emplace(lower(header_[i]), i);
  }
}

std::optional<std::size_t> CsvReader::column(const std::string& name) const {
  auto it = index_.find(lower(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool CsvReader::read_record(std::vector<std::string>& fields) {
  fields.clear();
  if (pos_ >= data_.size()) return false;
  ++line_;
  std::string cur;
  bool quoted = false;
  bool any = false;
  while (pos_ < data_.size()) {
    char c = data_[pos_];
    if (quoted) {
      if (c == '"') {
        if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '"') {
          cur += '"';
          ++pos_;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
      ++pos_;
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
      ++pos_;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      any = true;
      ++pos_;
    } else if (c == '\r') {
      ++pos_;
    } else if (c == '\n') {
      ++pos_;
      break;
    } else {
      cur += c;
      any = true;
      ++pos_;
    }
  }
  fields.push_back(std::move(cur));
  if (!any && fields.size() == 1 && fields[0].empty()) {
    // blank trailing line
    return pos_ < data_.size() ? read_record(fields) : false;
  }
  return true;
}

bool CsvReader::next(std::vector<std::string>& fields) {
  if (!read_record(fields)) return false;
  fields.resize(header_.size());
  return true;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path, std::ios::binary);
  if (!impl_->out) throw Error(ErrorCode::IoError, "cannot write " + path);
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) impl_->out << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n\r") != std::string::npos) {
      impl_->out << '"';
      for (char c : f) {
        if (c == '"') impl_->out << '"';
        impl_->out << c;
      }
      impl_->out << '"';
    } else {
      impl_->out << f;
    }
  }
  impl_->out << '\n';
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<double> parse_optional_double(const std::string& cell) {
  std::string t = cell;
  t.erase(std::remove_if(t.begin(), t.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          t.end());
  if (t.empty() || t == "--" || lower(t) == "na" || lower(t) == "nan" ||
      lower(t) == "null" || lower(t) == "none") {
    return std::nullopt;
  }
  std::size_t used = 0;
  double v = std::stod(t, &used);
  if (used != t.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::SchemaMismatch, "bad numeric cell '" + cell + "'");
  }
  return v;
}

std::optional<long long> parse_optional_int(const std::string& cell) {
  auto v = parse_optional_double(cell);
  if (!v) return std::nullopt;
  return static_cast<long long>(std::llround(*v));
}

}  // namespace interop
