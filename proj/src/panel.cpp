#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "interop/csv.hpp"
#include "interop/panel.hpp"
#include "json.hpp"

namespace interop {

namespace {

void check_nonneg(const std::optional<double>& v, const std::string& col,
                  std::size_t line) {
  if (v && *v < 0) {
    throw Error(ErrorCode::SchemaMismatch,
                "negative " + col + " at line " + std::to_string(line));
  }
}

void check_nonneg(const std::optional<long long>& v, const std::string& col,
                  std::size_t line) {
  if (v && *v < 0) {
    throw Error(ErrorCode::SchemaMismatch,
                "negative " + col + " at line " + std::to_string(line));
  }
}

std::size_t require_column(const CsvReader& r, const std::string& name) {
  auto idx = r.column(name);
  if (!idx) {
    throw Error(ErrorCode::SchemaMismatch, "missing column '" + name + "'");
  }
  return *idx;
}

// Reads <prefix>_min.._max if all five columns are present and non-null.
std::optional<FiveNumberSummary> read_summary(
    const CsvReader& r, const std::vector<std::string>& f,
    const std::string& prefix, std::size_t line) {
  static const char* suffix[5] = {"min", "q1", "q2", "q3", "max"};
  double vals[5];
  for (int k = 0; k < 5; ++k) {
    auto idx = r.column(prefix + "_" + suffix[k]);
    if (!idx) return std::nullopt;
    auto v = parse_optional_double(f[*idx]);
    if (!v) return std::nullopt;
    vals[k] = *v;
  }
  FiveNumberSummary s{vals[0], vals[1], vals[2], vals[3], vals[4]};
  if (!s.ordered()) {
    throw Error(ErrorCode::SummaryOrderViolation,
                prefix + " summary out of order at line " +
                    std::to_string(line));
  }
  return s;
}

}  // namespace

ChainPanel load_chain_panel(const std::string& path, const Taxonomy& tax) {
  CsvReader r(path);
  std::size_t c_chain = require_column(r, "chain_id");
  std::size_t c_date = require_column(r, "date");
  const char* numeric_cols[] = {
      "tvl_usd",      "daily_active_users", "new_contracts_count",
      "total_gas_used", "total_gas_usd",    "median_gas_usd",
      "close_price_usd", "volume_usd"};
  for (const char* col : numeric_cols) require_column(r, col);

  std::set<std::string> known;
  for (const auto& h : r.header()) known.insert(lower(h));

  ChainPanel panel;
  std::set<std::pair<std::string, std::int32_t>> seen;
  std::vector<std::string> f;
  while (r.next(f)) {
    ChainDayRecord rec;
    rec.chain_id = tax.resolve_chain(f[c_chain]);
    rec.date = Date::parse(f[c_date]);
    if (!tax.study_window.contains(rec.date)) {
      ++panel.dropped_out_of_window;
      continue;
    }
    if (!seen.emplace(rec.chain_id, rec.date.days()).second) {
      throw Error(ErrorCode::DuplicateKey,
                  rec.chain_id + " " + rec.date.to_string());
    }
    auto num = [&](const char* col) {
      return parse_optional_double(f[*r.column(col)]);
    };
    auto cnt = [&](const char* col) {
      return parse_optional_int(f[*r.column(col)]);
    };
    rec.tvl_usd = num("tvl_usd");
    rec.daily_active_users = cnt("daily_active_users");
    rec.new_contracts_count = cnt("new_contracts_count");
    rec.total_gas_used = num("total_gas_used");
    rec.total_gas_usd = num("total_gas_usd");
    rec.median_gas_usd = num("median_gas_usd");
    rec.close_price_usd = num("close_price_usd");
    rec.volume_usd = num("volume_usd");
    check_nonneg(rec.tvl_usd, "tvl_usd", r.line());
    check_nonneg(rec.daily_active_users, "daily_active_users", r.line());
    check_nonneg(rec.new_contracts_count, "new_contracts_count", r.line());
    check_nonneg(rec.total_gas_used, "total_gas_used", r.line());
    check_nonneg(rec.total_gas_usd, "total_gas_usd", r.line());
    check_nonneg(rec.median_gas_usd, "median_gas_usd", r.line());
    check_nonneg(rec.close_price_usd, "close_price_usd", r.line());
    check_nonneg(rec.volume_usd, "volume_usd", r.line());
    // columns outside the data dictionary ride along untouched
    for (std::size_t i = 0; i < r.header().size(); ++i) {
      std::string h = lower(r.header()[i]);
      if (h == "chain_id" || h == "date") continue;
      bool declared = false;
      for (const char* col : numeric_cols) declared |= (h == col);
      if (!declared) rec.extra.emplace(h, f[i]);
    }
    panel.rows.push_back(std::move(rec));
  }
  std::sort(panel.rows.begin(), panel.rows.end(),
            [](const ChainDayRecord& a, const ChainDayRecord& b) {
              return std::tie(a.chain_id, a.date) < std::tie(b.chain_id, b.date);
            });
  return panel;
}

FlowPanel load_flow_panel(const std::string& path, const Taxonomy& tax) {
  CsvReader r(path);
  std::size_t c_bridge = require_column(r, "bridge_id");
  std::size_t c_src = require_column(r, "src_chain");
  std::size_t c_dst = require_column(r, "dst_chain");
  std::size_t c_date = require_column(r, "date");
  std::size_t c_count = require_column(r, "transfer_count");

  FlowPanel panel;
  std::set<std::tuple<std::string, std::string, std::string, std::int32_t>>
      seen;
  std::vector<std::string> f;
  while (r.next(f)) {
    CorridorFlowRecord rec;
    rec.bridge_id = tax.resolve_bridge(f[c_bridge]);
    rec.src_chain = tax.resolve_chain(f[c_src]);
    rec.dst_chain = tax.resolve_chain(f[c_dst]);
    if (rec.src_chain == rec.dst_chain) {
      throw Error(ErrorCode::SelfLoop,
                  rec.src_chain + " at line " + std::to_string(r.line()));
    }
    rec.date = Date::parse(f[c_date]);
    if (!tax.study_window.contains(rec.date)) {
      ++panel.dropped_out_of_window;
      continue;
    }
    if (!seen.emplace(rec.bridge_id, rec.src_chain, rec.dst_chain,
                      rec.date.days())
             .second) {
      throw Error(ErrorCode::DuplicateKey,
                  rec.bridge_id + " " + rec.src_chain + "->" + rec.dst_chain +
                      " " + rec.date.to_string());
    }
    auto cv = parse_optional_int(f[c_count]);
    rec.transfer_count = cv.value_or(0);
    if (rec.transfer_count < 0) {
      throw Error(ErrorCode::SchemaMismatch,
                  "negative transfer_count at line " + std::to_string(r.line()));
    }
    auto opt = [&](const char* col) -> std::optional<double> {
      auto idx = r.column(col);
      return idx ? parse_optional_double(f[*idx]) : std::nullopt;
    };
    auto opt_i = [&](const char* col) -> std::optional<long long> {
      auto idx = r.column(col);
      return idx ? parse_optional_int(f[*idx]) : std::nullopt;
    };
    rec.daily_users = opt_i("daily_users");
    rec.total_amount_usd = opt("total_amount_usd");
    rec.avg_transfer_usd = opt("avg_transfer_usd");
    rec.total_fee_usd = opt("total_fee_usd");
    rec.avg_fee_usd = opt("avg_fee_usd");
    rec.avg_speed_seconds = opt("avg_speed_seconds");
    check_nonneg(rec.daily_users, "daily_users", r.line());
    check_nonneg(rec.total_amount_usd, "total_amount_usd", r.line());
    check_nonneg(rec.avg_transfer_usd, "avg_transfer_usd", r.line());
    check_nonneg(rec.total_fee_usd, "total_fee_usd", r.line());
    check_nonneg(rec.avg_fee_usd, "avg_fee_usd", r.line());
    check_nonneg(rec.avg_speed_seconds, "avg_speed_seconds", r.line());
    rec.value_summary = read_summary(r, f, "value", r.line());
    rec.fee_summary = read_summary(r, f, "fee", r.line());
    rec.latency_summary = read_summary(r, f, "latency", r.line());
    bool has_value_aggregate = rec.total_amount_usd || rec.avg_transfer_usd ||
                               rec.value_summary.has_value();
    if (has_value_aggregate && rec.transfer_count < 1) {
      throw Error(ErrorCode::SchemaMismatch,
                  "value aggregate with zero transfer_count at line " +
                      std::to_string(r.line()));
    }
    panel.rows.push_back(std::move(rec));
  }
  std::sort(panel.rows.begin(), panel.rows.end(),
            [](const CorridorFlowRecord& a, const CorridorFlowRecord& b) {
              return std::tie(a.bridge_id, a.src_chain, a.dst_chain, a.date) <
                     std::tie(b.bridge_id, b.src_chain, b.dst_chain, b.date);
            });
  return panel;
}

const ChainDayRecord* ChainPanel::find(const std::string& chain,
                                       Date d) const {
  auto it = std::lower_bound(
      rows.begin(), rows.end(), std::tie(chain, d),
      [](const ChainDayRecord& a, const std::tuple<const std::string&, Date>& k) {
        return std::tie(a.chain_id, a.date) < k;
      });
  if (it != rows.end() && it->chain_id == chain && it->date == d) return &*it;
  return nullptr;
}

std::set<std::string> ChainPanel::chain_ids() const {
  std::set<std::string> out;
  for (const auto& r : rows) out.insert(r.chain_id);
  return out;
}

std::set<std::string> FlowPanel::chain_ids() const {
  std::set<std::string> out;
  for (const auto& r : rows) {
    out.insert(r.src_chain);
    out.insert(r.dst_chain);
  }
  return out;
}

std::set<std::string> FlowPanel::bridge_ids() const {
  std::set<std::string> out;
  for (const auto& r : rows) out.insert(r.bridge_id);
  return out;
}

DateRange FlowPanel::observed_range() const {
  DateRange range{Date(INT32_MAX), Date(INT32_MIN)};
  for (const auto& r : rows) {
    range.start = std::min(range.start, r.date);
    range.end = std::max(range.end, r.date);
  }
  return range;
}

ValidationReport validate_panels(const ChainPanel& chains,
                                 const FlowPanel& flows, const Taxonomy& tax) {
  ValidationReport rep;
  rep.chain_rows = chains.rows.size();
  rep.flow_rows = flows.rows.size();

  auto chain_ids = chains.chain_ids();
  for (const auto& id : flows.chain_ids()) {
    if (!chain_ids.count(id)) rep.missing_chain_attributes.push_back(id);
  }

  // gaps strictly inside each chain's observed span
  std::map<std::string, std::set<std::int32_t>> days;
  for (const auto& r : chains.rows) days[r.chain_id].insert(r.date.days());
  for (const auto& [chain, ds] : days) {
    int gaps = int(*ds.rbegin() - *ds.begin() + 1) - int(ds.size());
    rep.coverage_gaps[chain] = gaps;
  }

  auto rate = [&](auto member) {
    std::size_t nulls = 0;
    for (const auto& r : flows.rows) {
      if (!(r.*member)) ++nulls;
    }
    return flows.rows.empty() ? 0.0 : double(nulls) / double(flows.rows.size());
  };
  rep.null_rate["daily_users"] = rate(&CorridorFlowRecord::daily_users);
  rep.null_rate["total_amount_usd"] =
      rate(&CorridorFlowRecord::total_amount_usd);
  rep.null_rate["avg_transfer_usd"] =
      rate(&CorridorFlowRecord::avg_transfer_usd);
  rep.null_rate["total_fee_usd"] = rate(&CorridorFlowRecord::total_fee_usd);
  rep.null_rate["avg_fee_usd"] = rate(&CorridorFlowRecord::avg_fee_usd);
  rep.null_rate["avg_speed_seconds"] =
      rate(&CorridorFlowRecord::avg_speed_seconds);
  {
    std::size_t nulls = 0;
    for (const auto& r : chains.rows) {
      if (!r.tvl_usd) ++nulls;
    }
    rep.null_rate["tvl_usd"] =
        chains.rows.empty() ? 0.0 : double(nulls) / double(chains.rows.size());
  }
  for (const auto& r : flows.rows) {
    if (!r.total_amount_usd) ++rep.null_amount_rows;
  }
  (void)tax;
  return rep;
}

std::string ValidationReport::to_json() const {
  nlohmann::json j;
  j["missing_chain_attributes"] = missing_chain_attributes;
  j["coverage_gaps"] = coverage_gaps;
  j["null_rate"] = null_rate;
  j["flow_rows"] = flow_rows;
  j["chain_rows"] = chain_rows;
  j["null_amount_rows"] = null_amount_rows;
  return j.dump(2);
}

}  // namespace interop
