#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "interop/dates.hpp"
#include "interop/errors.hpp"

namespace interop {

struct FiveNumberSummary {
  double min, q1, q2, q3, max;

  bool ordered() const {
    return min <= q1 && q1 <= q2 && q2 <= q3 && q3 <= max;
  }
};

enum class ChainStack { L1, L2, Sidechain };
enum class BridgeCategory { Official, ThirdParty };
enum class BridgeMechanism { LockAndMint, BurnAndMint, LiquidityPool };

struct ChainMeta {
  std::string chain_id;
  ChainStack stack = ChainStack::L1;
  bool is_evm = false;
  std::string ecosystem;
  bool has_canonical_bridge = false;

  bool is_l1() const { return stack == ChainStack::L1; }
};

struct BridgeMeta {
  std::string bridge_id;
  BridgeCategory category = BridgeCategory::ThirdParty;
  BridgeMechanism mechanism = BridgeMechanism::LockAndMint;
  Date created;
  std::optional<Date> end_of_life;
};

// Chain/bridge taxonomy plus the alias and rollup maps, loaded from one
// JSON file.
struct Taxonomy {
  std::unordered_map<std::string, ChainMeta> chains;
  std::unordered_map<std::string, BridgeMeta> bridges;
  std::unordered_map<std::string, std::string> chain_aliases;
  std::unordered_map<std::string, std::string> bridge_rollups;
  std::set<std::string> endpoint_only_chains;
  DateRange study_window{Date::parse("2022-01-01"), Date::parse("2025-10-31")};

  static Taxonomy load(const std::string& path);

  // Canonical chain id: alias-resolved, must be a known chain or an
  // endpoint-only chain. Throws UnknownChain otherwise.
  std::string resolve_chain(const std::string& raw) const;
  // Canonical bridge id after sub-entity rollup.
  std::string resolve_bridge(const std::string& raw) const;

  const ChainMeta& chain(const std::string& id) const;
  const BridgeMeta& bridge(const std::string& id) const;
};

struct ChainDayRecord {
  std::string chain_id;
  Date date;
  std::optional<double> tvl_usd;
  std::optional<long long> daily_active_users;
  std::optional<long long> new_contracts_count;
  std::optional<double> total_gas_used;
  std::optional<double> total_gas_usd;
  std::optional<double> median_gas_usd;
  std::optional<double> close_price_usd;
  std::optional<double> volume_usd;
  std::map<std::string, std::string> extra;  // opaque passthrough columns
};

struct CorridorFlowRecord {
  std::string bridge_id;
  std::string src_chain;
  std::string dst_chain;
  Date date;
  long long transfer_count = 0;
  std::optional<long long> daily_users;
  std::optional<double> total_amount_usd;
  std::optional<double> avg_transfer_usd;
  std::optional<double> total_fee_usd;
  std::optional<double> avg_fee_usd;
  std::optional<double> avg_speed_seconds;
  std::optional<FiveNumberSummary> value_summary;
  std::optional<FiveNumberSummary> fee_summary;
  std::optional<FiveNumberSummary> latency_summary;
};

struct ChainPanel {
  std::vector<ChainDayRecord> rows;  // sorted by (chain_id, date)
  std::size_t dropped_out_of_window = 0;

  const ChainDayRecord* find(const std::string& chain, Date d) const;
  std::set<std::string> chain_ids() const;
};

struct FlowPanel {
  std::vector<CorridorFlowRecord> rows;  // sorted by (bridge, src, dst, date)
  std::size_t dropped_out_of_window = 0;

  std::set<std::string> chain_ids() const;
  std::set<std::string> bridge_ids() const;
  DateRange observed_range() const;
};

ChainPanel load_chain_panel(const std::string& path, const Taxonomy& tax);
FlowPanel load_flow_panel(const std::string& path, const Taxonomy& tax);

struct ValidationReport {
  std::vector<std::string> missing_chain_attributes;  // in flows, not chains
  // chain -> count of missing days strictly inside its observed span
  std::map<std::string, int> coverage_gaps;
  std::map<std::string, double> null_rate;  // column -> fraction null
  std::size_t flow_rows = 0;
  std::size_t chain_rows = 0;
  std::size_t null_amount_rows = 0;

  std::string to_json() const;
};

ValidationReport validate_panels(const ChainPanel& chains,
                                 const FlowPanel& flows, const Taxonomy& tax);

}  // namespace interop
