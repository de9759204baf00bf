#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "interop/panel.hpp"

namespace interop {

enum class ShareBasis { Count, Amount };

ShareBasis parse_basis(const std::string& s);

struct SharePoint {
  std::string entity;   // bridge or chain id, or "OTHER"
  std::string period;   // ISO week key
  ShareBasis basis = ShareBasis::Count;
  double share = 0.0;   // in [0,1]
};

// Weekly per-bridge activity shares; bridges outside the top_k by
// full-window totals collapse into OTHER.
std::vector<SharePoint> weekly_bridge_activity(const FlowPanel& flows,
                                               ShareBasis basis, int top_k);

// Weekly endpoint shares: each transfer attributed to both endpoint
// chains, then renormalized per week.
std::vector<SharePoint> endpoint_shares(const FlowPanel& flows,
                                        ShareBasis basis, int top_k);

struct ShareGapPoint {
  std::string bridge_id;
  std::string month;  // calendar month key
  double gap = 0.0;   // amount share minus count share, in [-1,1]
};

// Share gap per bridge-month; months with zero transfers or
// zero notional are skipped (and counted).
struct ShareGapResult {
  std::vector<ShareGapPoint> points;
  int skipped_months = 0;
};
ShareGapResult share_gap(const FlowPanel& flows);

struct NetFlowEntry {
  std::string chain_a, chain_b;  // a < b
  double net_usd = 0.0;          // positive = a exports to b
  double gross_usd = 0.0;
  std::string direction;         // "a->b", "b->a", or "tie"
  bool official_excluded = false;
  bool direction_flips = false;  // sign changes when officials are excluded
};

std::vector<NetFlowEntry> net_flows(const FlowPanel& flows,
                                    const Taxonomy& tax,
                                    bool exclude_official);

struct EcosystemSplitRow {
  std::string direction;  // "nonevm_to_evm" or "evm_to_nonevm"
  std::string bridge_id;
  long long transfers = 0;
  double amount_usd = 0.0;
  double count_share = 0.0;
  double amount_share = 0.0;
};

struct EcosystemSplit {
  std::vector<EcosystemSplitRow> rows;
  long long total_transfers_nonevm_to_evm = 0;
  long long total_transfers_evm_to_nonevm = 0;
  double total_amount_nonevm_to_evm = 0.0;
  double total_amount_evm_to_nonevm = 0.0;
};

EcosystemSplit ecosystem_split(const FlowPanel& flows, const Taxonomy& tax);

}  // namespace interop
