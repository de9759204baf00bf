#include "interop/flows.hpp"

#include <algorithm>
#include <cmath>

#include "interop/csv.hpp"

namespace interop {

namespace {

double basis_value(const CorridorFlowRecord& r, ShareBasis basis) {
  if (basis == ShareBasis::Count) return double(r.transfer_count);
  // null-amount rows sit out of amount-basis analytics
  return r.total_amount_usd.value_or(0.0);
}

std::vector<SharePoint> to_shares(
    const std::map<std::string, std::map<std::string, double>>& by_period,
    ShareBasis basis) {
  std::vector<SharePoint> out;
  for (const auto& [period, entities] : by_period) {
    double total = 0.0;
    for (const auto& [e, v] : entities) total += v;
    if (total <= 0.0) continue;
    for (const auto& [entity, v] : entities) {
      out.push_back({entity, period, basis, v / total});
    }
  }
  return out;
}

// full-window entity totals -> the set kept out of the OTHER bucket
std::vector<std::string> top_entities(
    const std::map<std::string, double>& totals, int top_k) {
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [e, v] : totals) ranked.emplace_back(v, e);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> keep;
  for (int i = 0; i < int(ranked.size()) && i < top_k; ++i) {
    keep.push_back(ranked[i].second);
  }
  return keep;
}

}  // namespace

ShareBasis parse_basis(const std::string& s) {
  auto t = lower(s);
  if (t == "count") return ShareBasis::Count;
  if (t == "amount") return ShareBasis::Amount;
  throw Error(ErrorCode::BadConfig, "unknown basis '" + s + "'");
}

std::vector<SharePoint> weekly_bridge_activity(const FlowPanel& flows,
                                               ShareBasis basis, int top_k) {
  if (top_k < 1) throw Error(ErrorCode::BadConfig, "top_k must be >= 1");
  std::map<std::string, double> totals;
  for (const auto& r : flows.rows) {
    totals[r.bridge_id] += basis_value(r, basis);
  }
  auto keep = top_entities(totals, top_k);
  auto kept = [&](const std::string& id) {
    return std::find(keep.begin(), keep.end(), id) != keep.end();
  };
  std::map<std::string, std::map<std::string, double>> by_period;
  for (const auto& r : flows.rows) {
    std::string entity = kept(r.bridge_id) ? r.bridge_id : "OTHER";
    by_period[iso_week(r.date)][entity] += basis_value(r, basis);
  }
  return to_shares(by_period, basis);
}

std::vector<SharePoint> endpoint_shares(const FlowPanel& flows,
                                        ShareBasis basis, int top_k) {
  if (top_k < 1) throw Error(ErrorCode::BadConfig, "top_k must be >= 1");
  std::map<std::string, double> totals;
  for (const auto& r : flows.rows) {
    double v = basis_value(r, basis);
    totals[r.src_chain] += v;
    totals[r.dst_chain] += v;
  }
  auto keep = top_entities(totals, top_k);
  auto kept = [&](const std::string& id) {
    return std::find(keep.begin(), keep.end(), id) != keep.end();
  };
  std::map<std::string, std::map<std::string, double>> by_period;
  for (const auto& r : flows.rows) {
    double v = basis_value(r, basis);
    std::string week = iso_week(r.date);
    for (const std::string* c : {&r.src_chain, &r.dst_chain}) {
      std::string entity = kept(*c) ? *c : "OTHER";
      by_period[week][entity] += v;
    }
  }
  return to_shares(by_period, basis);
}

ShareGapResult share_gap(const FlowPanel& flows) {
  struct MonthAcc {
    std::map<std::string, double> counts;
    std::map<std::string, double> amounts;
    double total_count = 0.0;
    double total_amount = 0.0;
  };
  std::map<std::string, MonthAcc> months;
  for (const auto& r : flows.rows) {
    auto& m = months[month_key(r.date)];
    m.counts[r.bridge_id] += double(r.transfer_count);
    m.total_count += double(r.transfer_count);
    double amt = r.total_amount_usd.value_or(0.0);
    m.amounts[r.bridge_id] += amt;
    m.total_amount += amt;
  }
  ShareGapResult result;
  for (const auto& [month, m] : months) {
    if (m.total_count <= 0.0 || m.total_amount <= 0.0) {
      ++result.skipped_months;
      continue;
    }
    for (const auto& [bridge, c] : m.counts) {
      double amount = 0.0;
      if (auto it = m.amounts.find(bridge); it != m.amounts.end()) {
        amount = it->second;
      }
      double gap = amount / m.total_amount - c / m.total_count;
      result.points.push_back({bridge, month, gap});
    }
  }
  return result;
}

std::vector<NetFlowEntry> net_flows(const FlowPanel& flows,
                                    const Taxonomy& tax,
                                    bool exclude_official) {
  auto aggregate = [&](bool exclude) {
    // (a,b) with a < b; positive net = a -> b
    std::map<std::pair<std::string, std::string>, std::pair<double, double>>
        pairs;  // -> (net, gross)
    for (const auto& r : flows.rows) {
      if (exclude &&
          tax.bridge(r.bridge_id).category == BridgeCategory::Official) {
        continue;
      }
      double amt = r.total_amount_usd.value_or(0.0);
      bool forward = r.src_chain < r.dst_chain;
      auto key = forward ? std::make_pair(r.src_chain, r.dst_chain)
                         : std::make_pair(r.dst_chain, r.src_chain);
      auto& [net, gross] = pairs[key];
      net += forward ? amt : -amt;
      gross += amt;
    }
    return pairs;
  };

  auto all = aggregate(false);
  auto selected = exclude_official ? aggregate(true) : all;

  std::vector<NetFlowEntry> out;
  for (const auto& [key, ng] : selected) {
    NetFlowEntry e;
    e.chain_a = key.first;
    e.chain_b = key.second;
    e.net_usd = ng.first;
    e.gross_usd = ng.second;
    e.official_excluded = exclude_official;
    if (ng.first > 0) {
      e.direction = e.chain_a + "->" + e.chain_b;
    } else if (ng.first < 0) {
      e.direction = e.chain_b + "->" + e.chain_a;
    } else {
      e.direction = "tie";
    }
    if (exclude_official) {
      auto it = all.find(key);
      if (it != all.end() && it->second.first * ng.first < 0) {
        e.direction_flips = true;
      }
    }
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const NetFlowEntry& a,
                                       const NetFlowEntry& b) {
    return std::fabs(a.net_usd) > std::fabs(b.net_usd);
  });
  return out;
}

EcosystemSplit ecosystem_split(const FlowPanel& flows, const Taxonomy& tax) {
  auto is_evm = [&](const std::string& chain) {
    auto it = tax.chains.find(chain);
    if (it == tax.chains.end()) {
      throw Error(ErrorCode::UnclassifiedChain, chain);
    }
    return it->second.is_evm;
  };

  struct DirAcc {
    std::map<std::string, std::pair<long long, double>> bridges;
    long long transfers = 0;
    double amount = 0.0;
  };
  DirAcc n2e, e2n;
  for (const auto& r : flows.rows) {
    bool src_evm = is_evm(r.src_chain);
    bool dst_evm = is_evm(r.dst_chain);
    if (src_evm == dst_evm) continue;
    DirAcc& acc = src_evm ? e2n : n2e;
    double amt = r.total_amount_usd.value_or(0.0);
    acc.bridges[r.bridge_id].first += r.transfer_count;
    acc.bridges[r.bridge_id].second += amt;
    acc.transfers += r.transfer_count;
    acc.amount += amt;
  }

  EcosystemSplit split;
  split.total_transfers_nonevm_to_evm = n2e.transfers;
  split.total_transfers_evm_to_nonevm = e2n.transfers;
  split.total_amount_nonevm_to_evm = n2e.amount;
  split.total_amount_evm_to_nonevm = e2n.amount;
  auto emit = [&](const DirAcc& acc, const std::string& name) {
    for (const auto& [bridge, cv] : acc.bridges) {
      EcosystemSplitRow row;
      row.direction = name;
      row.bridge_id = bridge;
      row.transfers = cv.first;
      row.amount_usd = cv.second;
      row.count_share =
          acc.transfers > 0 ? double(cv.first) / double(acc.transfers) : 0.0;
      row.amount_share = acc.amount > 0 ? cv.second / acc.amount : 0.0;
      split.rows.push_back(std::move(row));
    }
  };
  emit(n2e, "nonevm_to_evm");
  emit(e2n, "evm_to_nonevm");
  return split;
}

}  // namespace interop
