#include "interop/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "interop/csv.hpp"

namespace interop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void HypergraphConfig::validate() const {
  if (alpha <= 0) throw Error(ErrorCode::BadConfig, "alpha must be > 0");
  if (theta <= 0) throw Error(ErrorCode::BadConfig, "theta must be > 0");
  if (n_total < 2) throw Error(ErrorCode::BadConfig, "n_total must be >= 2");
  if (rule == MembershipRule::RollingWindow && membership_window_days < 1) {
    throw Error(ErrorCode::BadConfig, "membership window must be >= 1 day");
  }
}

double hyperedge_weight(int member_count, const HypergraphConfig& cfg) {
  cfg.validate();
  if (member_count < 2 || member_count > cfg.n_total) {
    throw Error(ErrorCode::MemberCountOutOfRange,
                std::to_string(member_count) + " not in [2, " +
                    std::to_string(cfg.n_total) + "]");
  }
  return cfg.alpha *
         std::pow(double(member_count) / double(cfg.n_total), cfg.theta);
}

ProjectedGraph::ProjectedGraph(Date date, std::vector<std::string> chains)
    : date_(date), chains_(std::move(chains)) {
  std::sort(chains_.begin(), chains_.end());
  for (std::size_t i = 0; i < chains_.size(); ++i) index_[chains_[i]] = i;
  strengths_.assign(chains_.size() * chains_.size(), 0.0);
  dist_.assign(chains_.size() * chains_.size(), kInf);
}

std::optional<std::size_t> ProjectedGraph::index_of(
    const std::string& chain) const {
  auto it = index_.find(chain);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double ProjectedGraph::strength(std::size_t i, std::size_t j) const {
  return strengths_[i * size() + j];
}

std::optional<double> ProjectedGraph::delta(std::size_t i,
                                            std::size_t j) const {
  double s = strength(i, j);
  if (i == j || s <= 0.0) return std::nullopt;
  return 1.0 / (1.0 + s);
}

std::optional<double> ProjectedGraph::shortest(std::size_t i,
                                               std::size_t j) const {
  double d = dist_[i * size() + j];
  if (std::isinf(d)) return std::nullopt;
  return d;
}

void ProjectedGraph::add_strength(std::size_t i, std::size_t j, double w) {
  strengths_[i * size() + j] += w;
  strengths_[j * size() + i] += w;
}

void ProjectedGraph::run_shortest_paths() {
  const std::size_t n = size();
  using Item = std::pair<double, std::size_t>;
  for (std::size_t src = 0; src < n; ++src) {
    double* d = &dist_[src * n];
    std::fill(d, d + n, kInf);
    d[src] = 0.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du > d[u]) continue;
      for (std::size_t v = 0; v < n; ++v) {
        auto edge = delta(u, v);
        if (!edge) continue;
        double nd = du + *edge;
        if (nd < d[v]) {
          d[v] = nd;
          pq.emplace(nd, v);
        }
      }
    }
  }
}

ProjectedGraph project(const HypergraphSnapshot& snapshot) {
  std::vector<std::string> chains(snapshot.chain_universe.begin(),
                                  snapshot.chain_universe.end());
  ProjectedGraph g(snapshot.date, std::move(chains));
  for (const auto& edge : snapshot.hyperedges) {
    std::vector<std::size_t> idx;
    idx.reserve(edge.members.size());
    for (const auto& m : edge.members) {
      auto i = g.index_of(m);
      if (!i) {
        throw Error(ErrorCode::UnknownChain,
                    m + " in hyperedge " + edge.bridge_id +
                        " missing from chain universe");
      }
      idx.push_back(*i);
    }
    // one contribution per bridge per unordered pair
    for (std::size_t a = 0; a + 1 < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        g.add_strength(idx[a], idx[b], edge.weight);
      }
    }
  }
  g.run_shortest_paths();
  return g;
}

BridgeFilter parse_filter(const std::string& name) {
  auto t = lower(name);
  if (t == "all") return BridgeFilter::All;
  if (t == "official") return BridgeFilter::Official;
  if (t == "third_party") return BridgeFilter::ThirdParty;
  if (t == "lnm" || t == "lock_and_mint") return BridgeFilter::LockAndMint;
  if (t == "bnm" || t == "burn_and_mint") return BridgeFilter::BurnAndMint;
  if (t == "lp" || t == "liquidity_pool") return BridgeFilter::LiquidityPool;
  throw Error(ErrorCode::UnknownFilter, name);
}

std::string filter_name(BridgeFilter f) {
  switch (f) {
    case BridgeFilter::All: return "all";
    case BridgeFilter::Official: return "official";
    case BridgeFilter::ThirdParty: return "third_party";
    case BridgeFilter::LockAndMint: return "lnm";
    case BridgeFilter::BurnAndMint: return "bnm";
    case BridgeFilter::LiquidityPool: return "lp";
  }
  return "all";
}

bool filter_admits(BridgeFilter f, const BridgeMeta& meta) {
  switch (f) {
    case BridgeFilter::All: return true;
    case BridgeFilter::Official: return meta.category == BridgeCategory::Official;
    case BridgeFilter::ThirdParty:
      return meta.category == BridgeCategory::ThirdParty;
    case BridgeFilter::LockAndMint:
      return meta.mechanism == BridgeMechanism::LockAndMint;
    case BridgeFilter::BurnAndMint:
      return meta.mechanism == BridgeMechanism::BurnAndMint;
    case BridgeFilter::LiquidityPool:
      return meta.mechanism == BridgeMechanism::LiquidityPool;
  }
  return true;
}

std::vector<HypergraphSnapshot> build_snapshots(const FlowPanel& flows,
                                                const Taxonomy& tax,
                                                const HypergraphConfig& cfg,
                                                BridgeFilter filter) {
  cfg.validate();
  std::set<std::string> universe;
  for (const auto& [id, meta] : tax.chains) universe.insert(id);
  for (const auto& id : flows.chain_ids()) universe.insert(id);

  if (flows.rows.empty()) return {};
  DateRange range = flows.observed_range();

  // per-bridge activity log: chain -> sorted days it was touched
  std::map<std::string, std::map<std::string, std::vector<std::int32_t>>>
      touched;
  for (const auto& r : flows.rows) {
    if (!filter_admits(filter, tax.bridge(r.bridge_id))) continue;
    touched[r.bridge_id][r.src_chain].push_back(r.date.days());
    touched[r.bridge_id][r.dst_chain].push_back(r.date.days());
  }
  for (auto& [b, chains] : touched) {
    for (auto& [c, days] : chains) {
      std::sort(days.begin(), days.end());
    }
  }

  std::vector<HypergraphSnapshot> out;
  out.reserve(std::size_t(range.end - range.start) + 1);
  for (Date day = range.start; day <= range.end; day = day + 1) {
    HypergraphSnapshot snap;
    snap.date = day;
    snap.chain_universe = universe;
    for (const auto& [bridge_id, chains] : touched) {
      const BridgeMeta& meta = tax.bridge(bridge_id);
      if (meta.end_of_life && day > *meta.end_of_life) continue;
      std::set<std::string> members;
      for (const auto& [chain, days] : chains) {
        bool active;
        if (cfg.rule == MembershipRule::CumulativeUntilEol) {
          active = days.front() <= day.days();
        } else {
          // active within the trailing window [day-W+1, day]
          auto it = std::upper_bound(days.begin(), days.end(), day.days());
          active = it != days.begin() &&
                   *std::prev(it) > day.days() - cfg.membership_window_days;
        }
        if (active) members.insert(chain);
      }
      if (members.size() < 2) continue;
      Hyperedge e;
      e.bridge_id = bridge_id;
      e.weight = hyperedge_weight(int(members.size()), cfg);
      e.members = std::move(members);
      snap.hyperedges.push_back(std::move(e));
    }
    out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace interop
