#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "interop/panel.hpp"

namespace interop {

enum class MembershipRule { CumulativeUntilEol, RollingWindow };

struct HypergraphConfig {
  double alpha = 1.0;
  double theta = 1.0;
  int n_total = 20;
  MembershipRule rule = MembershipRule::CumulativeUntilEol;
  int membership_window_days = 30;

  void validate() const;
};

double hyperedge_weight(int member_count, const HypergraphConfig& cfg);

struct Hyperedge {
  std::string bridge_id;
  std::set<std::string> members;  // |members| >= 2
  double weight = 0.0;
};

struct HypergraphSnapshot {
  Date date;
  std::vector<Hyperedge> hyperedges;
  std::set<std::string> chain_universe;
};

// Weighted pairwise projection of one day's hypergraph. Chains are indexed
// into a dense matrix; S=0 pairs carry no edge, so unreached pairs stay at
// infinity after the shortest-path pass.
class ProjectedGraph {
 public:
  ProjectedGraph(Date date, std::vector<std::string> chains);

  Date date() const { return date_; }
  const std::vector<std::string>& chains() const { return chains_; }
  std::size_t size() const { return chains_.size(); }

  std::optional<std::size_t> index_of(const std::string& chain) const;

  double strength(std::size_t i, std::size_t j) const;
  // 1/(1+S) where S>0, nullopt otherwise.
  std::optional<double> delta(std::size_t i, std::size_t j) const;
  // Shortest-path distance; nullopt when unreachable.
  std::optional<double> shortest(std::size_t i, std::size_t j) const;

  friend ProjectedGraph project(const HypergraphSnapshot& snapshot);

 private:
  void add_strength(std::size_t i, std::size_t j, double w);
  void run_shortest_paths();  // Dijkstra from every source

  Date date_;
  std::vector<std::string> chains_;
  std::map<std::string, std::size_t> index_;
  std::vector<double> strengths_;  // dense n*n, symmetric
  std::vector<double> dist_;       // dense n*n, +inf = unreachable
};

ProjectedGraph project(const HypergraphSnapshot& snapshot);

// Bridge-category filter applied before projection (and to AAI flows).
enum class BridgeFilter { All, Official, ThirdParty, LockAndMint, BurnAndMint, LiquidityPool };

BridgeFilter parse_filter(const std::string& name);
std::string filter_name(BridgeFilter f);
bool filter_admits(BridgeFilter f, const BridgeMeta& meta);

// Daily snapshots over the flow panel's observed range. The chain universe
// is the taxonomy's attribute chains plus endpoint-only chains seen in
// flows.
std::vector<HypergraphSnapshot> build_snapshots(const FlowPanel& flows,
                                                const Taxonomy& tax,
                                                const HypergraphConfig& cfg,
                                                BridgeFilter filter = BridgeFilter::All);

}  // namespace interop
