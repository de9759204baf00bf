#pragma once

#include <limits>
#include <random>
#include <vector>

#include "interop/graph.hpp"

// Test-only reference implementations, independent of the production path.
namespace oracles {

// Floyd–Warshall over the projected graph's delta edges.
inline std::vector<std::vector<double>> floyd_warshall(
    const interop::ProjectedGraph& g) {
  const std::size_t n = g.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (auto e = g.delta(i, j)) d[i][j] = *e;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  return d;
}

// Random snapshot with <= max_chains chains and <= max_bridges hyperedges.
inline interop::HypergraphSnapshot random_snapshot(std::mt19937_64& rng,
                                                   int max_chains = 12,
                                                   int max_bridges = 8) {
  using namespace interop;
  std::uniform_int_distribution<int> n_chains(3, max_chains);
  int n = n_chains(rng);
  HypergraphSnapshot snap;
  snap.date = Date::parse("2023-01-01");
  std::vector<std::string> chains;
  for (int i = 0; i < n; ++i) {
    std::string id = "chain" + std::to_string(i);
    chains.push_back(id);
    snap.chain_universe.insert(id);
  }
  HypergraphConfig cfg;
  cfg.n_total = n;
  std::uniform_int_distribution<int> n_bridges(1, max_bridges);
  int b = n_bridges(rng);
  for (int k = 0; k < b; ++k) {
    std::uniform_int_distribution<int> size_dist(2, n);
    int size = size_dist(rng);
    Hyperedge e;
    e.bridge_id = "bridge" + std::to_string(k);
    std::vector<std::string> pool = chains;
    std::shuffle(pool.begin(), pool.end(), rng);
    e.members.insert(pool.begin(), pool.begin() + size);
    e.weight = hyperedge_weight(size, cfg);
    snap.hyperedges.push_back(std::move(e));
  }
  return snap;
}

// Random hyperedge over the snapshot's universe.
inline interop::Hyperedge random_hyperedge(std::mt19937_64& rng,
                                           const interop::HypergraphSnapshot& snap) {
  using namespace interop;
  std::vector<std::string> pool(snap.chain_universe.begin(),
                                snap.chain_universe.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  std::uniform_int_distribution<int> size_dist(2, int(pool.size()));
  int size = size_dist(rng);
  Hyperedge e;
  e.bridge_id = "extra";
  e.members.insert(pool.begin(), pool.begin() + size);
  HypergraphConfig cfg;
  cfg.n_total = int(pool.size());
  e.weight = hyperedge_weight(size, cfg);
  return e;
}

}  // namespace oracles
