#pragma once

#include <optional>
#include <string>
#include <vector>

#include "interop/graph.hpp"

namespace interop {

struct FlowAggregate {
  std::string chain_id;
  Date date;
  double inflow_usd = 0.0;
  double outflow_usd = 0.0;
};

// PSI_{ij} = (1/d_ij + 1/d_ji)/2; null when unreachable.
std::optional<double> psi(const ProjectedGraph& g, const std::string& i,
                          const std::string& j);

// ASI_i = sum of 1/d_ij over reachable j != i; 0 for isolated chains.
double asi(const ProjectedGraph& g, const std::string& i);

// AAI = (F_in + F_out)/TVL; null when TVL is null or below the floor.
inline constexpr double kTvlFloorUsd = 1000.0;
std::optional<double> aai(const FlowAggregate& flows,
                          std::optional<double> tvl_usd,
                          double tvl_floor = kTvlFloorUsd);

// Per-chain-day gross in/out USD totals, optionally restricted to one
// bridge category. Rows with null amounts contribute zero.
std::vector<FlowAggregate> aggregate_flows(const FlowPanel& flows,
                                           const Taxonomy& tax,
                                           BridgeFilter filter);

struct PsiPoint {
  Date date;
  std::string i, j;  // i < j
  std::optional<double> value;
};
struct AsiPoint {
  Date date;
  std::string chain;
  double value = 0.0;
};
struct AaiPoint {
  Date date;
  std::string chain;
  std::optional<double> value;
};

struct MetricSeries {
  BridgeFilter filter = BridgeFilter::All;
  std::vector<PsiPoint> psi;
  std::vector<AsiPoint> asi;
  std::vector<AaiPoint> aai;
};

// PSI/ASI from filtered snapshots, AAI from filtered flows joined against
// chain-panel TVL. Only attribute chains enter the metric panel;
// endpoint-only chains are flow-analytics citizens.
MetricSeries metric_series(const std::vector<HypergraphSnapshot>& snapshots,
                           const FlowPanel& flows, const ChainPanel& chains,
                           const Taxonomy& tax, BridgeFilter filter);

}  // namespace interop
