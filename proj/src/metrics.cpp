#include "interop/metrics.hpp"

#include <algorithm>
#include <map>

namespace interop {

std::optional<double> psi(const ProjectedGraph& g, const std::string& i,
                          const std::string& j) {
  if (i == j) throw Error(ErrorCode::SameChain, i);
  auto a = g.index_of(i);
  auto b = g.index_of(j);
  if (!a || !b) throw Error(ErrorCode::UnknownChain, !a ? i : j);
  auto d_ij = g.shortest(*a, *b);
  auto d_ji = g.shortest(*b, *a);
  if (!d_ij || !d_ji) return std::nullopt;
  return 0.5 * (1.0 / *d_ij + 1.0 / *d_ji);
}

double asi(const ProjectedGraph& g, const std::string& i) {
  auto a = g.index_of(i);
  if (!a) throw Error(ErrorCode::UnknownChain, i);
  double sum = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j == *a) continue;
    if (auto d = g.shortest(*a, j)) sum += 1.0 / *d;
  }
  return sum;
}

std::optional<double> aai(const FlowAggregate& flows,
                          std::optional<double> tvl_usd, double tvl_floor) {
  if (!tvl_usd || *tvl_usd <= tvl_floor) return std::nullopt;
  return (flows.inflow_usd + flows.outflow_usd) / *tvl_usd;
}

std::vector<FlowAggregate> aggregate_flows(const FlowPanel& flows,
                                           const Taxonomy& tax,
                                           BridgeFilter filter) {
  std::map<std::pair<std::string, std::int32_t>, FlowAggregate> agg;
  for (const auto& r : flows.rows) {
    if (!filter_admits(filter, tax.bridge(r.bridge_id))) continue;
    double amount = r.total_amount_usd.value_or(0.0);
    auto& in = agg[{r.dst_chain, r.date.days()}];
    in.chain_id = r.dst_chain;
    in.date = r.date;
    in.inflow_usd += amount;
    auto& out = agg[{r.src_chain, r.date.days()}];
    out.chain_id = r.src_chain;
    out.date = r.date;
    out.outflow_usd += amount;
  }
  std::vector<FlowAggregate> out;
  out.reserve(agg.size());
  for (auto& [k, v] : agg) out.push_back(std::move(v));
  return out;
}

MetricSeries metric_series(const std::vector<HypergraphSnapshot>& snapshots,
                           const FlowPanel& flows, const ChainPanel& chains,
                           const Taxonomy& tax, BridgeFilter filter) {
  MetricSeries series;
  series.filter = filter;

  // attribute chains only; endpoint-only ids stay out of the metric panel
  std::vector<std::string> metric_chains;
  for (const auto& [id, meta] : tax.chains) metric_chains.push_back(id);
  std::sort(metric_chains.begin(), metric_chains.end());

  for (const auto& snap : snapshots) {
    HypergraphSnapshot filtered;
    filtered.date = snap.date;
    filtered.chain_universe = snap.chain_universe;
    for (const auto& e : snap.hyperedges) {
      if (filter_admits(filter, tax.bridge(e.bridge_id))) {
        filtered.hyperedges.push_back(e);
      }
    }
    ProjectedGraph g = project(filtered);
    for (std::size_t a = 0; a < metric_chains.size(); ++a) {
      series.asi.push_back({snap.date, metric_chains[a],
                            asi(g, metric_chains[a])});
      for (std::size_t b = a + 1; b < metric_chains.size(); ++b) {
        series.psi.push_back({snap.date, metric_chains[a], metric_chains[b],
                              psi(g, metric_chains[a], metric_chains[b])});
      }
    }
  }

  // AAI over every chain-day in the attribute panel; days without flows
  // count as zero gross flow, not as missing.
  std::map<std::pair<std::string, std::int32_t>, FlowAggregate> agg;
  for (auto& fa : aggregate_flows(flows, tax, filter)) {
    agg[{fa.chain_id, fa.date.days()}] = fa;
  }
  for (const auto& rec : chains.rows) {
    FlowAggregate fa{rec.chain_id, rec.date, 0.0, 0.0};
    if (auto it = agg.find({rec.chain_id, rec.date.days()}); it != agg.end()) {
      fa = it->second;
    }
    series.aai.push_back({rec.date, rec.chain_id, aai(fa, rec.tvl_usd)});
  }
  return series;
}

}  // namespace interop
