#include "interop/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "interop/csv.hpp"

namespace interop {

namespace {
constexpr double kProbs[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
}

double DayCDF::eval(double x) const {
  const double v[5] = {knots.min, knots.q1, knots.q2, knots.q3, knots.max};
  if (x < v[0]) return 0.0;
  double result = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (v[k + 1] <= x) {
      result = kProbs[k + 1];
    } else if (v[k] <= x) {
      double frac = (x - v[k]) / (v[k + 1] - v[k]);
      result = std::max(result, kProbs[k] + (kProbs[k + 1] - kProbs[k]) * frac);
    }
  }
  return result;
}

DayCDF day_cdf(const FiveNumberSummary& summary, long long count) {
  if (!summary.ordered()) {
    throw Error(ErrorCode::SummaryOrderViolation, "unordered five-number summary");
  }
  if (count < 1) {
    throw Error(ErrorCode::BadConfig, "day_cdf requires count >= 1");
  }
  return DayCDF{summary, count};
}

void MixtureCDF::add(DayCDF c) {
  total_weight += c.weight;
  components.push_back(std::move(c));
}

double MixtureCDF::eval(double x) const {
  double acc = 0.0;
  for (const auto& c : components) acc += double(c.weight) * c.eval(x);
  return acc / double(total_weight);
}

double MixtureCDF::min() const {
  double m = components.front().min();
  for (const auto& c : components) m = std::min(m, c.min());
  return m;
}

double MixtureCDF::max() const {
  double m = components.front().max();
  for (const auto& c : components) m = std::max(m, c.max());
  return m;
}

double mixture_quantile(const MixtureCDF& mix, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidProbability, std::to_string(p));
  }
  if (mix.components.empty() || mix.total_weight <= 0) {
    throw Error(ErrorCode::NoSummaries, "empty mixture");
  }
  double lo = mix.min();
  double hi = mix.max();
  if (p == 0.0) return lo;
  if (lo == hi) return lo;
  // invariant: F(hi) >= p, F(lo) may or may not reach p
  if (mix.eval(lo) >= p) return lo;
  double tol = 1e-9 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mix.eval(mid) >= p) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

DistMetric parse_dist_metric(const std::string& s) {
  auto t = lower(s);
  if (t == "value") return DistMetric::Value;
  if (t == "fee") return DistMetric::Fee;
  if (t == "latency") return DistMetric::Latency;
  throw Error(ErrorCode::BadConfig, "unknown metric '" + s + "'");
}

DistGroup parse_dist_group(const std::string& s) {
  auto t = lower(s);
  if (t == "bridge") return DistGroup::Bridge;
  if (t == "chain") return DistGroup::Chain;
  throw Error(ErrorCode::BadConfig, "unknown group '" + s + "'");
}

std::vector<WindowSummaryRow> window_summary(const FlowPanel& flows,
                                             DistGroup group,
                                             DistMetric metric) {
  struct Acc {
    MixtureCDF mix;
    long long n = 0;
    std::set<std::int32_t> days;
  };
  std::map<std::string, Acc> groups;

  auto summary_of = [&](const CorridorFlowRecord& r)
      -> const std::optional<FiveNumberSummary>& {
    switch (metric) {
      case DistMetric::Value: return r.value_summary;
      case DistMetric::Fee: return r.fee_summary;
      case DistMetric::Latency: return r.latency_summary;
    }
    return r.value_summary;
  };

  for (const auto& r : flows.rows) {
    if (r.transfer_count <= 0) continue;
    std::vector<std::string> keys;
    if (group == DistGroup::Bridge) {
      keys = {r.bridge_id};
    } else {
      keys = {r.src_chain, r.dst_chain};
    }
    for (const auto& key : keys) {
      Acc& acc = groups[key];
      acc.n += r.transfer_count;
      acc.days.insert(r.date.days());
      // days with a count but no summary stay in n/d but carry no mass
      if (const auto& s = summary_of(r)) {
        acc.mix.add(day_cdf(*s, r.transfer_count));
      }
    }
  }

  std::vector<WindowSummaryRow> out;
  for (auto& [entity, acc] : groups) {
    WindowSummaryRow row;
    row.entity = entity;
    row.n = acc.n;
    row.d = static_cast<long long>(acc.days.size());
    if (!acc.mix.components.empty()) {
      row.q1 = mixture_quantile(acc.mix, 0.25);
      row.q2 = mixture_quantile(acc.mix, 0.5);
      row.q3 = mixture_quantile(acc.mix, 0.75);
      row.iqr = *row.q3 - *row.q1;
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace interop
