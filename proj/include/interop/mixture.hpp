#pragma once

#include <optional>
#include <string>
#include <vector>

#include "interop/panel.hpp"

namespace interop {

// One day's five-number summary read as a piecewise-linear CDF with knots
// at probabilities 0, .25, .5, .75, 1. Ties between adjacent knot values
// become vertical steps; evaluation is right-continuous.
struct DayCDF {
  FiveNumberSummary knots;
  long long weight = 1;  // transfer count

  double min() const { return knots.min; }
  double max() const { return knots.max; }
  double eval(double x) const;  // F(x) in [0,1]
};

DayCDF day_cdf(const FiveNumberSummary& summary, long long count);

struct MixtureCDF {
  std::vector<DayCDF> components;
  long long total_weight = 0;

  void add(DayCDF c);
  double eval(double x) const;
  double min() const;
  double max() const;
};

// Generalized inverse inf{x : F(x) >= p}, bisected to 1e-9 relative
// tolerance on the support.
double mixture_quantile(const MixtureCDF& mix, double p);

enum class DistMetric { Value, Fee, Latency };
enum class DistGroup { Bridge, Chain };

DistMetric parse_dist_metric(const std::string& s);
DistGroup parse_dist_group(const std::string& s);

struct WindowSummaryRow {
  std::string entity;
  long long n = 0;  // total transfers, incl. days lacking a summary
  long long d = 0;  // active days (transfer_count > 0)
  std::optional<double> q1, q2, q3, iqr;  // null when no day had a summary
};

// Per-group window quartiles via the count-weighted mixture. Chain
// grouping attributes each corridor-day to both endpoints.
std::vector<WindowSummaryRow> window_summary(const FlowPanel& flows,
                                             DistGroup group,
                                             DistMetric metric);

}  // namespace interop
