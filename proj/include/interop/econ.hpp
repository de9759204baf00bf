#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "interop/metrics.hpp"

namespace interop {

using OptSeries = std::vector<std::optional<double>>;

// sign(x) * ln(1 + |x|)
double signed_log(double x);

// Trailing 7-day mean; null unless >= 4 non-null observations in the
// window. Input is a dense daily series.
OptSeries ma7(const OptSeries& series);

// P_{t+k}/P_t - 1 aligned at t; null when either endpoint is missing.
OptSeries forward_return(const OptSeries& prices, int k);

// signed_log of net inflow summed over (t+1 .. t+horizon); null when the
// horizon runs past the series end.
OptSeries forward_net_inflow(const std::vector<double>& inflow,
                             const std::vector<double>& outflow,
                             int horizon = 7);

// Pearson correlation over a trailing window; null when fewer than
// `window` non-null pairs or either side has zero variance.
OptSeries rolling_corr(const OptSeries& x, const OptSeries& y, int window);

// Long-format column store keyed by (unit, date).
struct FeaturePanel {
  std::vector<std::string> unit;
  std::vector<Date> date;
  std::map<std::string, OptSeries> columns;

  std::size_t n_rows() const { return unit.size(); }
  OptSeries& column(const std::string& name);
  const OptSeries& column(const std::string& name) const;
  bool has_column(const std::string& name) const {
    return columns.count(name) > 0;
  }
  // appends a row with all existing columns null
  std::size_t add_row(const std::string& u, Date d);
};

enum class SeMode { Classical, Hc1 };

struct RegressionSpec {
  std::string outcome;
  std::vector<std::string> regressors;
  bool fe_unit = true;
  bool fe_time = true;
  SeMode se_mode = SeMode::Classical;
};

struct CoefStat {
  std::string name;
  double coef = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 1.0;
};

struct RegressionResult {
  std::vector<CoefStat> coefs;
  std::size_t n_obs = 0;
  std::size_t dropped_rows = 0;
  double r2_within = 0.0;
  double r2_overall = 0.0;
  std::vector<double> residuals;

  const CoefStat& coef(const std::string& name) const;
};

// Two-way fixed-effects OLS: absorbs the requested effects by iterated
// group demeaning (max cell change < 1e-10), then solves by QR.
RegressionResult twfe_ols(const FeaturePanel& panel,
                          const RegressionSpec& spec);

// DiD around an event date: builds Treat x Post ("treat_post") and
// estimates via twfe_ols with the spec's controls.
RegressionResult did(const FeaturePanel& panel,
                     const std::set<std::string>& treated, Date event_date,
                     const RegressionSpec& spec);

struct PearsonCell {
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

// Pairwise-complete Pearson matrix with two-sided t-test p-values.
std::vector<std::vector<PearsonCell>> pearson_matrix(
    const std::vector<OptSeries>& columns);

// Two-sided Student-t tail probability, P(|T_dof| >= |t|).
double student_t_two_sided_p(double t, double dof);

// Joins metric series (one per filter) with chain attributes and
// materializes the derived and interaction columns used by the
// regression suite.
struct PanelBuildOptions {
  std::vector<int> return_horizons = {1, 3, 7, 15, 30, 100};
  int net_inflow_horizon = 7;
  int trailing_return_days = 7;  // "recent token return" control
  bool log1p_levels = true;
  bool ma7_levels = true;
  bool interactions = true;
};

FeaturePanel build_feature_panel(const std::vector<MetricSeries>& metrics,
                                 const ChainPanel& chains, const Taxonomy& tax,
                                 const PanelBuildOptions& opts = {});

// Adds the "fwd_net_inflow" column: signed-log net USD inflow summed over
// the next `horizon` days, per chain.
void add_forward_net_inflow(FeaturePanel& panel, const FlowPanel& flows,
                            const Taxonomy& tax, int horizon = 7);

// Pair-level panel for the comovement regressions: rolling TVL correlation
// as outcome, PSI and log1p gross corridor flow as regressors.
FeaturePanel build_pair_panel(const MetricSeries& metrics,
                              const ChainPanel& chains, const FlowPanel& flows,
                              const Taxonomy& tax, int corr_window);

}  // namespace interop
