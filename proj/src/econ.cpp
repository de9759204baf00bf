#include "interop/econ.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

namespace interop {

double signed_log(double x) {
  return x >= 0 ? std::log1p(x) : -std::log1p(-x);
}

OptSeries ma7(const OptSeries& series) {
  OptSeries out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t k = t >= 6 ? t - 6 : 0; k <= t; ++k) {
      if (series[k]) {
        sum += *series[k];
        ++count;
      }
    }
    if (count >= 4) out[t] = sum / count;
  }
  return out;
}

OptSeries forward_return(const OptSeries& prices, int k) {
  OptSeries out(prices.size());
  for (std::size_t t = 0; t + k < prices.size(); ++t) {
    if (prices[t] && prices[t + k] && *prices[t] > 0) {
      out[t] = *prices[t + k] / *prices[t] - 1.0;
    }
  }
  return out;
}

OptSeries forward_net_inflow(const std::vector<double>& inflow,
                             const std::vector<double>& outflow,
                             int horizon) {
  OptSeries out(inflow.size());
  for (std::size_t t = 0; t + horizon < inflow.size(); ++t) {
    double net = 0.0;
    for (int h = 1; h <= horizon; ++h) {
      net += inflow[t + h] - outflow[t + h];
    }
    out[t] = signed_log(net);
  }
  return out;
}

OptSeries rolling_corr(const OptSeries& x, const OptSeries& y, int window) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::JoinKeyMismatch, "rolling_corr length mismatch");
  }
  OptSeries out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (t + 1 < std::size_t(window)) continue;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = t + 1 - window; k <= t; ++k) {
      if (x[k] && y[k]) {
        double a = *x[k], b = *y[k];
        sx += a; sy += b; sxx += a * a; syy += b * b; sxy += a * b;
        ++n;
      }
    }
    if (n < window) continue;
    double cov = sxy - sx * sy / n;
    double vx = sxx - sx * sx / n;
    double vy = syy - sy * sy / n;
    if (vx <= 0 || vy <= 0) continue;
    out[t] = cov / std::sqrt(vx * vy);
  }
  return out;
}

OptSeries& FeaturePanel::column(const std::string& name) {
  auto it = columns.find(name);
  if (it == columns.end()) {
    it = columns.emplace(name, OptSeries(n_rows())).first;
  }
  return it->second;
}

const OptSeries& FeaturePanel::column(const std::string& name) const {
  auto it = columns.find(name);
  if (it == columns.end()) {
    throw Error(ErrorCode::JoinKeyMismatch, "no column '" + name + "'");
  }
  return it->second;
}

std::size_t FeaturePanel::add_row(const std::string& u, Date d) {
  unit.push_back(u);
  date.push_back(d);
  for (auto& [name, col] : columns) col.emplace_back();
  return unit.size() - 1;
}

double student_t_two_sided_p(double t, double dof) {
  if (dof <= 0) return 1.0;
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

namespace {

// iterated alternating group demeaning until max cell change < 1e-10
void absorb_fixed_effects(Eigen::MatrixXd& M,
                          const std::vector<int>& unit_id,
                          const std::vector<int>& time_id, int n_units,
                          int n_times, bool fe_unit, bool fe_time) {
  const double tol = 1e-10;
  const long n = M.rows();
  Eigen::VectorXd group_sum;
  Eigen::VectorXi group_cnt;
  for (int iter = 0; iter < 1000; ++iter) {
    double max_change = 0.0;
    for (long c = 0; c < M.cols(); ++c) {
      if (fe_unit) {
        group_sum.setZero(n_units);
        group_cnt.setZero(n_units);
        for (long r = 0; r < n; ++r) {
          group_sum[unit_id[r]] += M(r, c);
          group_cnt[unit_id[r]] += 1;
        }
        for (long r = 0; r < n; ++r) {
          double mean = group_sum[unit_id[r]] / group_cnt[unit_id[r]];
          max_change = std::max(max_change, std::fabs(mean));
          M(r, c) -= mean;
        }
      }
      if (fe_time) {
        group_sum.setZero(n_times);
        group_cnt.setZero(n_times);
        for (long r = 0; r < n; ++r) {
          group_sum[time_id[r]] += M(r, c);
          group_cnt[time_id[r]] += 1;
        }
        for (long r = 0; r < n; ++r) {
          double mean = group_sum[time_id[r]] / group_cnt[time_id[r]];
          max_change = std::max(max_change, std::fabs(mean));
          M(r, c) -= mean;
        }
      }
    }
    if (!(fe_unit && fe_time)) break;  // one pass is an exact projection
    if (max_change < tol) break;
  }
}

}  // namespace

const CoefStat& RegressionResult::coef(const std::string& name) const {
  for (const auto& c : coefs) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::JoinKeyMismatch, "no coefficient '" + name + "'");
}

RegressionResult twfe_ols(const FeaturePanel& panel,
                          const RegressionSpec& spec) {
  for (const auto& r : spec.regressors) {
    if (r == spec.outcome) {
      throw Error(ErrorCode::BadConfig, "outcome among regressors");
    }
  }
  const OptSeries& y_col = panel.column(spec.outcome);
  std::vector<const OptSeries*> x_cols;
  for (const auto& r : spec.regressors) x_cols.push_back(&panel.column(r));

  // listwise deletion
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < panel.n_rows(); ++i) {
    bool ok = y_col[i].has_value();
    for (const auto* c : x_cols) ok = ok && (*c)[i].has_value();
    if (ok) keep.push_back(i);
  }
  const std::size_t n = keep.size();
  const std::size_t k = spec.regressors.size();

  // compact unit/time ids over surviving rows
  std::map<std::string, int> units;
  std::map<std::int32_t, int> times;
  std::vector<int> unit_id(n), time_id(n);
  for (std::size_t r = 0; r < n; ++r) {
    unit_id[r] = units.emplace(panel.unit[keep[r]], int(units.size()))
                     .first->second;
    time_id[r] = times.emplace(panel.date[keep[r]].days(), int(times.size()))
                     .first->second;
  }
  if (spec.fe_unit && spec.fe_time &&
      (units.size() < 2 || times.size() < 2)) {
    throw Error(ErrorCode::InsufficientVariation,
                "two-way FE needs >= 2 units and >= 2 periods");
  }
  long absorbed = 0;
  if (spec.fe_unit) absorbed += long(units.size());
  if (spec.fe_time) absorbed += long(times.size());
  if (spec.fe_unit && spec.fe_time) absorbed -= 1;
  if (!spec.fe_unit && !spec.fe_time) absorbed = 1;  // intercept
  long dof = long(n) - long(k) - absorbed;
  if (dof < 1) {
    throw Error(ErrorCode::InsufficientVariation,
                "not enough observations: n=" + std::to_string(n));
  }

  // assemble [y | X] and absorb effects jointly
  Eigen::MatrixXd M(n, k + 1);
  for (std::size_t r = 0; r < n; ++r) {
    M(r, 0) = *y_col[keep[r]];
    for (std::size_t c = 0; c < k; ++c) M(r, c + 1) = *(*x_cols[c])[keep[r]];
  }
  Eigen::VectorXd y_raw = M.col(0);
  if (spec.fe_unit || spec.fe_time) {
    absorb_fixed_effects(M, unit_id, time_id, int(units.size()),
                         int(times.size()), spec.fe_unit, spec.fe_time);
  } else {
    Eigen::RowVectorXd mean = M.colwise().mean();
    M.rowwise() -= mean;
  }
  Eigen::VectorXd y = M.col(0);
  Eigen::MatrixXd X = M.rightCols(k);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (std::size_t(qr.rank()) < k) {
    throw Error(ErrorCode::RankDeficient,
                "rank " + std::to_string(qr.rank()) + " < " +
                    std::to_string(k) + " regressors after absorption");
  }
  Eigen::VectorXd beta = qr.solve(y);
  Eigen::VectorXd resid = y - X * beta;

  double ssr = resid.squaredNorm();
  double tss_within = y.squaredNorm();  // demeaned outcome
  double mean_raw = y_raw.mean();
  double tss_raw = (y_raw.array() - mean_raw).square().sum();

  Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd cov;
  if (spec.se_mode == SeMode::Classical) {
    cov = (ssr / double(dof)) * xtx_inv;
  } else {
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t r = 0; r < n; ++r) {
      meat.noalias() += resid[r] * resid[r] * X.row(r).transpose() * X.row(r);
    }
    cov = xtx_inv * meat * xtx_inv * (double(n) / double(dof));
  }

  RegressionResult result;
  result.n_obs = n;
  result.dropped_rows = panel.n_rows() - n;
  result.r2_within = tss_within > 0 ? 1.0 - ssr / tss_within : 0.0;
  result.r2_overall = tss_raw > 0 ? 1.0 - ssr / tss_raw : 0.0;
  result.residuals.assign(resid.data(), resid.data() + resid.size());
  for (std::size_t c = 0; c < k; ++c) {
    CoefStat cs;
    cs.name = spec.regressors[c];
    cs.coef = beta[c];
    cs.se = std::sqrt(std::max(0.0, cov(c, c)));
    cs.t = cs.se > 0 ? cs.coef / cs.se : 0.0;
    cs.p = cs.se > 0 ? student_t_two_sided_p(cs.t, double(dof)) : 1.0;
    result.coefs.push_back(std::move(cs));
  }
  return result;
}

RegressionResult did(const FeaturePanel& panel,
                     const std::set<std::string>& treated, Date event_date,
                     const RegressionSpec& spec) {
  std::set<std::string> units(panel.unit.begin(), panel.unit.end());
  std::size_t n_treated = 0;
  for (const auto& u : units) n_treated += treated.count(u);
  if (n_treated == 0 || n_treated == units.size()) {
    throw Error(ErrorCode::DegenerateTreatment,
                std::to_string(n_treated) + " of " +
                    std::to_string(units.size()) + " units treated");
  }

  FeaturePanel augmented = panel;
  OptSeries& treat = augmented.column("treat");
  OptSeries& post = augmented.column("post");
  OptSeries& tp = augmented.column("treat_post");
  for (std::size_t i = 0; i < augmented.n_rows(); ++i) {
    double tr = treated.count(augmented.unit[i]) ? 1.0 : 0.0;
    double po = augmented.date[i] >= event_date ? 1.0 : 0.0;
    treat[i] = tr;
    post[i] = po;
    tp[i] = tr * po;
  }

  RegressionSpec did_spec = spec;
  did_spec.regressors.clear();
  did_spec.regressors.push_back("treat_post");
  for (const auto& r : spec.regressors) {
    if (r != "treat_post") did_spec.regressors.push_back(r);
  }
  return twfe_ols(augmented, did_spec);
}

std::vector<std::vector<PearsonCell>> pearson_matrix(
    const std::vector<OptSeries>& columns) {
  const std::size_t m = columns.size();
  std::vector<std::vector<PearsonCell>> out(m, std::vector<PearsonCell>(m));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      std::size_t n = 0;
      std::size_t len = std::min(columns[a].size(), columns[b].size());
      for (std::size_t i = 0; i < len; ++i) {
        if (columns[a][i] && columns[b][i]) {
          double x = *columns[a][i], y = *columns[b][i];
          sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
          ++n;
        }
      }
      if (n < 3) {
        throw Error(ErrorCode::InsufficientPairs,
                    "columns " + std::to_string(a) + "," + std::to_string(b) +
                        ": " + std::to_string(n) + " paired observations");
      }
      PearsonCell cell;
      cell.n = n;
      double cov = sxy - sx * sy / double(n);
      double vx = sxx - sx * sx / double(n);
      double vy = syy - sy * sy / double(n);
      if (a == b) {
        cell.r = 1.0;
        cell.p = 0.0;
      } else if (vx > 0 && vy > 0) {
        cell.r = cov / std::sqrt(vx * vy);
        cell.r = std::clamp(cell.r, -1.0, 1.0);
        if (std::fabs(cell.r) >= 1.0) {
          cell.p = 0.0;
        } else {
          double t = cell.r * std::sqrt(double(n - 2) / (1.0 - cell.r * cell.r));
          cell.p = student_t_two_sided_p(t, double(n - 2));
        }
      }
      out[a][b] = cell;
      out[b][a] = cell;
    }
  }
  return out;
}

FeaturePanel build_feature_panel(const std::vector<MetricSeries>& metrics,
                                 const ChainPanel& chains, const Taxonomy& tax,
                                 const PanelBuildOptions& opts) {
  FeaturePanel panel;

  // dense per-chain date spine from the chain panel
  std::map<std::string, std::pair<Date, Date>> spans;
  for (const auto& r : chains.rows) {
    auto it = spans.find(r.chain_id);
    if (it == spans.end()) {
      spans.emplace(r.chain_id, std::make_pair(r.date, r.date));
    } else {
      it->second.first = std::min(it->second.first, r.date);
      it->second.second = std::max(it->second.second, r.date);
    }
  }
  std::map<std::pair<std::string, std::int32_t>, std::size_t> row_of;
  for (const auto& [chain, span] : spans) {
    for (Date d = span.first; d <= span.second; d = d + 1) {
      row_of[{chain, d.days()}] = panel.add_row(chain, d);
    }
  }

  auto set_cell = [&](const std::string& col, const std::string& chain,
                      Date d, std::optional<double> v) {
    auto it = row_of.find({chain, d.days()});
    if (it != row_of.end()) panel.column(col)[it->second] = v;
  };

  // raw attributes
  for (const auto& r : chains.rows) {
    set_cell("tvl", r.chain_id, r.date, r.tvl_usd);
    set_cell("dau", r.chain_id, r.date,
             r.daily_active_users
                 ? std::optional<double>(double(*r.daily_active_users))
                 : std::nullopt);
    set_cell("new_contracts", r.chain_id, r.date,
             r.new_contracts_count
                 ? std::optional<double>(double(*r.new_contracts_count))
                 : std::nullopt);
    set_cell("gas_used", r.chain_id, r.date, r.total_gas_used);
    set_cell("gas_usd", r.chain_id, r.date, r.total_gas_usd);
    set_cell("median_gas_usd", r.chain_id, r.date, r.median_gas_usd);
    set_cell("price", r.chain_id, r.date, r.close_price_usd);
    set_cell("volume", r.chain_id, r.date, r.volume_usd);
  }

  // metric columns, one pair per filter ("asi", "asi_official", ...)
  for (const auto& series : metrics) {
    std::string suffix = series.filter == BridgeFilter::All
                             ? ""
                             : "_" + filter_name(series.filter);
    for (const auto& pt : series.asi) {
      set_cell("asi" + suffix, pt.chain, pt.date, pt.value);
    }
    for (const auto& pt : series.aai) {
      set_cell("aai" + suffix, pt.chain, pt.date, pt.value);
    }
  }

  // derived columns, per chain over its dense spine
  std::vector<std::string> level_cols = {"tvl",     "dau",       "new_contracts",
                                         "gas_used", "gas_usd",  "median_gas_usd"};
  for (const auto& [chain, span] : spans) {
    std::size_t first = row_of.at({chain, span.first.days()});
    std::size_t len = std::size_t(span.second - span.first) + 1;
    auto slice = [&](const std::string& col) {
      const OptSeries& full = panel.column(col);
      return OptSeries(full.begin() + first, full.begin() + first + len);
    };
    auto write_back = [&](const std::string& col, const OptSeries& s) {
      OptSeries& full = panel.column(col);
      std::copy(s.begin(), s.end(), full.begin() + first);
    };

    if (opts.log1p_levels) {
      for (const auto& col : level_cols) {
        OptSeries s = slice(col);
        for (auto& v : s) {
          if (v) v = std::log1p(*v);
        }
        write_back("ln_" + col, s);
      }
    }
    if (opts.ma7_levels) {
      write_back("tvl_ma7", ma7(slice(opts.log1p_levels ? "ln_tvl" : "tvl")));
    }
    OptSeries price = slice("price");
    for (int k : opts.return_horizons) {
      write_back("fwd_return_" + std::to_string(k), forward_return(price, k));
    }
    // trailing token return as a control
    {
      int k = opts.trailing_return_days;
      OptSeries trail(price.size());
      for (std::size_t t = std::size_t(k); t < price.size(); ++t) {
        if (price[t] && price[t - k] && *price[t - k] > 0) {
          trail[t] = *price[t] / *price[t - k] - 1.0;
        }
      }
      write_back("token_return", trail);
    }
  }

  if (opts.interactions) {
    OptSeries& is_evm = panel.column("is_evm");
    OptSeries& is_l1 = panel.column("is_l1");
    for (std::size_t i = 0; i < panel.n_rows(); ++i) {
      auto it = tax.chains.find(panel.unit[i]);
      if (it == tax.chains.end()) continue;
      is_evm[i] = it->second.is_evm ? 1.0 : 0.0;
      is_l1[i] = it->second.is_l1() ? 1.0 : 0.0;
    }
    for (const char* base : {"asi", "aai"}) {
      if (!panel.has_column(base)) continue;
      const OptSeries src = panel.column(base);
      OptSeries& x_evm = panel.column(std::string(base) + "_x_isevm");
      OptSeries& x_l1 = panel.column(std::string(base) + "_x_isl1");
      for (std::size_t i = 0; i < panel.n_rows(); ++i) {
        if (src[i] && is_evm[i]) x_evm[i] = *src[i] * *is_evm[i];
        if (src[i] && is_l1[i]) x_l1[i] = *src[i] * *is_l1[i];
      }
    }
  }
  return panel;
}

void add_forward_net_inflow(FeaturePanel& panel, const FlowPanel& flows,
                            const Taxonomy& tax, int horizon) {
  auto aggregates = aggregate_flows(flows, tax, BridgeFilter::All);
  std::map<std::pair<std::string, std::int32_t>, std::pair<double, double>>
      by_day;
  for (const auto& fa : aggregates) {
    by_day[{fa.chain_id, fa.date.days()}] = {fa.inflow_usd, fa.outflow_usd};
  }

  // panel rows are contiguous per chain (dense spine from the builder)
  OptSeries& out = panel.column("fwd_net_inflow");
  std::size_t i = 0;
  while (i < panel.n_rows()) {
    std::size_t j = i;
    while (j + 1 < panel.n_rows() && panel.unit[j + 1] == panel.unit[i] &&
           panel.date[j + 1] - panel.date[j] == 1) {
      ++j;
    }
    std::size_t len = j - i + 1;
    std::vector<double> inflow(len, 0.0), outflow(len, 0.0);
    for (std::size_t t = 0; t < len; ++t) {
      auto it = by_day.find({panel.unit[i], panel.date[i + t].days()});
      if (it != by_day.end()) {
        inflow[t] = it->second.first;
        outflow[t] = it->second.second;
      }
    }
    OptSeries series = forward_net_inflow(inflow, outflow, horizon);
    for (std::size_t t = 0; t < len; ++t) out[i + t] = series[t];
    i = j + 1;
  }
}

FeaturePanel build_pair_panel(const MetricSeries& metrics,
                              const ChainPanel& chains, const FlowPanel& flows,
                              const Taxonomy& tax, int corr_window) {
  // per-chain dense TVL series over the common window
  std::set<std::string> chain_set;
  for (const auto& [id, meta] : tax.chains) chain_set.insert(id);
  Date start(INT32_MAX), end(INT32_MIN);
  for (const auto& r : chains.rows) {
    start = std::min(start, r.date);
    end = std::max(end, r.date);
  }
  if (chains.rows.empty()) return {};
  std::size_t len = std::size_t(end - start) + 1;

  std::map<std::string, OptSeries> tvl;
  for (const auto& c : chain_set) tvl[c] = OptSeries(len);
  for (const auto& r : chains.rows) {
    if (tvl.count(r.chain_id)) tvl[r.chain_id][r.date - start] = r.tvl_usd;
  }

  // PSI lookup and gross corridor flow per (pair, day)
  std::map<std::tuple<std::string, std::string, std::int32_t>, double> psi_at;
  for (const auto& pt : metrics.psi) {
    if (pt.value) psi_at[{pt.i, pt.j, pt.date.days()}] = *pt.value;
  }
  std::map<std::tuple<std::string, std::string, std::int32_t>, double> gross;
  for (const auto& r : flows.rows) {
    if (!chain_set.count(r.src_chain) || !chain_set.count(r.dst_chain)) {
      continue;
    }
    auto key = r.src_chain < r.dst_chain
                   ? std::make_tuple(r.src_chain, r.dst_chain, r.date.days())
                   : std::make_tuple(r.dst_chain, r.src_chain, r.date.days());
    gross[key] += r.total_amount_usd.value_or(0.0);
  }

  FeaturePanel panel;
  std::vector<std::string> ordered(chain_set.begin(), chain_set.end());
  for (std::size_t a = 0; a < ordered.size(); ++a) {
    for (std::size_t b = a + 1; b < ordered.size(); ++b) {
      const std::string& ci = ordered[a];
      const std::string& cj = ordered[b];
      OptSeries rho = rolling_corr(tvl[ci], tvl[cj], corr_window);
      for (std::size_t t = 0; t < len; ++t) {
        if (!rho[t]) continue;
        Date d = start + int(t);
        std::size_t row = panel.add_row(ci + "|" + cj, d);
        panel.column("rho_tvl")[row] = rho[t];
        if (auto it = psi_at.find({ci, cj, d.days()}); it != psi_at.end()) {
          panel.column("psi")[row] = it->second;
        }
        double g = 0.0;
        if (auto it = gross.find({ci, cj, d.days()}); it != gross.end()) {
          g = it->second;
        }
        panel.column("ln_flow")[row] = std::log1p(g);
      }
    }
  }
  return panel;
}

}  // namespace interop
