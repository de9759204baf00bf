#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "interop/csv.hpp"
#include "interop/pipeline.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace interop;

namespace {

struct CommonInputs {
  std::string chains_path, flows_path, meta_path;

  Taxonomy tax() const { return Taxonomy::load(meta_path); }
};

void add_inputs(CLI::App* cmd, CommonInputs& in, bool need_chains = true) {
  if (need_chains) {
    cmd->add_option("--chains", in.chains_path, "chain-day panel CSV")
        ->required();
  }
  cmd->add_option("--flows", in.flows_path, "bridge-corridor flow CSV")
      ->required();
  cmd->add_option("--meta", in.meta_path, "taxonomy JSON")->required();
}

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : "";
}

void write_regression_csv(const std::string& path,
                          const RegressionResult& res) {
  CsvWriter w(path);
  w.row({"regressor", "coef", "se", "t", "p"});
  for (const auto& c : res.coefs) {
    w.row({c.name, format_double(c.coef), format_double(c.se),
           format_double(c.t), format_double(c.p)});
  }
  w.row({"n_obs", std::to_string(res.n_obs), "", "", ""});
  w.row({"r2_within", format_double(res.r2_within), "", "", ""});
  w.row({"r2_overall", format_double(res.r2_overall), "", "", ""});
}

FeaturePanel load_standard_panel(const CommonInputs& in,
                                 const HypergraphConfig& cfg,
                                 const std::vector<BridgeFilter>& filters,
                                 const Taxonomy& tax) {
  ChainPanel chains = load_chain_panel(in.chains_path, tax);
  FlowPanel flows = load_flow_panel(in.flows_path, tax);
  auto snapshots = build_snapshots(flows, tax, cfg);
  std::vector<MetricSeries> metrics;
  for (BridgeFilter f : filters) {
    metrics.push_back(metric_series(snapshots, flows, chains, tax, f));
  }
  FeaturePanel panel = build_feature_panel(metrics, chains, tax);
  add_forward_net_inflow(panel, flows, tax);
  return panel;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interop-lens: cross-chain interoperability analytics"};
  app.require_subcommand(1);

  CommonInputs in;
  std::string out_dir = "out";
  std::string out_file;

  // validate
  auto* validate_cmd =
      app.add_subcommand("validate", "load panels and print a validation report");
  add_inputs(validate_cmd, in);

  // graph
  auto* graph_cmd = app.add_subcommand(
      "graph", "daily projected-graph edge lists (date,i,j,S,delta,d)");
  add_inputs(graph_cmd, in, false);
  HypergraphConfig hcfg;
  std::string rule = "cumulative";
  graph_cmd->add_option("--alpha", hcfg.alpha, "hyperedge weight scale");
  graph_cmd->add_option("--theta", hcfg.theta, "coverage exponent");
  graph_cmd->add_option("--n-total", hcfg.n_total, "chain universe size");
  graph_cmd->add_option("--rule", rule, "cumulative or rolling");
  graph_cmd->add_option("--window-days", hcfg.membership_window_days,
                        "rolling membership window");
  graph_cmd->add_option("--out", out_dir, "output directory")->required();

  // metrics
  auto* metrics_cmd =
      app.add_subcommand("metrics", "PSI/ASI/AAI series CSVs");
  add_inputs(metrics_cmd, in);
  std::string filter_str = "all";
  metrics_cmd->add_option("--filter", filter_str,
                          "all|official|third_party|lnm|bnm|lp");
  metrics_cmd->add_option("--alpha", hcfg.alpha, "hyperedge weight scale");
  metrics_cmd->add_option("--theta", hcfg.theta, "coverage exponent");
  metrics_cmd->add_option("--n-total", hcfg.n_total, "chain universe size");
  metrics_cmd->add_option("--out", out_dir, "output directory")->required();

  // flows
  auto* flows_cmd = app.add_subcommand("flows", "flow analytics tables");
  add_inputs(flows_cmd, in, false);
  std::string report_kind;
  std::string basis_str = "count";
  int top_k = 10;
  bool exclude_official = false;
  flows_cmd
      ->add_option("--report", report_kind,
                   "weekly-bridges|endpoints|share-gap|net-flows|ecosystem-split")
      ->required();
  flows_cmd->add_option("--basis", basis_str, "count|amount");
  flows_cmd->add_option("--top-k", top_k, "entities kept out of OTHER");
  flows_cmd->add_flag("--exclude-official", exclude_official,
                      "drop official bridges (net-flows)");
  flows_cmd->add_option("--out", out_dir, "output directory")->required();

  // dist
  auto* dist_cmd = app.add_subcommand(
      "dist", "window distribution summaries from five-number mixtures");
  add_inputs(dist_cmd, in, false);
  std::string group_str = "bridge";
  std::string metric_str = "value";
  dist_cmd->add_option("--group", group_str, "bridge|chain");
  dist_cmd->add_option("--metric", metric_str, "value|fee|latency");
  dist_cmd->add_option("--out", out_file, "output CSV")->required();

  // regress
  auto* regress_cmd =
      app.add_subcommand("regress", "panel regression from a JSON spec");
  add_inputs(regress_cmd, in);
  std::string spec_path;
  regress_cmd->add_option("--spec", spec_path, "regression spec JSON")
      ->required();
  regress_cmd->add_option("--out", out_file, "results CSV")->required();

  // did
  auto* did_cmd = app.add_subcommand("did", "difference-in-differences");
  add_inputs(did_cmd, in);
  std::string event_str = "2023-07-06";
  std::string treated_path;
  std::string did_outcome = "ln_tvl";
  std::vector<std::string> did_controls;
  did_cmd->add_option("--event", event_str, "event date (YYYY-MM-DD)");
  did_cmd->add_option("--treated", treated_path,
                      "file with one treated chain id per line")
      ->required();
  did_cmd->add_option("--outcome", did_outcome, "outcome column");
  did_cmd->add_option("--control", did_controls, "control column (repeatable)");
  did_cmd->add_option("--out", out_file, "results CSV")->required();

  // corr
  auto* corr_cmd =
      app.add_subcommand("corr", "rolling TVL comovement regressions");
  add_inputs(corr_cmd, in);
  std::vector<int> windows = {30, 60, 90};
  corr_cmd->add_option("--windows", windows, "rolling window lengths")->delimiter(',');
  corr_cmd->add_option("--out", out_dir, "output directory")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "full pipeline from a manifest");
  std::string manifest_path;
  int workers = 0;
  std::uint64_t seed = 0;
  run_cmd->add_option("--manifest", manifest_path, "run manifest JSON")
      ->required();
  run_cmd->add_option("--workers", workers, "parallelism cap");
  run_cmd->add_option("--seed", seed, "seed echoed into provenance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate_cmd) {
      Taxonomy tax = in.tax();
      ChainPanel chains = load_chain_panel(in.chains_path, tax);
      FlowPanel flows = load_flow_panel(in.flows_path, tax);
      std::cout << validate_panels(chains, flows, tax).to_json() << std::endl;
      return 0;
    }
    if (*graph_cmd) {
      hcfg.rule = lower(rule) == "rolling" ? MembershipRule::RollingWindow
                                           : MembershipRule::CumulativeUntilEol;
      Taxonomy tax = in.tax();
      FlowPanel flows = load_flow_panel(in.flows_path, tax);
      fs::create_directories(out_dir);
      for (const auto& snap : build_snapshots(flows, tax, hcfg)) {
        ProjectedGraph g = project(snap);
        CsvWriter w((fs::path(out_dir) / (snap.date.to_string() + ".csv"))
                        .string());
        w.row({"date", "i", "j", "S", "delta", "d"});
        for (std::size_t i = 0; i < g.size(); ++i) {
          for (std::size_t j = i + 1; j < g.size(); ++j) {
            auto d = g.shortest(i, j);
            if (g.strength(i, j) <= 0 && !d) continue;
            w.row({snap.date.to_string(), g.chains()[i], g.chains()[j],
                   format_double(g.strength(i, j)),
                   g.delta(i, j) ? format_double(*g.delta(i, j)) : "",
                   d ? format_double(*d) : ""});
          }
        }
      }
      return 0;
    }
    if (*metrics_cmd) {
      Taxonomy tax = in.tax();
      ChainPanel chains = load_chain_panel(in.chains_path, tax);
      FlowPanel flows = load_flow_panel(in.flows_path, tax);
      auto snapshots = build_snapshots(flows, tax, hcfg);
      MetricSeries series = metric_series(snapshots, flows, chains, tax,
                                          parse_filter(filter_str));
      fs::create_directories(out_dir);
      std::string fname = filter_name(series.filter);
      CsvWriter wa((fs::path(out_dir) / "asi.csv").string());
      wa.row({"date", "chain", "filter", "asi"});
      for (const auto& pt : series.asi) {
        wa.row({pt.date.to_string(), pt.chain, fname, format_double(pt.value)});
      }
      CsvWriter wi((fs::path(out_dir) / "aai.csv").string());
      wi.row({"date", "chain", "filter", "aai"});
      for (const auto& pt : series.aai) {
        wi.row({pt.date.to_string(), pt.chain, fname, opt_str(pt.value)});
      }
      CsvWriter wp((fs::path(out_dir) / "psi.csv").string());
      wp.row({"date", "i", "j", "filter", "psi"});
      for (const auto& pt : series.psi) {
        wp.row({pt.date.to_string(), pt.i, pt.j, fname, opt_str(pt.value)});
      }
      return 0;
    }
    if (*flows_cmd) {
      Taxonomy tax = in.tax();
      FlowPanel flows = load_flow_panel(in.flows_path, tax);
      fs::create_directories(out_dir);
      ShareBasis basis = parse_basis(basis_str);
      if (report_kind == "weekly-bridges" || report_kind == "endpoints") {
        auto shares = report_kind == "weekly-bridges"
                          ? weekly_bridge_activity(flows, basis, top_k)
                          : endpoint_shares(flows, basis, top_k);
        CsvWriter w(
            (fs::path(out_dir) / (report_kind + "_" + basis_str + ".csv"))
                .string());
        w.row({"period", "entity", "basis", "share"});
        for (const auto& s : shares) {
          w.row({s.period, s.entity, basis_str, format_double(s.share)});
        }
      } else if (report_kind == "share-gap") {
        CsvWriter w((fs::path(out_dir) / "share_gap.csv").string());
        w.row({"month", "bridge_id", "gap"});
        for (const auto& g : share_gap(flows).points) {
          w.row({g.month, g.bridge_id, format_double(g.gap)});
        }
      } else if (report_kind == "net-flows") {
        CsvWriter w((fs::path(out_dir) / "net_flows.csv").string());
        w.row({"chain_a", "chain_b", "net_usd", "gross_usd", "direction",
               "flips"});
        for (const auto& e : net_flows(flows, tax, exclude_official)) {
          w.row({e.chain_a, e.chain_b, format_double(e.net_usd),
                 format_double(e.gross_usd), e.direction,
                 e.direction_flips ? "1" : "0"});
        }
      } else if (report_kind == "ecosystem-split") {
        auto split = ecosystem_split(flows, tax);
        CsvWriter w((fs::path(out_dir) / "ecosystem_split.csv").string());
        w.row({"direction", "bridge_id", "transfers", "amount_usd",
               "count_share", "amount_share"});
        for (const auto& r : split.rows) {
          w.row({r.direction, r.bridge_id, std::to_string(r.transfers),
                 format_double(r.amount_usd), format_double(r.count_share),
                 format_double(r.amount_share)});
        }
      } else {
        std::cerr << "unknown report '" << report_kind << "'\n";
        return 2;
      }
      return 0;
    }
    if (*dist_cmd) {
      Taxonomy tax = in.tax();
      FlowPanel flows = load_flow_panel(in.flows_path, tax);
      auto rows = window_summary(flows, parse_dist_group(group_str),
                                 parse_dist_metric(metric_str));
      CsvWriter w(out_file);
      w.row({"entity", "n", "d", "q1", "q2", "q3", "iqr"});
      for (const auto& r : rows) {
        w.row({r.entity, std::to_string(r.n), std::to_string(r.d),
               opt_str(r.q1), opt_str(r.q2), opt_str(r.q3), opt_str(r.iqr)});
      }
      return 0;
    }
    if (*regress_cmd) {
      Taxonomy tax = in.tax();
      std::ifstream f(spec_path);
      if (!f) throw Error(ErrorCode::IoError, "cannot open " + spec_path);
      nlohmann::json j;
      f >> j;
      RegressionSpec spec;
      spec.outcome = j.at("outcome").get<std::string>();
      for (const auto& r : j.at("regressors")) {
        spec.regressors.push_back(r.get<std::string>());
      }
      if (j.contains("fe")) {
        spec.fe_unit = spec.fe_time = false;
        for (const auto& fe : j["fe"]) {
          std::string s = lower(fe.get<std::string>());
          if (s == "unit") spec.fe_unit = true;
          if (s == "time") spec.fe_time = true;
        }
      }
      if (lower(j.value("se_mode", "classical")) == "hc1") {
        spec.se_mode = SeMode::Hc1;
      }
      FeaturePanel panel = load_standard_panel(
          in, hcfg, {BridgeFilter::All}, tax);
      write_regression_csv(out_file, twfe_ols(panel, spec));
      return 0;
    }
    if (*did_cmd) {
      Taxonomy tax = in.tax();
      std::ifstream f(treated_path);
      if (!f) throw Error(ErrorCode::IoError, "cannot open " + treated_path);
      std::set<std::string> treated;
      std::string line;
      while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) treated.insert(tax.resolve_chain(line));
      }
      FeaturePanel panel = load_standard_panel(
          in, hcfg, {BridgeFilter::All}, tax);
      RegressionSpec spec;
      spec.outcome = did_outcome;
      spec.regressors = did_controls;
      write_regression_csv(
          out_file, did(panel, treated, Date::parse(event_str), spec));
      return 0;
    }
    if (*corr_cmd) {
      Taxonomy tax = in.tax();
      ChainPanel chains = load_chain_panel(in.chains_path, tax);
      FlowPanel flows = load_flow_panel(in.flows_path, tax);
      auto snapshots = build_snapshots(flows, tax, hcfg);
      MetricSeries series =
          metric_series(snapshots, flows, chains, tax, BridgeFilter::All);
      fs::create_directories(out_dir);
      for (int w : windows) {
        FeaturePanel pairs = build_pair_panel(series, chains, flows, tax, w);
        RegressionSpec spec;
        spec.outcome = "rho_tvl";
        spec.regressors = {"psi", "ln_flow"};
        write_regression_csv(
            (fs::path(out_dir) / ("comovement_w" + std::to_string(w) + ".csv"))
                .string(),
            twfe_ols(pairs, spec));
      }
      return 0;
    }
    if (*run_cmd) {
      RunManifest manifest = RunManifest::load(manifest_path);
      if (workers > 0) manifest.workers = workers;
      if (seed) manifest.seed = seed;
      try {
        manifest.validate();
      } catch (const Error& e) {
        std::cerr << "validation: " << e.what() << '\n';
        return 2;
      }
      PipelineBundle bundle;
      try {
        bundle = run_pipeline(manifest);
      } catch (const Error& e) {
        std::cerr << "stage failure: " << e.what() << '\n';
        return 3;
      }
      Report report = emit_report(bundle, manifest);
      std::cout << report.markdown;
      if (!report.all_pass) return 4;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
