#include "interop/pipeline.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "interop/csv.hpp"
#include "json.hpp"

namespace interop {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_string(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_string(ss.str());
}

namespace {

RegressionSpec spec_from_json(const json& j) {
  RegressionSpec spec;
  spec.outcome = j.at("outcome").get<std::string>();
  for (const auto& r : j.at("regressors")) {
    spec.regressors.push_back(r.get<std::string>());
  }
  if (j.contains("fe")) {
    spec.fe_unit = spec.fe_time = false;
    for (const auto& fe : j["fe"]) {
      std::string f = lower(fe.get<std::string>());
      if (f == "unit") spec.fe_unit = true;
      else if (f == "time") spec.fe_time = true;
      else throw Error(ErrorCode::BadConfig, "unknown fe '" + f + "'");
    }
  }
  std::string se = lower(j.value("se_mode", "classical"));
  if (se == "classical") spec.se_mode = SeMode::Classical;
  else if (se == "hc1") spec.se_mode = SeMode::Hc1;
  else throw Error(ErrorCode::BadConfig, "unknown se_mode '" + se + "'");
  return spec;
}

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : "";
}

// stage digests persisted under the bundle for output-skipping reruns
class StageCache {
 public:
  explicit StageCache(const fs::path& dir) : path_(dir / "stage_digests.json") {
    std::ifstream in(path_);
    if (in) {
      try {
        json j;
        in >> j;
        for (auto& [k, v] : j.items()) digests_[k] = v.get<std::string>();
      } catch (...) {
        digests_.clear();
      }
    }
  }

  bool fresh(const std::string& stage, const std::string& digest,
             const std::vector<fs::path>& outputs) const {
    auto it = digests_.find(stage);
    if (it == digests_.end() || it->second != digest) return false;
    for (const auto& p : outputs) {
      if (!fs::exists(p)) return false;
    }
    return true;
  }

  void record(const std::string& stage, const std::string& digest) {
    digests_[stage] = digest;
  }

  void save() const {
    json j(digests_);
    std::ofstream out(path_);
    out << j.dump(2) << '\n';
  }

 private:
  fs::path path_;
  std::map<std::string, std::string> digests_;
};

}  // namespace

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + path);
  json j;
  RunManifest m;
  try {
    in >> j;
    m.chains_path = j.at("chains").get<std::string>();
    m.flows_path = j.at("flows").get<std::string>();
    m.meta_path = j.at("meta").get<std::string>();
    m.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("reference")) {
      m.reference_path = j["reference"].get<std::string>();
    }
    if (j.contains("hypergraph")) {
      const json& h = j["hypergraph"];
      m.hypergraph.alpha = h.value("alpha", 1.0);
      m.hypergraph.theta = h.value("theta", 1.0);
      m.hypergraph.n_total = h.value("n_total", 20);
      std::string rule = lower(h.value("rule", "cumulative"));
      if (rule == "cumulative") {
        m.hypergraph.rule = MembershipRule::CumulativeUntilEol;
      } else if (rule == "rolling") {
        m.hypergraph.rule = MembershipRule::RollingWindow;
      } else {
        throw Error(ErrorCode::BadConfig, "unknown membership rule '" + rule + "'");
      }
      m.hypergraph.membership_window_days = h.value("window_days", 30);
    }
    if (j.contains("filters")) {
      m.filters.clear();
      for (const auto& f : j["filters"]) {
        m.filters.push_back(parse_filter(f.get<std::string>()));
      }
    }
    for (const auto& r : j.value("regressions", json::array())) {
      m.regressions.push_back(
          {r.at("name").get<std::string>(), spec_from_json(r)});
    }
    if (j.contains("did")) {
      const json& d = j["did"];
      DidConfig cfg;
      cfg.event_date = Date::parse(d.value("event", "2023-07-06"));
      for (const auto& t : d.at("treated")) {
        cfg.treated.insert(lower(t.get<std::string>()));
      }
      cfg.outcome = d.value("outcome", "ln_tvl");
      for (const auto& c : d.value("controls", json::array())) {
        cfg.controls.push_back(c.get<std::string>());
      }
      m.did = cfg;
    }
    if (j.contains("corr_windows")) {
      m.corr_windows.clear();
      for (const auto& w : j["corr_windows"]) m.corr_windows.push_back(w.get<int>());
    }
    if (j.contains("pearson_columns")) {
      m.pearson_columns.clear();
      for (const auto& c : j["pearson_columns"]) {
        m.pearson_columns.push_back(c.get<std::string>());
      }
    }
    m.seed = j.value("seed", 0);
    m.workers = j.value("workers", 1);
    m.write_daily_edges = j.value("write_daily_edges", false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("manifest: ") + e.what());
  }
  return m;
}

void RunManifest::validate() const {
  for (const std::string& p : {chains_path, flows_path, meta_path}) {
    if (!fs::exists(p)) {
      throw Error(ErrorCode::BadConfig, "input path missing: " + p);
    }
  }
  if (reference_path && !fs::exists(*reference_path)) {
    throw Error(ErrorCode::BadConfig,
                "reference path missing: " + *reference_path);
  }
  hypergraph.validate();
}

PipelineBundle run_pipeline(const RunManifest& manifest) {
  manifest.validate();
  fs::create_directories(manifest.out_dir);
  fs::path out(manifest.out_dir);
  StageCache cache(out);
  PipelineBundle bundle;
  bundle.out_dir = manifest.out_dir;

  std::string inputs_digest = sha256_string(sha256_file(manifest.chains_path) +
                                            sha256_file(manifest.flows_path) +
                                            sha256_file(manifest.meta_path));
  auto stage_digest = [&](const std::string& stage, const std::string& cfg) {
    return sha256_string(inputs_digest + "|" + stage + "|" + cfg);
  };
  auto run_stage = [&](const std::string& stage, const std::string& cfg,
                       const std::vector<fs::path>& outputs, auto&& body) {
    std::string digest = stage_digest(stage, cfg);
    if (cache.fresh(stage, digest, outputs)) {
      bundle.stages_skipped.push_back(stage);
    } else {
      body();
      cache.record(stage, digest);
      bundle.stages_run.push_back(stage);
    }
  };

  Taxonomy tax = Taxonomy::load(manifest.meta_path);
  ChainPanel chains = load_chain_panel(manifest.chains_path, tax);
  FlowPanel flows = load_flow_panel(manifest.flows_path, tax);

  // ---- validate ----
  ValidationReport report = validate_panels(chains, flows, tax);
  run_stage("validate", "", {out / "validation.json"}, [&] {
    std::ofstream f(out / "validation.json");
    f << report.to_json() << '\n';
  });

  // ---- graph ----
  auto snapshots = build_snapshots(flows, tax, manifest.hypergraph);
  std::ostringstream graph_cfg;
  graph_cfg << manifest.hypergraph.alpha << '|' << manifest.hypergraph.theta
            << '|' << manifest.hypergraph.n_total << '|'
            << int(manifest.hypergraph.rule) << '|'
            << manifest.hypergraph.membership_window_days << '|'
            << manifest.write_daily_edges;
  if (manifest.write_daily_edges) {
    fs::path gdir = out / "graph";
    run_stage("graph", graph_cfg.str(), {gdir}, [&] {
      fs::create_directories(gdir);
      for (const auto& snap : snapshots) {
        ProjectedGraph g = project(snap);
        CsvWriter w((gdir / (snap.date.to_string() + ".csv")).string());
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
    });
  }

  // ---- metrics ----
  std::vector<MetricSeries> all_metrics;
  for (BridgeFilter f : manifest.filters) {
    all_metrics.push_back(metric_series(snapshots, flows, chains, tax, f));
  }
  std::string metrics_cfg = graph_cfg.str();
  for (BridgeFilter f : manifest.filters) metrics_cfg += "|" + filter_name(f);
  fs::path mdir = out / "metrics";
  run_stage("metrics", metrics_cfg,
            {mdir / "asi.csv", mdir / "aai.csv", mdir / "psi.csv"}, [&] {
    fs::create_directories(mdir);
    CsvWriter wa((mdir / "asi.csv").string());
    wa.row({"date", "chain", "filter", "asi"});
    CsvWriter wi((mdir / "aai.csv").string());
    wi.row({"date", "chain", "filter", "aai"});
    CsvWriter wp((mdir / "psi.csv").string());
    wp.row({"date", "i", "j", "filter", "psi"});
    for (const auto& series : all_metrics) {
      std::string fname = filter_name(series.filter);
      for (const auto& pt : series.asi) {
        wa.row({pt.date.to_string(), pt.chain, fname, format_double(pt.value)});
      }
      for (const auto& pt : series.aai) {
        wi.row({pt.date.to_string(), pt.chain, fname, opt_str(pt.value)});
      }
      for (const auto& pt : series.psi) {
        wp.row({pt.date.to_string(), pt.i, pt.j, fname, opt_str(pt.value)});
      }
    }
  });

  // ---- flows ----
  fs::path fdir = out / "flows";
  run_stage("flows", "", {fdir}, [&] {
    fs::create_directories(fdir);
    for (ShareBasis basis : {ShareBasis::Count, ShareBasis::Amount}) {
      std::string bname = basis == ShareBasis::Count ? "count" : "amount";
      {
        CsvWriter w((fdir / ("weekly_bridges_" + bname + ".csv")).string());
        w.row({"period", "entity", "basis", "share"});
        for (const auto& s : weekly_bridge_activity(flows, basis, 10)) {
          w.row({s.period, s.entity, bname, format_double(s.share)});
        }
      }
      {
        CsvWriter w((fdir / ("endpoints_" + bname + ".csv")).string());
        w.row({"period", "entity", "basis", "share"});
        for (const auto& s : endpoint_shares(flows, basis, 10)) {
          w.row({s.period, s.entity, bname, format_double(s.share)});
        }
      }
    }
    {
      CsvWriter w((fdir / "share_gap.csv").string());
      w.row({"month", "bridge_id", "gap"});
      for (const auto& g : share_gap(flows).points) {
        w.row({g.month, g.bridge_id, format_double(g.gap)});
      }
    }
    for (bool excl : {false, true}) {
      CsvWriter w((fdir / (excl ? "net_flows_ex_official.csv"
                                : "net_flows.csv")).string());
      w.row({"chain_a", "chain_b", "net_usd", "gross_usd", "direction",
             "flips"});
      for (const auto& e : net_flows(flows, tax, excl)) {
        w.row({e.chain_a, e.chain_b, format_double(e.net_usd),
               format_double(e.gross_usd), e.direction,
               e.direction_flips ? "1" : "0"});
      }
    }
    {
      EcosystemSplit split = ecosystem_split(flows, tax);
      CsvWriter w((fdir / "ecosystem_split.csv").string());
      w.row({"direction", "bridge_id", "transfers", "amount_usd",
             "count_share", "amount_share"});
      for (const auto& r : split.rows) {
        w.row({r.direction, r.bridge_id, std::to_string(r.transfers),
               format_double(r.amount_usd), format_double(r.count_share),
               format_double(r.amount_share)});
      }
      bundle.figures["flows.transfers.nonevm_to_evm"] =
          double(split.total_transfers_nonevm_to_evm);
      bundle.figures["flows.transfers.evm_to_nonevm"] =
          double(split.total_transfers_evm_to_nonevm);
      bundle.figures["flows.amount.nonevm_to_evm"] =
          split.total_amount_nonevm_to_evm;
      bundle.figures["flows.amount.evm_to_nonevm"] =
          split.total_amount_evm_to_nonevm;
    }
  });
  if (bundle.figures.empty()) {
    EcosystemSplit split = ecosystem_split(flows, tax);
    bundle.figures["flows.transfers.nonevm_to_evm"] =
        double(split.total_transfers_nonevm_to_evm);
    bundle.figures["flows.transfers.evm_to_nonevm"] =
        double(split.total_transfers_evm_to_nonevm);
    bundle.figures["flows.amount.nonevm_to_evm"] =
        split.total_amount_nonevm_to_evm;
    bundle.figures["flows.amount.evm_to_nonevm"] =
        split.total_amount_evm_to_nonevm;
  }

  // ---- dist ----
  fs::path ddir = out / "dist";
  run_stage("dist", "", {ddir}, [&] { fs::create_directories(ddir); });
  for (DistGroup group : {DistGroup::Bridge, DistGroup::Chain}) {
    std::string gname = group == DistGroup::Bridge ? "bridge" : "chain";
    for (DistMetric metric :
         {DistMetric::Value, DistMetric::Fee, DistMetric::Latency}) {
      std::string mname = metric == DistMetric::Value  ? "value"
                          : metric == DistMetric::Fee  ? "fee"
                                                       : "latency";
      auto rows = window_summary(flows, group, metric);
      CsvWriter w((ddir / (gname + "_" + mname + ".csv")).string());
      w.row({"entity", "n", "d", "q1", "q2", "q3", "iqr"});
      for (const auto& r : rows) {
        w.row({r.entity, std::to_string(r.n), std::to_string(r.d),
               opt_str(r.q1), opt_str(r.q2), opt_str(r.q3), opt_str(r.iqr)});
        std::string prefix = "dist." + gname + "." + mname + "." + r.entity;
        bundle.figures[prefix + ".n"] = double(r.n);
        bundle.figures[prefix + ".d"] = double(r.d);
        if (r.q1) bundle.figures[prefix + ".q1"] = *r.q1;
        if (r.q2) bundle.figures[prefix + ".q2"] = *r.q2;
        if (r.q3) bundle.figures[prefix + ".q3"] = *r.q3;
      }
    }
  }

  // ---- regress ----
  fs::path rdir = out / "regress";
  fs::create_directories(rdir);
  FeaturePanel panel = build_feature_panel(all_metrics, chains, tax);
  add_forward_net_inflow(panel, flows, tax);

  auto write_result = [&](const std::string& name,
                          const RegressionResult& res) {
    CsvWriter w((rdir / (name + ".csv")).string());
    w.row({"regressor", "coef", "se", "t", "p"});
    for (const auto& c : res.coefs) {
      w.row({c.name, format_double(c.coef), format_double(c.se),
             format_double(c.t), format_double(c.p)});
      bundle.figures["regress." + name + "." + c.name + ".coef"] = c.coef;
      bundle.figures["regress." + name + "." + c.name + ".p"] = c.p;
    }
    w.row({"n_obs", std::to_string(res.n_obs), "", "", ""});
    w.row({"r2_within", format_double(res.r2_within), "", "", ""});
    w.row({"r2_overall", format_double(res.r2_overall), "", "", ""});
    bundle.figures["regress." + name + ".n_obs"] = double(res.n_obs);
    bundle.figures["regress." + name + ".r2_within"] = res.r2_within;
  };

  for (const auto& named : manifest.regressions) {
    write_result(named.name, twfe_ols(panel, named.spec));
  }
  if (manifest.did) {
    RegressionSpec spec;
    spec.outcome = manifest.did->outcome;
    spec.regressors = manifest.did->controls;
    write_result("did", did(panel, manifest.did->treated,
                            manifest.did->event_date, spec));
  }
  if (!manifest.corr_windows.empty() &&
      !all_metrics.empty()) {
    for (int w : manifest.corr_windows) {
      FeaturePanel pairs =
          build_pair_panel(all_metrics.front(), chains, flows, tax, w);
      if (pairs.n_rows() == 0) continue;
      RegressionSpec spec;
      spec.outcome = "rho_tvl";
      spec.regressors = {"psi", "ln_flow"};
      write_result("comovement_w" + std::to_string(w), twfe_ols(pairs, spec));
    }
  }
  if (manifest.pearson_columns.size() >= 2) {
    std::vector<OptSeries> cols;
    bool ok = true;
    for (const auto& name : manifest.pearson_columns) {
      if (!panel.has_column(name)) {
        ok = false;
        break;
      }
      cols.push_back(panel.column(name));
    }
    if (ok) {
      try {
        auto matrix = pearson_matrix(cols);
        CsvWriter w((rdir / "pearson.csv").string());
        w.row({"a", "b", "r", "p", "n"});
        for (std::size_t a = 0; a < cols.size(); ++a) {
          for (std::size_t b = 0; b < cols.size(); ++b) {
            const auto& cell = matrix[a][b];
            w.row({manifest.pearson_columns[a], manifest.pearson_columns[b],
                   format_double(cell.r), format_double(cell.p),
                   std::to_string(cell.n)});
            if (a < b) {
              std::string key = "pearson." + manifest.pearson_columns[a] +
                                "." + manifest.pearson_columns[b];
              bundle.figures[key + ".r"] = cell.r;
              bundle.figures[key + ".p"] = cell.p;
            }
          }
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientPairs) throw;
      }
    }
  }

  // ---- provenance ----
  {
    json prov;
    prov["inputs"] = {{"chains", sha256_file(manifest.chains_path)},
                      {"flows", sha256_file(manifest.flows_path)},
                      {"meta", sha256_file(manifest.meta_path)}};
    prov["config"] = {{"alpha", manifest.hypergraph.alpha},
                      {"theta", manifest.hypergraph.theta},
                      {"n_total", manifest.hypergraph.n_total},
                      {"seed", manifest.seed},
                      {"workers", manifest.workers}};
    prov["version"] = "interop-lens 0.1.0";
    json figs = json::object();
    for (const auto& [k, v] : bundle.figures) figs[k] = v;
    prov["figures"] = figs;
    std::ofstream f(out / "provenance.json");
    f << prov.dump(2) << '\n';
  }
  cache.save();
  bundle.complete = true;
  return bundle;
}

Report emit_report(const PipelineBundle& bundle, const RunManifest& manifest) {
  if (!bundle.complete) {
    throw Error(ErrorCode::IncompleteBundle, bundle.out_dir);
  }
  Report report;
  std::ostringstream md;
  md << "# interop-lens run report\n\n";
  md << "Bundle: `" << bundle.out_dir << "`\n\n";
  md << "Stages run: " << bundle.stages_run.size()
     << ", cached: " << bundle.stages_skipped.size() << "\n\n";

  if (manifest.reference_path) {
    std::ifstream in(*manifest.reference_path);
    json refs;
    in >> refs;
    md << "## Reference comparisons\n\n";
    md << "| key | expected | actual | tolerance | status |\n";
    md << "|---|---|---|---|---|\n";
    for (auto& [key, ref] : refs.items()) {
      ComparisonRow row;
      row.key = key;
      row.expected = ref.at("expected").get<double>();
      auto it = bundle.figures.find(key);
      if (it != bundle.figures.end()) row.actual = it->second;
      if (ref.contains("tol_rel")) {
        row.tolerance = std::fabs(row.expected) * ref["tol_rel"].get<double>();
      } else {
        row.tolerance = ref.value("tol_abs", 0.0);
      }
      row.pass = row.actual &&
                 std::fabs(*row.actual - row.expected) <= row.tolerance;
      report.all_pass = report.all_pass && row.pass;
      md << "| " << key << " | " << row.expected << " | "
         << (row.actual ? format_double(*row.actual) : std::string("missing"))
         << " | " << row.tolerance << " | " << (row.pass ? "PASS" : "FAIL")
         << " |\n";
      report.comparisons.push_back(std::move(row));
    }
    md << '\n';
  }

  md << "## Figures\n\n";
  for (const auto& [k, v] : bundle.figures) {
    md << "- " << k << " = " << format_double(v) << '\n';
  }
  report.markdown = md.str();

  std::ofstream f(std::filesystem::path(bundle.out_dir) / "report.md");
  f << report.markdown;
  return report;
}

}  // namespace interop
